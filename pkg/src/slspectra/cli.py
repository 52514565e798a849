"""Command-line surface: forward solves, spectrum export, inversion, decomposition.

Problem definitions live in strict-schema JSON files:

    {
      "format_version": 1,
      "potential": {"coefficients": [0.0, 1.0]},
      "boundary": {"a11": 0.5, "a12": -1.0, "a21": 2.0, "a22": 1.0},
      "solver": {"steps": 2048, "scan_points_per_pi": 16, "root_tolerance": 1e-10}
    }

Unknown keys are rejected anywhere in the document.  Spectrum CSVs carry the
header `index,lambda,sqrt_lambda` and a trailing `# audit: ...` comment line.

Exit codes: 0 ok, 2 input error, 3 numeric overflow, 4 audit failure,
5 non-convergence, 6 degeneracy, 7 conditioning.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from .core import (
    DEFAULT_STEPS,
    BoundaryMatrix,
    NumericOverflowError,
    Potential,
    ProblemKind,
    ProblemSpec,
    integrate_fundamental,
    u_accumulated,
)
from .charfn import char_det, det_batch
from .spectrum import (
    DEFAULT_ROOT_TOL,
    DEFAULT_SCAN_PER_PI,
    IncompleteSpectrumError,
    Spectrum,
    enumerate_eigenvalues,
)
from .inverse import (
    DEGENERACY_WARNING,
    ConditioningError,
    ReconstructionTarget,
    basis_decompose,
    reconstruct_problem,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_OVERFLOW = 3
EXIT_AUDIT = 4
EXIT_NONCONVERGED = 5
EXIT_DEGENERATE = 6
EXIT_CONDITIONING = 7

_KIND_NAMES = {
    "full": ProblemKind.FULL_L,
    "l1": ProblemKind.DECOMPOSED_L1,
    "l2": ProblemKind.DECOMPOSED_L2,
}

CSV_HEADER = "index,lambda,sqrt_lambda"


class ProblemFileError(ValueError):
    """Problem file failed to parse or violated the schema."""


@dataclass(frozen=True)
class SolverSettings:
    steps: int = DEFAULT_STEPS
    scan_points_per_pi: int = DEFAULT_SCAN_PER_PI
    root_tolerance: float = DEFAULT_ROOT_TOL


@dataclass(frozen=True)
class ProblemFile:
    potential: Potential
    boundary: BoundaryMatrix
    solver: SolverSettings

    def spec(self, kind: ProblemKind) -> ProblemSpec:
        return ProblemSpec(self.potential, self.boundary, kind)


def _require_keys(obj, allowed, required, where):
    if not isinstance(obj, dict):
        raise ProblemFileError(f"{where}: expected an object")
    unknown = set(obj) - set(allowed)
    if unknown:
        raise ProblemFileError(f"{where}: unknown keys {sorted(unknown)}")
    missing = set(required) - set(obj)
    if missing:
        raise ProblemFileError(f"{where}: missing keys {sorted(missing)}")


def _number(obj, key, where):
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ProblemFileError(f"{where}.{key}: expected a finite number, got {v!r}")
    return float(v)


def load_problem_file(path: str) -> ProblemFile:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ProblemFileError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ProblemFileError(
            f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc

    _require_keys(
        doc,
        ("format_version", "potential", "boundary", "solver"),
        ("format_version", "potential", "boundary"),
        path,
    )
    if doc["format_version"] != 1:
        raise ProblemFileError(
            f"{path}.format_version: unsupported version {doc['format_version']!r}"
        )

    pot = doc["potential"]
    _require_keys(pot, ("coefficients",), ("coefficients",), f"{path}.potential")
    coeffs = pot["coefficients"]
    if not isinstance(coeffs, list) or not coeffs:
        raise ProblemFileError(f"{path}.potential.coefficients: expected a nonempty list")
    for i, c in enumerate(coeffs):
        if isinstance(c, bool) or not isinstance(c, (int, float)) or not math.isfinite(c):
            raise ProblemFileError(
                f"{path}.potential.coefficients[{i}]: expected a finite number"
            )

    bnd = doc["boundary"]
    names = ("a11", "a12", "a21", "a22")
    _require_keys(bnd, names, names, f"{path}.boundary")
    boundary = BoundaryMatrix(*(_number(bnd, k, f"{path}.boundary") for k in names))

    settings = SolverSettings()
    if "solver" in doc:
        sv = doc["solver"]
        _require_keys(
            sv, ("steps", "scan_points_per_pi", "root_tolerance"), (), f"{path}.solver"
        )
        settings = SolverSettings(
            steps=int(_number(sv, "steps", f"{path}.solver")) if "steps" in sv
            else DEFAULT_STEPS,
            scan_points_per_pi=int(_number(sv, "scan_points_per_pi", f"{path}.solver"))
            if "scan_points_per_pi" in sv
            else DEFAULT_SCAN_PER_PI,
            root_tolerance=_number(sv, "root_tolerance", f"{path}.solver")
            if "root_tolerance" in sv
            else DEFAULT_ROOT_TOL,
        )

    return ProblemFile(Potential(coeffs), boundary, settings)


def write_problem_file(path, potential: Potential, boundary: BoundaryMatrix):
    doc = {
        "format_version": 1,
        "potential": {"coefficients": list(potential.coefficients)},
        "boundary": {
            "a11": boundary.a11,
            "a12": boundary.a12,
            "a21": boundary.a21,
            "a22": boundary.a22,
        },
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def _fmt17(x: float) -> str:
    return f"{x:.17g}"


def spectrum_csv_lines(sp: Spectrum):
    lines = [CSV_HEADER]
    for i, lam in enumerate(sp.eigenvalues):
        sqrt = _fmt17(math.sqrt(lam)) if lam >= 0.0 else ""
        lines.append(f"{i},{_fmt17(lam)},{sqrt}")
    lines.append(f"# audit: {sp.audit}")
    return lines


def read_spectrum_csv(path: str, kind: ProblemKind) -> Spectrum:
    try:
        with open(path) as fh:
            raw = [ln.strip() for ln in fh]
    except OSError as exc:
        raise ProblemFileError(f"cannot read {path}: {exc}") from exc
    rows = [ln for ln in raw if ln and not ln.startswith("#")]
    if not rows or rows[0] != CSV_HEADER:
        raise ProblemFileError(f"{path}: expected header '{CSV_HEADER}'")
    eigs = []
    for ln in rows[1:]:
        parts = ln.split(",")
        if len(parts) != 3:
            raise ProblemFileError(f"{path}: malformed row {ln!r}")
        try:
            eigs.append(float(parts[1]))
        except ValueError as exc:
            raise ProblemFileError(f"{path}: bad lambda in row {ln!r}") from exc
    if not eigs:
        raise ProblemFileError(f"{path}: no eigenvalue rows")
    return Spectrum(kind, tuple(eigs), DEFAULT_ROOT_TOL, True)


def _write_or_print(lines, out_path):
    text = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_forward(args) -> int:
    pf = load_problem_file(args.problem)
    steps = args.steps or pf.solver.steps
    fund = integrate_fundamental(pf.potential, args.lam, steps)
    for kind in (ProblemKind.FULL_L, ProblemKind.DECOMPOSED_L1, ProblemKind.DECOMPOSED_L2):
        delta = char_det(pf.spec(kind), fund)
        print(
            f"{kind.value},{args.lam:.12g},{fund.y1:.12g},{fund.dy1:.12g},"
            f"{fund.y2:.12g},{fund.dy2:.12g},{delta:.12g}"
        )
    return EXIT_OK


def cmd_spectrum(args) -> int:
    pf = load_problem_file(args.problem)
    kind = _KIND_NAMES[args.kind]
    opts = dict(
        steps=args.steps or pf.solver.steps,
        scan_points_per_pi=args.scan_per_pi or pf.solver.scan_points_per_pi,
        root_tolerance=args.tol or pf.solver.root_tolerance,
    )
    try:
        sp = enumerate_eigenvalues(pf.spec(kind), args.count, **opts)
    except IncompleteSpectrumError as exc:
        _write_or_print(spectrum_csv_lines(exc.spectrum), args.out)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_AUDIT
    _write_or_print(spectrum_csv_lines(sp), args.out)
    return EXIT_OK if sp.audit_complete else EXIT_AUDIT


def cmd_invert(args) -> int:
    sp_l = read_spectrum_csv(args.spec_l, ProblemKind.FULL_L)
    sp_l1 = read_spectrum_csv(args.spec_l1, ProblemKind.DECOMPOSED_L1)
    sp_l2 = read_spectrum_csv(args.spec_l2, ProblemKind.DECOMPOSED_L2)
    if not (sp_l.count == sp_l1.count == sp_l2.count):
        raise ProblemFileError(
            f"row-count mismatch: {sp_l.count}, {sp_l1.count}, {sp_l2.count}"
        )
    if sp_l.count < args.basis_size + 3:
        raise ProblemFileError(
            f"need at least basis_size + 3 = {args.basis_size + 3} rows, "
            f"got {sp_l.count}"
        )
    target = ReconstructionTarget(sp_l, sp_l1, sp_l2)
    result = reconstruct_problem(
        target, args.basis_size, steps=args.steps or DEFAULT_STEPS
    )
    if args.out:
        write_problem_file(args.out, result.potential_hat, result.boundary_hat)
    print(f"misfit = {result.misfit:.17g}")
    print(f"iterations = {result.iterations}")
    print(f"converged = {result.converged}")
    for w in result.warnings:
        print(f"warning: {w}")
    if DEGENERACY_WARNING in result.warnings:
        print(
            "error: auxiliary spectra are degenerate; the uniqueness theorem "
            "requires a12 != a22",
            file=sys.stderr,
        )
        return EXIT_DEGENERATE
    if not result.converged:
        return EXIT_NONCONVERGED
    return EXIT_OK


def cmd_decompose(args) -> int:
    pf = load_problem_file(args.problem)
    if args.s_min < 20.0:
        raise ProblemFileError("s-min must be at least 20 (large-s regime)")
    if args.samples < 25:
        raise ProblemFileError("need at least 25 samples")
    if args.s_max <= args.s_min:
        raise ProblemFileError("s-max must exceed s-min")
    steps = args.steps or pf.solver.steps
    s = np.linspace(args.s_min, args.s_max, args.samples)
    values = det_batch(pf.spec(ProblemKind.FULL_L), s * s, steps)
    coeffs = basis_decompose(np.column_stack([s, values]))
    b = pf.boundary
    u1 = u_accumulated(pf.potential, 1.0)
    pred_const = b.a12 - b.a21
    pred_cos = b.a11 - b.a22 - u1
    lines = [
        f"c_const = {_fmt17(coeffs.c_const)}",
        f"c_cos = {_fmt17(coeffs.c_cos)}",
        f"c_sin = {_fmt17(coeffs.c_sin)}",
        f"c_s_sin = {_fmt17(coeffs.c_s_sin)}",
        f"c_cos2 = {_fmt17(coeffs.c_cos2)}",
        f"residual_norm = {_fmt17(coeffs.residual_norm)}",
        f"predicted_c_const = {_fmt17(pred_const)}",
        f"c_const_discrepancy = {_fmt17(coeffs.c_const - pred_const)}",
        f"predicted_c_cos = {_fmt17(pred_cos)}",
        f"c_cos_discrepancy = {_fmt17(coeffs.c_cos - pred_cos)}",
    ]
    _write_or_print(lines, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slspectra",
        description="Forward and inverse three-spectra Sturm-Liouville solver",
    )
    parser.add_argument("--seed", type=int, default=None,
                        help="reserved; all algorithms are deterministic")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("forward", help="fundamental solution and determinants at one lambda")
    p.add_argument("problem")
    p.add_argument("lam", type=float, metavar="lambda")
    p.add_argument("--steps", type=int, default=None)
    p.set_defaults(func=cmd_forward)

    p = sub.add_parser("spectrum", help="enumerate eigenvalues to CSV")
    p.add_argument("problem")
    p.add_argument("kind", choices=sorted(_KIND_NAMES))
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--scan-per-pi", type=int, default=None)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("invert", help="reconstruct the problem from three spectrum CSVs")
    p.add_argument("spec_l")
    p.add_argument("spec_l1")
    p.add_argument("spec_l2")
    p.add_argument("--basis-size", type=int, default=6)
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser("decompose", help="project determinant samples on the trig basis")
    p.add_argument("problem")
    p.add_argument("--s-min", type=float, default=20.0)
    p.add_argument("--s-max", type=float, default=20.0 + 10.0 * math.pi)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_decompose)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ProblemFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericOverflowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OVERFLOW
    except ConditioningError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONDITIONING


def entry_point():  # pragma: no cover - console script shim
    sys.exit(main())
