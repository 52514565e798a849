"""Real-eigenvalue enumeration by sign-change bracketing of the determinant.

The scan walks lambda from a floor below any possible ground state up through
s-space (s = sqrt(lambda)) in uniform s-steps, brackets every sign change of
the characteristic determinant and refines each bracket by bisection.  A
completeness audit counts the roots found below s = (count - 1/2)*pi against
the asymptotic count implied by the s*sin(s) leading behavior; shortfalls are
flagged as suspect intervals (possible non-real pairs or tangential double
roots, which a sign-change scan cannot see).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DEFAULT_STEPS, BoundaryMatrix, ProblemKind, ProblemSpec
from .charfn import det_batch

DEFAULT_SCAN_PER_PI = 16
DEFAULT_ROOT_TOL = 1e-10


class IncompleteSpectrumError(RuntimeError):
    """Fewer roots than requested before the scan ceiling; carries the partial result."""

    def __init__(self, spectrum: "Spectrum", requested: int):
        self.spectrum = spectrum
        self.requested = requested
        ivals = ", ".join(
            f"[{lo:.6g}, {hi:.6g})" for lo, hi in spectrum.suspect_intervals
        )
        super().__init__(
            f"found {spectrum.count} of {requested} requested eigenvalues; "
            f"suspect lambda intervals: {ivals or 'none'} "
            "(possible non-real eigenvalues or double roots)"
        )


@dataclass(frozen=True)
class Spectrum:
    kind: ProblemKind
    eigenvalues: tuple
    root_tolerance: float
    audit_complete: bool
    suspect_intervals: tuple = ()

    def __post_init__(self):
        evs = tuple(float(v) for v in self.eigenvalues)
        if any(not math.isfinite(v) for v in evs):
            raise ValueError("eigenvalues must be finite")
        if any(b <= a for a, b in zip(evs, evs[1:])):
            raise ValueError("eigenvalues must be strictly ascending")
        object.__setattr__(self, "eigenvalues", evs)

    @property
    def count(self) -> int:
        return len(self.eigenvalues)

    @property
    def audit(self) -> str:
        if self.audit_complete:
            return "Complete"
        ivals = ";".join(f"[{lo:.9g},{hi:.9g})" for lo, hi in self.suspect_intervals)
        return f"SuspectMissing {ivals}"


def default_lambda_floor(spec: ProblemSpec) -> float:
    """-(||q||_inf bound + 4*max|a_ij| + 10), over the entries the kind reads."""
    b = spec.boundary
    if spec.kind is ProblemKind.FULL_L:
        entries = (b.a11, b.a12, b.a21, b.a22)
    elif spec.kind is ProblemKind.DECOMPOSED_L1:
        entries = (b.a11, b.a22)
    else:
        entries = (b.a11, b.a12)
    return -(spec.potential.sup_bound() + 4.0 * max(abs(a) for a in entries) + 10.0)


def _bisect_batch(f, lo, hi, flo, tol):
    """Vectorized bisection; f maps an array of abscissae to determinant values."""
    lo = lo.copy()
    hi = hi.copy()
    flo = flo.copy()
    while np.max(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        left = np.sign(fmid) == np.sign(flo)
        left |= fmid == 0.0  # keep an exact zero as the new lower endpoint
        lo = np.where(left, mid, lo)
        flo = np.where(left, fmid, flo)
        hi = np.where(left, hi, mid)
    return 0.5 * (lo + hi)


def enumerate_eigenvalues(
    spec: ProblemSpec,
    count: int,
    steps: int = DEFAULT_STEPS,
    scan_points_per_pi: int = DEFAULT_SCAN_PER_PI,
    root_tolerance: float = DEFAULT_ROOT_TOL,
    lambda_floor: float | None = None,
) -> Spectrum:
    """First `count` real eigenvalues of the problem, with completeness audit."""
    count = int(count)
    if count < 1:
        raise ValueError("count must be at least 1")
    if scan_points_per_pi < 8:
        raise ValueError("scan_points_per_pi must be at least 8")
    root_tolerance = float(root_tolerance)
    if lambda_floor is None:
        lambda_floor = default_lambda_floor(spec)

    ds = math.pi / scan_points_per_pi
    s_ceiling = (count + 1.5) * math.pi

    # lambda grid: negative region stepped in lambda, then the s grid squared
    neg = np.arange(lambda_floor, 0.0, ds * ds)
    s_grid = np.arange(1, int(math.ceil(s_ceiling / ds)) + 1) * ds
    grid = np.concatenate([neg, [0.0], s_grid * s_grid])

    fvals = det_batch(spec, grid, steps)

    roots = []
    exact = np.flatnonzero(fvals == 0.0)
    roots.extend(grid[exact].tolist())
    sign_change = np.flatnonzero(
        (fvals[:-1] * fvals[1:] < 0.0)
        & (fvals[:-1] != 0.0)
        & (fvals[1:] != 0.0)
    )

    pos = sign_change[grid[sign_change] >= 0.0]
    negb = sign_change[grid[sign_change] < 0.0]

    if pos.size:
        # refine in s; tolerance is stated in s for non-negative lambda
        s_lo = np.sqrt(grid[pos])
        s_hi = np.sqrt(grid[pos + 1])
        f_s = lambda s: det_batch(spec, s * s, steps)
        s_roots = _bisect_batch(f_s, s_lo, s_hi, fvals[pos], root_tolerance)
        roots.extend((s_roots * s_roots).tolist())
    if negb.size:
        # refine in lambda directly; there is no s parameterization below zero
        f_l = lambda lam: det_batch(spec, lam, steps)
        l_roots = _bisect_batch(
            f_l, grid[negb], grid[negb + 1], fvals[negb], root_tolerance
        )
        roots.extend(l_roots.tolist())

    roots.sort()
    merged = []
    for r in roots:
        tol = max(8.0 * root_tolerance * (1.0 + math.sqrt(abs(r))), 1e-12)
        if merged and r - merged[-1] < tol:
            continue
        merged.append(r)

    s_limit = (count - 0.5) * math.pi
    below = [r for r in merged if r < s_limit * s_limit]
    complete = len(below) == count and len(merged) >= count

    suspects = ()
    if not complete:
        windows = [(-math.inf, (0.5 * math.pi) ** 2)]
        windows += [
            (((k - 0.5) * math.pi) ** 2, ((k + 0.5) * math.pi) ** 2)
            for k in range(1, count)
        ]
        suspects = tuple(
            (max(lo, lambda_floor), hi)
            for lo, hi in windows
            if not any(lo <= r < hi for r in merged)
        )

    if len(merged) < count:
        partial = Spectrum(
            spec.kind, tuple(merged), root_tolerance, False, suspects
        )
        raise IncompleteSpectrumError(partial, count)

    return Spectrum(
        spec.kind, tuple(merged[:count]), root_tolerance, complete, suspects
    )


@dataclass(frozen=True)
class AsymptoticsReport:
    deviations: tuple
    scaled_deviations: tuple
    bound: float
    bounded: bool


def verify_spectrum_asymptotics(
    sp: Spectrum, u1: float, bm: BoundaryMatrix
) -> AsymptoticsReport:
    """Check that sqrt(lambda_k) - k*pi decays like O(1/k) in the computed tail.

    Root placement of s*sin(s) + O(1) pins sqrt(lambda_k) near k*pi with a
    deviation whose size is controlled by the boundary constants and u(1).
    """
    if sp.count < 5:
        raise ValueError("asymptotics check needs at least 5 eigenvalues")
    tail = sp.eigenvalues[-min(10, sp.count - 2):]
    if any(lam <= 0.0 for lam in tail):
        raise ValueError("tail eigenvalues must be positive for the s = sqrt(lambda) map")

    deviations = []
    scaled = []
    for lam in tail:
        s = math.sqrt(lam)
        k = round(s / math.pi)
        d = s - k * math.pi
        deviations.append(d)
        if k >= 1:
            scaled.append(k * abs(d))
    bound = 2.0 * (
        abs(bm.a11) + abs(bm.a12) + abs(bm.a21) + abs(bm.a22) + abs(u1) + 1.0
    ) / math.pi
    bounded = bool(scaled) and max(scaled) <= bound
    return AsymptoticsReport(tuple(deviations), tuple(scaled), bound, bounded)
