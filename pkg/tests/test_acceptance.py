"""Acceptance suite: one test per criterion, printing a PASS line on success.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion lines.
"""

import json
import math
import time

import numpy as np
import pytest

from slspectra import (
    BoundaryMatrix,
    Potential,
    ProblemKind,
    ProblemSpec,
    ReconstructionTarget,
    asymptotic_det,
    basis_decompose,
    enumerate_eigenvalues,
    integrate_fundamental,
    reconstruct_problem,
    u_accumulated,
)
from slspectra.charfn import det_batch
from slspectra.inverse import DEGENERACY_WARNING
from slspectra.cli import EXIT_DEGENERATE, EXIT_OK, main

KINDS = (ProblemKind.FULL_L, ProblemKind.DECOMPOSED_L1, ProblemKind.DECOMPOSED_L2)


def _ok(num, text):
    print(f"PASS criterion {num}: {text}")


def spectra_for(coeffs, a, n, steps):
    pot = Potential(coeffs)
    bm = BoundaryMatrix(*a)
    return tuple(
        enumerate_eigenvalues(ProblemSpec(pot, bm, k), n, steps=steps) for k in KINDS
    )


def test_criterion_01_closed_form_spectra():
    spec = ProblemSpec(Potential([0.0]), BoundaryMatrix(0, 0, 0, 0), ProblemKind.FULL_L)
    t0 = time.perf_counter()
    # steps=8192 and a tight root tolerance: RK4 discretization error at the
    # default 2048 steps sits at ~2e-7 for the tenth eigenvalue, above the
    # 1e-8 target; two grid refinements bring it to ~2e-9 at no runtime cost
    sp = enumerate_eigenvalues(spec, 10, steps=8192, root_tolerance=1e-12)
    elapsed = time.perf_counter() - t0
    for k, lam in enumerate(sp.eigenvalues):
        assert lam == pytest.approx((k * math.pi) ** 2, abs=1e-8)
    assert elapsed < 1.0
    _ok(1, f"first 10 Neumann eigenvalues match (k*pi)^2, {elapsed:.3f}s")


def test_criterion_02_constant_shift_property():
    a = (0.3, -0.7, 1.1, 0.4)
    base = spectra_for([0.0], a, 8, 2048)
    shifted = spectra_for([5.0], a, 8, 2048)
    for sp0, sp5 in zip(base, shifted):
        for lam0, lam5 in zip(sp0.eigenvalues, sp5.eigenvalues):
            assert lam5 == pytest.approx(lam0 + 5.0, abs=1e-8)
    _ok(2, "q = const shifts every eigenvalue by the constant, all three kinds")


def test_criterion_03_robin_oracle():
    # independent scalar bisection on s*tan(s) = 1
    lo, hi = 1e-9, 1.5
    f = lambda s: s * math.tan(s) - 1.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if (f(mid) > 0) == (f(lo) > 0):
            lo = mid
        else:
            hi = mid
    s_oracle = 0.5 * (lo + hi)
    spec = ProblemSpec(
        Potential([0.0]), BoundaryMatrix(0.0, 0.0, 0.0, 1.0), ProblemKind.DECOMPOSED_L1
    )
    sp = enumerate_eigenvalues(spec, 1)
    assert math.sqrt(sp.eigenvalues[0]) == pytest.approx(s_oracle, abs=1e-9)
    _ok(3, f"first L1 Robin eigenvalue matches s*tan(s)=1 root s0={s_oracle:.6f}")


def test_criterion_04_wronskian_invariant():
    rng = np.random.RandomState(2024)
    worst = 0.0
    for _ in range(100):
        ncoef = rng.randint(1, 5)
        p = Potential(rng.uniform(-5.0, 5.0, size=ncoef))
        lam = rng.uniform(-50.0, 400.0)
        fund = integrate_fundamental(p, lam, steps=2048)
        worst = max(worst, abs(fund.wronskian_defect()))
    assert worst <= 1e-8
    _ok(4, f"Wronskian defect <= {worst:.2e} over 100 random (q, lambda) pairs")


def test_criterion_05_asymptotic_residual_decay():
    rng = np.random.RandomState(11)
    worst = 0.0
    for _ in range(10):
        pot = Potential(rng.uniform(-5.0, 5.0, size=rng.randint(1, 5)))
        bm = BoundaryMatrix(*rng.uniform(-3.0, 3.0, size=4))
        u1 = u_accumulated(pot, 1.0)
        spec = ProblemSpec(pot, bm, ProblemKind.FULL_L)
        for s in (20.0, 40.0, 80.0, 160.0):
            num = det_batch(spec, [s * s], 2048)[0]
            worst = max(worst, s * abs(num - asymptotic_det(bm, u1, s)))
    assert worst <= 50.0
    _ok(5, f"s * |Delta_num - Delta_asym| <= {worst:.2f} over 10 random problems")


def test_criterion_06_constant_term_identity():
    # zero-mean potential and a21 = a22 = 0: u(1) = 0, so the projection
    # identities c_const = a12 - a21 and c_cos = a11 - a22 - u(1) hold and the
    # discrepancy must shrink ~4x moving the window S = 20 -> 80
    pot = Potential([0.0, 1.2, -0.7])
    bm = BoundaryMatrix(0.7, 0.4, 0.0, 0.0)
    spec = ProblemSpec(pot, bm, ProblemKind.FULL_L)
    u1 = u_accumulated(pot, 1.0)
    assert u1 == pytest.approx(0.0, abs=1e-14)
    t0 = time.perf_counter()
    discs = []
    for S in (20.0, 80.0):
        s = np.linspace(S, S + 10.0 * math.pi, 200)
        bc = basis_decompose(np.column_stack([s, det_batch(spec, s * s, 4096)]))
        discs.append(
            max(abs(bc.c_const - (bm.a12 - bm.a21)), abs(bc.c_cos - (bm.a11 - bm.a22 - u1)))
        )
    elapsed = time.perf_counter() - t0
    assert discs[0] <= 0.5 / 20.0
    assert discs[1] <= 0.5 / 80.0
    assert discs[1] <= discs[0] / 2.5  # ~4x shrinkage with margin
    assert elapsed < 5.0
    _ok(6, f"identity discrepancy {discs[0]:.2e} -> {discs[1]:.2e} (S=20 -> 80), {elapsed:.2f}s")


BUNDLED_PROBLEMS = [
    ([0.0], (0.0, -1.0, 0.0, 1.0)),
    ([0.0, 1.0], (0.5, 0.0, 0.3, 2.0)),
    ([1.5, 0.8, -0.5], (-0.4, 0.9, 1.0, -0.2)),
    ([0.0, 0.6, 0.0, -0.4, 0.2, 0.1], (0.2, -0.5, -0.8, 0.6)),
    ([2.0, -1.0, 0.7], (1.0, 1.5, 0.5, -1.0)),
]


def test_criterion_07_uniqueness_round_trip():
    steps = 1024
    t0 = time.perf_counter()
    for coeffs, a in BUNDLED_PROBLEMS:
        assert abs(a[1] - a[3]) >= 0.5
        target = ReconstructionTarget(*spectra_for(coeffs, a, 16, steps))
        res = reconstruct_problem(target, basis_size=max(len(coeffs) - 1, 2), steps=steps)
        assert res.converged, (coeffs, a)
        b = res.boundary_hat
        for got, want in zip((b.a11, b.a12, b.a21, b.a22), a):
            assert got == pytest.approx(want, abs=1e-4), (coeffs, a)
        xs = np.linspace(0.0, 1.0, 201)
        qerr = max(
            abs(
                sum(c * math.cos(j * math.pi * x) for j, c in enumerate(coeffs))
                - res.potential_hat(x)
            )
            for x in xs
        )
        assert qerr <= 1e-3, (coeffs, a, qerr)
    elapsed = time.perf_counter() - t0
    assert elapsed < 600.0
    _ok(7, f"5 bundled problems recovered within tolerance in {elapsed:.0f}s")


def test_criterion_08_a21_invisibility():
    pot = Potential([1.0, 0.5])
    a_base = (0.3, -0.7, 0.6, 0.4)
    a_bump = (0.3, -0.7, 1.1, 0.4)  # a21 + 0.5
    for kind in (ProblemKind.DECOMPOSED_L1, ProblemKind.DECOMPOSED_L2):
        sp_a = enumerate_eigenvalues(ProblemSpec(pot, BoundaryMatrix(*a_base), kind), 5)
        sp_b = enumerate_eigenvalues(ProblemSpec(pot, BoundaryMatrix(*a_bump), kind), 5)
        assert sp_a.eigenvalues == sp_b.eigenvalues  # bit-identical
    sp_a = enumerate_eigenvalues(
        ProblemSpec(pot, BoundaryMatrix(*a_base), ProblemKind.FULL_L), 5
    )
    sp_b = enumerate_eigenvalues(
        ProblemSpec(pot, BoundaryMatrix(*a_bump), ProblemKind.FULL_L), 5
    )
    moved = max(abs(x - y) for x, y in zip(sp_a.eigenvalues, sp_b.eigenvalues))
    assert moved >= 1e-6
    _ok(8, f"L1/L2 spectra bit-identical under a21 change; L moved by {moved:.2e}")


def test_criterion_09_degeneracy_guard(tmp_path, capsys):
    prob = tmp_path / "degenerate.json"
    prob.write_text(json.dumps({
        "format_version": 1,
        "potential": {"coefficients": [0.0]},
        "boundary": {"a11": 0.2, "a12": 1.0, "a21": 0.0, "a22": 1.0},
    }))
    paths = []
    for kind in ("full", "l1", "l2"):
        out = tmp_path / f"{kind}.csv"
        assert main(["spectrum", str(prob), kind, "--count", "8", "--steps", "1024",
                     "--out", str(out)]) == EXIT_OK
        paths.append(str(out))
    rc = main(["invert", *paths, "--basis-size", "2", "--steps", "1024"])
    captured = capsys.readouterr()
    assert rc == EXIT_DEGENERATE
    assert "a12 != a22" in captured.err
    assert DEGENERACY_WARNING.split(":")[0] in captured.out
    _ok(9, "a12 = a22 input exits with the degeneracy code and hypothesis warning")


def test_criterion_10_cli_determinism(tmp_path, capsys):
    prob = tmp_path / "p.json"
    prob.write_text(json.dumps({
        "format_version": 1,
        "potential": {"coefficients": [1.0, -0.5]},
        "boundary": {"a11": 0.3, "a12": -0.7, "a21": 1.1, "a22": 0.4},
    }))
    # forward
    outs = []
    for _ in range(2):
        assert main(["forward", str(prob), "12.5", "--steps", "1024"]) == EXIT_OK
        outs.append(capsys.readouterr().out)
    assert outs[0] == outs[1]
    # spectrum
    csvs = [tmp_path / "s1.csv", tmp_path / "s2.csv"]
    for path in csvs:
        assert main(["spectrum", str(prob), "full", "--count", "6", "--steps", "1024",
                     "--out", str(path)]) == EXIT_OK
    assert csvs[0].read_bytes() == csvs[1].read_bytes()
    # decompose
    decs = [tmp_path / "d1.txt", tmp_path / "d2.txt"]
    for path in decs:
        assert main(["decompose", str(prob), "--samples", "100", "--steps", "1024",
                     "--out", str(path)]) == EXIT_OK
    assert decs[0].read_bytes() == decs[1].read_bytes()
    # invert
    spec_paths = []
    for kind in ("full", "l1", "l2"):
        out = tmp_path / f"{kind}.csv"
        assert main(["spectrum", str(prob), kind, "--count", "8", "--steps", "512",
                     "--out", str(out)]) == EXIT_OK
        spec_paths.append(str(out))
    inv = []
    for i in range(2):
        out = tmp_path / f"rec{i}.json"
        main(["invert", *spec_paths, "--basis-size", "2", "--steps", "512",
              "--out", str(out)])
        inv.append(out.read_bytes() + capsys.readouterr().out.encode())
    assert inv[0] == inv[1]
    _ok(10, "forward, spectrum, invert, decompose are byte-deterministic")
