"""Reconstruction of (q, a11, a12, a21, a22) from the three spectra.

The pipeline mirrors the uniqueness proof: a Borg-style two-spectra stage fits
the potential, the left Robin constant and the two right Robin constants to
the spectra of the decomposed problems; the spectrum of the full problem then
pins down a21, which the decomposed problems cannot see at all; a final joint
least-squares polish runs against all three spectra at once.

basis_decompose is the numerical replay of the linear-independence argument:
projecting determinant samples onto {1, cos s, sin s, s*sin s, cos 2s}
recovers the expansion coefficients, so the constant term of the difference of
two determinants sharing (q, a11, a12, a22) isolates the a21 difference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from .core import DEFAULT_STEPS, BoundaryMatrix, Potential, ProblemKind, ProblemSpec
from .spectrum import IncompleteSpectrumError, Spectrum, enumerate_eigenvalues

DEGENERACY_EPSILON = 1e-6
DEGENERACY_WARNING = (
    "auxiliary problems are (near-)identical: a12 ~ a22 violates the "
    "separation hypothesis a12 != a22, so the two-spectra data collapse"
)
_PENALTY = 1e6


class ConditioningError(RuntimeError):
    """Design matrix of the basis projection is numerically singular."""


@dataclass(frozen=True)
class ReconstructionTarget:
    spectrum_l: Spectrum
    spectrum_l1: Spectrum
    spectrum_l2: Spectrum

    def __post_init__(self):
        counts = {
            self.spectrum_l.count,
            self.spectrum_l1.count,
            self.spectrum_l2.count,
        }
        if len(counts) != 1:
            raise ValueError("all three spectra must share the same truncation N")

    @property
    def n(self) -> int:
        return self.spectrum_l.count


@dataclass(frozen=True)
class BorgStageResult:
    potential_hat: Potential
    a11: float
    beta1: float  # right Robin constant of L1, identified with a22
    beta2: float  # right Robin constant of L2, identified with a12
    misfit: float
    iterations: int
    converged: bool
    warnings: tuple = ()


@dataclass(frozen=True)
class ReconstructionResult:
    potential_hat: Potential
    boundary_hat: BoundaryMatrix
    misfit: float
    iterations: int
    converged: bool
    warnings: tuple = ()


@dataclass(frozen=True)
class BasisCoefficients:
    c_const: float
    c_cos: float
    c_sin: float
    c_s_sin: float
    c_cos2: float
    residual_norm: float


def basis_decompose(samples) -> BasisCoefficients:
    """Least-squares projection onto {1, cos s, sin s, s*sin s, cos 2s}.

    Applied to determinant samples in the large-s regime the constant
    coefficient equals a12 - a21 and the cos coefficient a11 - a22 - u(1),
    each up to O(1/S) over a window starting at S.
    """
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("samples must be (s, value) pairs")
    if arr.shape[0] < 25:
        raise ValueError("need at least 25 samples")
    s = arr[:, 0]
    v = arr[:, 1]
    design = np.column_stack(
        [np.ones_like(s), np.cos(s), np.sin(s), s * np.sin(s), np.cos(2.0 * s)]
    )
    cond = np.linalg.cond(design)
    if not np.isfinite(cond) or cond > 1e8:
        raise ConditioningError(
            f"basis design matrix ill-conditioned (cond={cond:.3g}); "
            "spread the samples over a wider s window"
        )
    coef, *_ = np.linalg.lstsq(design, v, rcond=None)
    residual_norm = float(np.linalg.norm(design @ coef - v))
    return BasisCoefficients(*(float(c) for c in coef), residual_norm)


def _central_jacobian(fun, x0, f0, rel_step=1e-6):
    jac = np.empty((f0.size, x0.size))
    for i in range(x0.size):
        h = rel_step * max(1.0, abs(x0[i]))
        xp = x0.copy()
        xm = x0.copy()
        xp[i] += h
        xm[i] -= h
        jac[:, i] = (fun(xp) - fun(xm)) / (2.0 * h)
    return jac


def _safe_spectrum(pot, bnd, kind, n, steps):
    try:
        sp = enumerate_eigenvalues(
            ProblemSpec(pot, bnd, kind), n, steps=steps
        )
        return np.array(sp.eigenvalues)
    except (IncompleteSpectrumError, ArithmeticError, ValueError):
        return None


def _decomposed_eigs(coeffs, a11, beta1, beta2, n, steps):
    pot = Potential(coeffs)
    e1 = _safe_spectrum(
        pot, BoundaryMatrix(a11, 0.0, 0.0, beta1), ProblemKind.DECOMPOSED_L1, n, steps
    )
    e2 = _safe_spectrum(
        pot, BoundaryMatrix(a11, beta2, 0.0, 0.0), ProblemKind.DECOMPOSED_L2, n, steps
    )
    return e1, e2


def _seed_from_offsets(targets, n):
    """Mean and per-index offsets of lambda_k - (k*pi)^2, skipping the low modes."""
    k = np.arange(n)
    offs = targets - (k * math.pi) ** 2
    lo = min(2, n - 1)
    return float(np.mean(offs[lo:])), offs


def borg_reconstruct(
    sp1: Spectrum,
    sp2: Spectrum,
    basis_size: int,
    steps: int = DEFAULT_STEPS,
    rho: float = 1e-8,
    degeneracy_epsilon: float = DEGENERACY_EPSILON,
    max_nfev: int = 60,
) -> BorgStageResult:
    """Two-spectra stage: fit (c_0..c_m, a11, beta1, beta2) to the L1/L2 spectra."""
    basis_size = int(basis_size)
    if sp1.count != sp2.count:
        raise ValueError("the two spectra must share the same truncation")
    n = sp1.count
    if n < basis_size + 3:
        raise ValueError("need N >= basis_size + 3 eigenvalues")
    if sp1.kind is not ProblemKind.DECOMPOSED_L1:
        raise ValueError("sp1 must come from the first decomposed problem")
    if sp2.kind is not ProblemKind.DECOMPOSED_L2:
        raise ValueError("sp2 must come from the second decomposed problem")

    t1 = np.array(sp1.eigenvalues)
    t2 = np.array(sp2.eigenvalues)
    ncoef = basis_size + 1
    ridge = math.sqrt(rho) * np.arange(ncoef)

    if float(np.max(np.abs(t1 - t2))) < 1e-9:
        # identical auxiliary spectra: the separation hypothesis fails outright
        m1, _ = _seed_from_offsets(t1, n)
        pot = Potential([0.0] * ncoef)
        return BorgStageResult(
            pot, 0.0, m1 / 2.0, m1 / 2.0, float(np.sum((t1 - t2) ** 2)),
            0, False, (DEGENERACY_WARNING,),
        )

    # seeds from the first-order eigenvalue asymptotics
    # lambda_{k,i} ~ (k*pi)^2 + c0 + c_{2k}/2 + 2*(beta_i + a11)... gauged with
    # a11 = 0, c0 = 0 (only the combinations are visible at this order)
    m1, offs1 = _seed_from_offsets(t1, n)
    m2, offs2 = _seed_from_offsets(t2, n)
    coeffs0 = np.zeros(ncoef)
    for k in range(1, n):
        if 2 * k < ncoef:
            coeffs0[2 * k] = float(offs1[k] - m1 + offs2[k] - m2)
    x0 = np.concatenate([coeffs0, [0.0, m1 / 2.0, m2 / 2.0]])

    def residuals(x):
        coeffs = x[:ncoef]
        a11, b1, b2 = x[ncoef], x[ncoef + 1], x[ncoef + 2]
        e1, e2 = _decomposed_eigs(coeffs, a11, b1, b2, n, steps)
        if e1 is None or e2 is None:
            return np.full(2 * n + ncoef, _PENALTY)
        return np.concatenate([e1 - t1, e2 - t2, ridge * coeffs])

    res = least_squares(
        residuals,
        x0,
        jac=lambda x: _central_jacobian(residuals, x, residuals(x)),
        method="lm",
        xtol=1e-12,
        ftol=1e-14,
        gtol=1e-14,
        max_nfev=max_nfev,
    )
    coeffs = res.x[:ncoef]
    a11, b1, b2 = res.x[ncoef], res.x[ncoef + 1], res.x[ncoef + 2]
    eig_res = res.fun[: 2 * n]
    misfit = float(np.dot(eig_res, eig_res))
    warnings = []
    if abs(b1 - b2) < degeneracy_epsilon:
        warnings.append(DEGENERACY_WARNING)
    converged = bool(res.status > 0) and misfit <= 1e-8 * n and not warnings
    return BorgStageResult(
        Potential(coeffs), float(a11), float(b1), float(b2),
        misfit, int(res.njev), converged, tuple(warnings),
    )


def _golden_minimize(f, lo, hi, tol):
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return (a, c, b) if fc < fd else (c, d, b)


def recover_a21(
    sp_l: Spectrum,
    potential_hat: Potential,
    a11: float,
    a12: float,
    a22: float,
    steps: int = DEFAULT_STEPS,
    tol: float = 1e-8,
) -> float:
    """Extract a21 from the full-problem spectrum with the other parameters fixed.

    Golden-section bracketing of the eigenvalue misfit followed by one local
    quadratic refinement.  The initial bracket center comes from the
    alternating part of lambda_k - (k*pi)^2, whose amplitude is 2*(a12 - a21)
    in the determinant's large-s expansion.
    """
    if sp_l.count < 3:
        raise ValueError("need at least 3 full-problem eigenvalues")
    if sp_l.kind is not ProblemKind.FULL_L:
        raise ValueError("sp_l must come from the full problem")
    t = np.array(sp_l.eigenvalues)
    n = t.size

    def misfit(a21):
        bnd = BoundaryMatrix(a11, a12, a21, a22)
        eigs = _safe_spectrum(potential_hat, bnd, ProblemKind.FULL_L, n, steps)
        if eigs is None:
            return 1e12 * (1.0 + abs(a21))
        return float(np.sum((eigs - t) ** 2))

    m, offs = _seed_from_offsets(t, n)
    lo_k = min(2, n - 1)
    signs = np.array([(-1.0) ** k for k in range(lo_k, n)])
    alt = float(np.mean(signs * (offs[lo_k:] - m)))
    guess = a12 + alt / 2.0

    half = 4.0
    for attempt in range(2):
        lo, hi = guess - half, guess + half
        grid = np.linspace(lo, hi, 9)
        vals = [misfit(g) for g in grid]
        imin = int(np.argmin(vals))
        if 0 < imin < len(grid) - 1:
            lo, hi = grid[imin - 1], grid[imin + 1]
            break
        half *= 3.0
    else:
        trace = ", ".join(f"({g:.4g}, {v:.4g})" for g, v in zip(grid, vals))
        raise RuntimeError(
            f"misfit not unimodal around the a21 bracket; scan trace: {trace}"
        )

    a, b, c = _golden_minimize(misfit, lo, hi, tol)
    # quadratic refinement through three points around the minimum
    fa, fb, fc = misfit(a), misfit(b), misfit(c)
    denom = (b - a) * (fb - fc) - (b - c) * (fb - fa)
    if abs(denom) > 0.0:
        vertex = b - 0.5 * ((b - a) ** 2 * (fb - fc) - (b - c) ** 2 * (fb - fa)) / denom
        if a <= vertex <= c and misfit(vertex) <= fb:
            return float(vertex)
    return float(b)


def joint_refine(
    target: ReconstructionTarget,
    potential_init: Potential,
    boundary_init: BoundaryMatrix,
    steps: int = DEFAULT_STEPS,
    rho: float = 1e-8,
    convergence_threshold: float = 1e-8,
    degeneracy_epsilon: float = DEGENERACY_EPSILON,
    max_nfev: int = 40,
) -> ReconstructionResult:
    """Polish every parameter against all three spectra; never worsens the misfit."""
    n = target.n
    tl = np.array(target.spectrum_l.eigenvalues)
    t1 = np.array(target.spectrum_l1.eigenvalues)
    t2 = np.array(target.spectrum_l2.eigenvalues)
    ncoef = len(potential_init.coefficients)
    ridge = math.sqrt(rho) * np.arange(ncoef)
    b0 = boundary_init
    x0 = np.concatenate(
        [potential_init.coefficients, [b0.a11, b0.a12, b0.a21, b0.a22]]
    )

    def eig_residuals(x):
        coeffs = x[:ncoef]
        a11, a12, a21, a22 = x[ncoef:]
        pot = Potential(coeffs)
        el = _safe_spectrum(
            pot, BoundaryMatrix(a11, a12, a21, a22), ProblemKind.FULL_L, n, steps
        )
        e1, e2 = _decomposed_eigs(coeffs, a11, a22, a12, n, steps)
        if el is None or e1 is None or e2 is None:
            return None
        return np.concatenate([el - tl, e1 - t1, e2 - t2])

    def residuals(x):
        r = eig_residuals(x)
        if r is None:
            return np.full(3 * n + ncoef, _PENALTY)
        return np.concatenate([r, ridge * x[:ncoef]])

    r0 = eig_residuals(x0)
    misfit0 = float(np.dot(r0, r0)) if r0 is not None else math.inf

    res = least_squares(
        residuals,
        x0,
        jac=lambda x: _central_jacobian(residuals, x, residuals(x)),
        method="lm",
        xtol=1e-12,
        ftol=1e-14,
        gtol=1e-14,
        max_nfev=max_nfev,
    )
    eig_res = res.fun[: 3 * n]
    misfit = float(np.dot(eig_res, eig_res))
    if misfit <= misfit0:
        x, iterations = res.x, int(res.njev)
    else:
        x, misfit, iterations = x0, misfit0, 0

    pot = Potential(x[:ncoef])
    bnd = BoundaryMatrix(*x[ncoef:])
    warnings = []
    if abs(bnd.a12 - bnd.a22) < degeneracy_epsilon:
        warnings.append(DEGENERACY_WARNING)
    converged = misfit <= convergence_threshold and not warnings
    return ReconstructionResult(pot, bnd, misfit, iterations, converged, tuple(warnings))


def reconstruct_problem(
    target: ReconstructionTarget,
    basis_size: int,
    steps: int = DEFAULT_STEPS,
    rho: float = 1e-8,
    degeneracy_epsilon: float = DEGENERACY_EPSILON,
) -> ReconstructionResult:
    """Full pipeline: Borg two-spectra stage, a21 extraction, joint polish."""
    stage1 = borg_reconstruct(
        target.spectrum_l1,
        target.spectrum_l2,
        basis_size,
        steps=steps,
        rho=rho,
        degeneracy_epsilon=degeneracy_epsilon,
    )
    boundary = BoundaryMatrix(stage1.a11, stage1.beta2, 0.0, stage1.beta1)
    if DEGENERACY_WARNING in stage1.warnings:
        return ReconstructionResult(
            stage1.potential_hat, boundary, stage1.misfit,
            stage1.iterations, False, stage1.warnings,
        )
    a21 = recover_a21(
        target.spectrum_l,
        stage1.potential_hat,
        stage1.a11,
        stage1.beta2,
        stage1.beta1,
        steps=steps,
    )
    boundary = BoundaryMatrix(stage1.a11, stage1.beta2, a21, stage1.beta1)
    result = joint_refine(
        target,
        stage1.potential_hat,
        boundary,
        steps=steps,
        rho=rho,
        degeneracy_epsilon=degeneracy_epsilon,
    )
    extra = tuple(w for w in stage1.warnings if w not in result.warnings)
    if extra:
        result = ReconstructionResult(
            result.potential_hat, result.boundary_hat, result.misfit,
            result.iterations, result.converged, result.warnings + extra,
        )
    return result
