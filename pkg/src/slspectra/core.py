"""Domain types and numerical propagation of the fundamental solution pair.

Everything here is about the equation -y'' + q(x) y = lam * y on [0, 1].
The potential is a finite cosine series, so it is automatically C^1 and its
half-integral u(x) = (1/2) * integral_0^x q has a closed form.  The two
fundamental solutions y1, y2 carry initial data (1, 0) and (0, 1) at x = 0;
their endpoint values at x = 1 are what the characteristic determinants need.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np
from numba import njit

# Magnitude at which the hyperbolic growth exp(sqrt(-lam)) is declared an
# overflow: exp(sqrt(2000)) ~ 2.5e19, so the guard trips near lam ~ -2000.
_OVERFLOW_LIMIT = 1e19

DEFAULT_STEPS = 2048


class NumericOverflowError(ArithmeticError):
    """Fundamental-solution propagation blew up (very negative lambda)."""

    def __init__(self, lam: float):
        self.lam = float(lam)
        super().__init__(
            f"fundamental-solution integration overflowed at lambda={lam:g}"
        )


class ProblemKind(Enum):
    FULL_L = "FullL"
    DECOMPOSED_L1 = "DecomposedL1"
    DECOMPOSED_L2 = "DecomposedL2"


@dataclass(frozen=True)
class Potential:
    """q(x) = sum_j c_j * cos(j*pi*x) with finitely many modes."""

    coefficients: tuple

    def __init__(self, coefficients):
        coeffs = tuple(float(c) for c in coefficients)
        if not coeffs:
            raise ValueError("potential needs at least one coefficient")
        if not all(math.isfinite(c) for c in coeffs):
            raise ValueError("potential coefficients must be finite")
        object.__setattr__(self, "coefficients", coeffs)

    def __call__(self, x: float) -> float:
        return evaluate_potential(self, x)

    def sup_bound(self) -> float:
        """Cheap bound on max |q|: the l1 norm of the coefficients."""
        return sum(abs(c) for c in self.coefficients)


@dataclass(frozen=True)
class BoundaryMatrix:
    """The four real constants of the boundary forms U1, U2."""

    a11: float
    a12: float
    a21: float
    a22: float

    def __post_init__(self):
        for name in ("a11", "a12", "a21", "a22"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"boundary constant {name} must be finite")
            object.__setattr__(self, name, v)

    @property
    def is_borg_separated(self) -> bool:
        """Exact inequality a12 != a22; the uniqueness theorem's hypothesis."""
        return self.a12 != self.a22


@dataclass(frozen=True)
class ProblemSpec:
    potential: Potential
    boundary: BoundaryMatrix
    kind: ProblemKind


@dataclass(frozen=True)
class FundamentalAtOne:
    """Endpoint values y1(1), y1'(1), y2(1), y2'(1) at a given lambda."""

    lam: float
    y1: float
    dy1: float
    y2: float
    dy2: float

    def wronskian_defect(self) -> float:
        # y1*y2' - y1'*y2 is constant in x and equals 1 at x = 0.
        return self.y1 * self.dy2 - self.dy1 * self.y2 - 1.0


def _check_unit_interval(x: float) -> float:
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x={x!r} outside [0, 1]")
    return x


def evaluate_potential(p: Potential, x: float) -> float:
    """q(x), summed in ascending mode order."""
    x = _check_unit_interval(x)
    total = 0.0
    for j, c in enumerate(p.coefficients):
        total += c * math.cos(j * math.pi * x)
    return total


def u_accumulated(p: Potential, x: float) -> float:
    """u(x) = (1/2) * integral_0^x q(t) dt, in closed form."""
    x = _check_unit_interval(x)
    total = p.coefficients[0] * x
    for j, c in enumerate(p.coefficients):
        if j >= 1:
            total += c * math.sin(j * math.pi * x) / (j * math.pi)
    return 0.5 * total


@lru_cache(maxsize=128)
def _q_half_grid(coefficients: tuple, steps: int) -> np.ndarray:
    """q sampled at the 2*steps+1 half-step nodes used by the RK4 stages."""
    x = np.linspace(0.0, 1.0, 2 * steps + 1)
    q = np.zeros_like(x)
    for j, c in enumerate(coefficients):
        q += c * np.cos(j * np.pi * x)
    return q


@njit(cache=True)
def _rk4_endpoints(qgrid, lams, h, out):  # pragma: no cover - compiled
    steps = (qgrid.shape[0] - 1) // 2
    for i in range(lams.shape[0]):
        lam = lams[i]
        y1 = 1.0
        p1 = 0.0
        y2 = 0.0
        p2 = 1.0
        for k in range(steps):
            qa = qgrid[2 * k] - lam
            qm = qgrid[2 * k + 1] - lam
            qb = qgrid[2 * k + 2] - lam
            # classical RK4 on y'' = (q - lam) y, both columns in lockstep
            k1y = p1
            k1p = qa * y1
            k2y = p1 + 0.5 * h * k1p
            k2p = qm * (y1 + 0.5 * h * k1y)
            k3y = p1 + 0.5 * h * k2p
            k3p = qm * (y1 + 0.5 * h * k2y)
            k4y = p1 + h * k3p
            k4p = qb * (y1 + h * k3y)
            ny1 = y1 + h * (k1y + 2.0 * k2y + 2.0 * k3y + k4y) / 6.0
            np1 = p1 + h * (k1p + 2.0 * k2p + 2.0 * k3p + k4p) / 6.0

            l1y = p2
            l1p = qa * y2
            l2y = p2 + 0.5 * h * l1p
            l2p = qm * (y2 + 0.5 * h * l1y)
            l3y = p2 + 0.5 * h * l2p
            l3p = qm * (y2 + 0.5 * h * l2y)
            l4y = p2 + h * l3p
            l4p = qb * (y2 + h * l3y)
            ny2 = y2 + h * (l1y + 2.0 * l2y + 2.0 * l3y + l4y) / 6.0
            np2 = p2 + h * (l1p + 2.0 * l2p + 2.0 * l3p + l4p) / 6.0

            y1, p1, y2, p2 = ny1, np1, ny2, np2
        out[i, 0] = y1
        out[i, 1] = p1
        out[i, 2] = y2
        out[i, 3] = p2


def fundamental_batch(p: Potential, lams, steps: int = DEFAULT_STEPS) -> np.ndarray:
    """Endpoint values for an array of lambdas; rows are (y1, dy1, y2, dy2)."""
    steps = int(steps)
    if steps < 16:
        raise ValueError("steps must be at least 16")
    lams = np.ascontiguousarray(np.asarray(lams, dtype=np.float64).ravel())
    qgrid = _q_half_grid(p.coefficients, steps)
    out = np.empty((lams.shape[0], 4))
    _rk4_endpoints(qgrid, lams, 1.0 / steps, out)
    bad = ~np.isfinite(out).all(axis=1) | (np.abs(out).max(axis=1) > _OVERFLOW_LIMIT)
    if bad.any():
        raise NumericOverflowError(lams[np.argmax(bad)])
    return out


def integrate_fundamental(
    p: Potential, lam: float, steps: int = DEFAULT_STEPS
) -> FundamentalAtOne:
    """Propagate both initial-value problems from x=0 to x=1 with fixed-step RK4."""
    row = fundamental_batch(p, [lam], steps)[0]
    return FundamentalAtOne(float(lam), row[0], row[1], row[2], row[3])


def asymptotic_fundamental(u1: float, s: float) -> FundamentalAtOne:
    """Leading-order large-s model of the fundamental system at x = 1.

    s is the frequency sqrt(lambda); u1 = u(1).  The y1' leading term is
    -s*sin(s), the derivative of cos(s*x) at x=1 (not +s*sin(s)).
    """
    s = float(s)
    if s <= 0.0:
        raise ValueError("asymptotic model requires s > 0")
    u1 = float(u1)
    sin_s = math.sin(s)
    cos_s = math.cos(s)
    return FundamentalAtOne(
        lam=s * s,
        y1=cos_s + (u1 / s) * sin_s,
        dy1=-s * sin_s + u1 * cos_s,
        y2=sin_s / s - (u1 / (s * s)) * cos_s,
        dy2=cos_s + (u1 / s) * sin_s,
    )
