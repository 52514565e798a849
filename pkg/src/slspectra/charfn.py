"""Characteristic determinants of the full and decomposed problems.

The eigenvalues of each problem are the zeros of a 2x2 determinant of the
boundary forms applied to the fundamental solutions.  For the full problem

    Delta = (a11 + a12*y1) * (dy2 + a22*y2) - (1 + a12*y2) * (dy1 + a21 + a22*y1)

with all values taken at x = 1.  The decomposed problems keep the left Robin
form y'(0) + a11*y(0) and a single right Robin constant beta (a22 for the
first, a12 for the second):

    Delta_dec = a11 * (dy2 + beta*y2) - (dy1 + beta*y1)

The large-s expansion of the full determinant, with s = sqrt(lambda), is

    Delta(s^2) = s*sin(s) + (a11 - a22 - u(1))*cos(s) + a12 - a21 + O(1/s)

For q = 0 this is exact up to the term det(a)*sin(s)/s, which is O(1/s).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import (
    BoundaryMatrix,
    FundamentalAtOne,
    ProblemKind,
    ProblemSpec,
    fundamental_batch,
)


@dataclass(frozen=True)
class DetSample:
    """One determinant evaluation; s is absent for negative lambda."""

    lam: float
    value: float
    s: Optional[float] = None

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError("determinant sample must be finite")
        if self.s is not None and not math.isclose(
            self.lam, self.s * self.s, rel_tol=1e-12, abs_tol=1e-12
        ):
            raise ValueError("lambda must equal s^2 when s is present")


def _right_constant(spec: ProblemSpec) -> float:
    if spec.kind is ProblemKind.DECOMPOSED_L1:
        return spec.boundary.a22
    if spec.kind is ProblemKind.DECOMPOSED_L2:
        return spec.boundary.a12
    raise ValueError(f"no single right constant for kind {spec.kind}")


def char_det_full(spec: ProblemSpec, fund: FundamentalAtOne) -> float:
    """Determinant of the non-separated problem L."""
    if spec.kind is not ProblemKind.FULL_L:
        raise ValueError("char_det_full requires kind FullL")
    b = spec.boundary
    u1y1 = b.a11 + b.a12 * fund.y1
    u1y2 = 1.0 + b.a12 * fund.y2
    u2y1 = fund.dy1 + b.a21 + b.a22 * fund.y1
    u2y2 = fund.dy2 + b.a22 * fund.y2
    return u1y1 * u2y2 - u1y2 * u2y1


def char_det_decomposed(spec: ProblemSpec, fund: FundamentalAtOne) -> float:
    """Determinant of a decomposed problem (L1 or L2)."""
    beta = _right_constant(spec)
    a11 = spec.boundary.a11
    return a11 * (fund.dy2 + beta * fund.y2) - (fund.dy1 + beta * fund.y1)


def char_det(spec: ProblemSpec, fund: FundamentalAtOne) -> float:
    if spec.kind is ProblemKind.FULL_L:
        return char_det_full(spec, fund)
    return char_det_decomposed(spec, fund)


def det_batch(spec: ProblemSpec, lams, steps: int) -> np.ndarray:
    """Determinant values over an array of lambdas, one RK4 sweep."""
    f = fundamental_batch(spec.potential, lams, steps)
    y1, dy1, y2, dy2 = f[:, 0], f[:, 1], f[:, 2], f[:, 3]
    b = spec.boundary
    if spec.kind is ProblemKind.FULL_L:
        return (b.a11 + b.a12 * y1) * (dy2 + b.a22 * y2) - (1.0 + b.a12 * y2) * (
            dy1 + b.a21 + b.a22 * y1
        )
    beta = _right_constant(spec)
    return b.a11 * (dy2 + beta * y2) - (dy1 + beta * y1)


def asymptotic_det(bm: BoundaryMatrix, u1: float, s: float) -> float:
    """Leading terms of Delta(s^2) for large s.

    Derived by substituting the large-s fundamental-solution models into the
    exact bilinear determinant: s*sin s dominates, the cos s coefficient is
    a11 - a22 - u(1), and the constant term is a12 - a21.
    """
    s = float(s)
    if s <= 0.0:
        raise ValueError("asymptotic determinant requires s > 0")
    return (
        s * math.sin(s)
        + (bm.a11 - bm.a22 - float(u1)) * math.cos(s)
        + bm.a12
        - bm.a21
    )
