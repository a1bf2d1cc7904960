"""Closed-form predictions for sparse G(n, c/n) that simulations are checked against."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

__all__ = [
    "GiantPrediction",
    "CycleExpectation",
    "giant_fixed_point",
    "predicted_giant",
    "series_identity_check",
    "expected_short_cycles",
]


@dataclass(frozen=True)
class GiantPrediction:
    """Giant component of G(n, c/n): fraction ``x`` of vertices, ``x n``
    vertices and ``c n (2x - x^2) / 2`` edges."""

    c: float
    n: int
    x: float

    @property
    def vertex_fraction(self) -> float:
        return self.x

    @property
    def vertices(self) -> float:
        return self.x * self.n

    @property
    def edges(self) -> float:
        return self.c * self.n * (2 * self.x - self.x ** 2) / 2


class CycleExpectation(NamedTuple):
    refined: float
    upper_bound: float


def giant_fixed_point(c: float, tol: float = 1e-12) -> float:
    """Root in (0, 1) of ``x = 1 - exp(-c x)``; 0 when ``c <= 1``.

    Bisection on ``f(x) = 1 - exp(-c x) - x``, which is positive left of the
    root and negative right of it, until the bracket is narrower than ``tol``.
    """
    if not c > 0:
        raise ValueError(f"c must be > 0, got {c}")
    if not tol > 0:
        raise ValueError(f"tol must be > 0, got {tol}")
    if c <= 1:
        return 0.0

    def f(x):
        return -math.expm1(-c * x) - x

    lo, hi = tol, 1.0 - tol
    if f(lo) <= 0:
        # root lies below tol
        return tol / 2
    if f(hi) >= 0:
        hi = 1.0
    while hi - lo >= tol:
        mid = (lo + hi) / 2
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def predicted_giant(n: int, c: float, tol: float = 1e-12) -> GiantPrediction:
    if not c > 1:
        raise ValueError(f"the giant component needs c > 1, got {c}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return GiantPrediction(c=c, n=n, x=giant_fixed_point(c, tol))


def series_identity_check(x: float) -> float:
    """Residual of ``-ln(1 - x) / x = sum_k x^k / (k + 1)``.

    The partial sum stops once the tail bound ``x^(K+1) / ((K+2)(1-x))``
    drops below ``1e-12``.
    """
    if not 0 < x < 1:
        raise ValueError(f"x must lie in (0, 1), got {x}")
    terms = []
    k = 0
    while True:
        terms.append(x ** k / (k + 1))
        if x ** (k + 1) / ((k + 2) * (1 - x)) < 1e-12:
            break
        k += 1
    return abs(-math.log1p(-x) / x - math.fsum(terms))


def expected_short_cycles(n: int, c: float, g0: int) -> CycleExpectation:
    """Expected number of cycles of length ``3..g0`` in G(n, c/n).

    ``refined`` is the limiting mean ``sum c^k / (2k)``; ``upper_bound`` is the
    cruder bound ``g0 c^g0``. ``n`` only enters through the regime
    (the limit is independent of it).
    """
    if g0 < 3:
        raise ValueError(f"g0 must be >= 3, got {g0}")
    if not c > 0:
        raise ValueError(f"c must be > 0, got {c}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    refined = math.fsum(c ** k / (2 * k) for k in range(3, g0 + 1))
    return CycleExpectation(refined, g0 * c ** g0)
