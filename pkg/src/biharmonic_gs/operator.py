"""Discrete form of the constant-coefficient operator w'''' − 2a w'' + b w.

Fourth order centered stencils with zero extension:

    D4 = (δ⁴ − δ⁶/6) / h⁴,     D2 = (δ² − δ⁴/12) / h²,

where δ is the undivided central difference. The resulting 7-diagonal matrix
is symmetric positive definite for a, b > 0.
"""

from __future__ import annotations

import numpy as np

from . import kernels

_D4 = np.array([56.0, -39.0, 12.0, -1.0]) / 6.0
_D2 = np.array([-30.0, 16.0, -1.0, 0.0]) / 12.0


def _full_diff(w: np.ndarray, k: int) -> np.ndarray:
    # k-th undivided difference of the zero-extended sequence (length N + k)
    return np.diff(np.concatenate((np.zeros(k), w, np.zeros(k))), k)


class DiscreteOperator:
    """The matrix L = D4 − 2a D2 + b I on a uniform grid, with a cached factorization."""

    def __init__(self, a: float, b: float, h: float, n: int):
        if not (a > 0 and b > 0 and h > 0):
            raise ValueError("need a > 0, b > 0 and h > 0")
        self.a, self.b, self.h, self.n = float(a), float(b), float(h), int(n)
        self.stencil = _D4 / h**4 - 2.0 * a * _D2 / h**2 + np.array([b, 0.0, 0.0, 0.0])
        self._factor = None
        self._backend = None

    def apply(self, w: np.ndarray) -> np.ndarray:
        return kernels.active().apply_stencil(self.stencil, np.ascontiguousarray(w, dtype=float))

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        name = kernels.backend_name()
        if self._factor is None or self._backend != name:
            self._factor = kernels.active().factor(self.stencil, self.n)
            self._backend = name
        return self._factor.solve(np.ascontiguousarray(rhs, dtype=float))

    def quadratic_form(self, w: np.ndarray) -> float:
        """h·wᵀLw evaluated as a sum of squares of differences (no cancellation)."""
        w = np.asarray(w, dtype=float)
        h = self.h
        d1 = _full_diff(w, 1)
        d2 = _full_diff(w, 2)
        d3 = _full_diff(w, 3)
        s1, s2, s3, s0 = d1 @ d1, d2 @ d2, d3 @ d3, w @ w
        return h * ((s2 + s3 / 6.0) / h**4 + 2.0 * self.a * (s1 + s2 / 12.0) / h**2 + self.b * s0)
