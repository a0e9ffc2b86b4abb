"""numpy/scipy implementations of the kernels in ``_ckernels.pyx``."""

import numpy as np
from scipy.linalg import cho_solve_banded, cholesky_banded


class BandedFactor:
    """Banded Cholesky factor of a symmetric 7-diagonal Toeplitz matrix."""

    def __init__(self, c, n):
        c = np.asarray(c, dtype=float)
        if c.shape != (4,):
            raise ValueError("half-stencil must have 4 entries")
        if n < 4:
            raise ValueError("need at least 4 nodes")
        self.n = int(n)
        ab = np.zeros((4, self.n))
        for k in range(4):
            ab[3 - k, k:] = c[k]
        self._cb = cholesky_banded(ab, lower=False)

    def solve(self, rhs):
        rhs = np.asarray(rhs, dtype=float)
        if rhs.shape != (self.n,):
            raise ValueError("size mismatch")
        return cho_solve_banded((self._cb, False), rhs)


def factor(c, n):
    return BandedFactor(c, n)


def apply_stencil(c, w):
    c = np.asarray(c, dtype=float)
    full = np.concatenate((c[:0:-1], c))
    w = np.asarray(w, dtype=float)
    m = c.size - 1
    # slice the full convolution: mode="same" misbehaves when the kernel is longer than w
    return np.convolve(w, full)[m : m + w.size]


def odd_power(w, q):
    w = np.asarray(w, dtype=float)
    a = np.abs(w)
    p = a ** (q - 1.0)
    return np.copysign(p, w) * (a > 0), float(np.sum(p * a))
