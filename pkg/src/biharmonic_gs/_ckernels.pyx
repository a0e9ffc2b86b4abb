# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels for the banded fourth order operator.

The operator is a symmetric Toeplitz matrix with half-bandwidth 3, given by
its half-stencil ``c = (c0, c1, c2, c3)`` and truncated to ``n`` nodes (zero
extension outside the grid).
"""
import numpy as np

from libc.math cimport fabs, pow


cdef class BandedFactor:
    """LDL^T factor of a symmetric 7-diagonal Toeplitz matrix."""

    cdef double[::1] d
    cdef double[:, ::1] lo
    cdef readonly Py_ssize_t n

    def __init__(self, const double[::1] c, Py_ssize_t n):
        cdef Py_ssize_t i, j, k, m
        cdef double s
        if c.shape[0] != 4:
            raise ValueError("half-stencil must have 4 entries")
        if n < 4:
            raise ValueError("need at least 4 nodes")
        self.n = n
        d_arr = np.zeros(n)
        lo_arr = np.zeros((3, n))
        self.d = d_arr
        self.lo = lo_arr
        cdef double[::1] d = self.d
        cdef double[:, ::1] lo = self.lo
        with nogil:
            for j in range(n):
                s = c[0]
                for k in range(1, 4):
                    if j - k >= 0:
                        s -= lo[k - 1, j - k] * lo[k - 1, j - k] * d[j - k]
                d[j] = s
                for k in range(1, 4):
                    i = j + k
                    if i >= n:
                        break
                    s = c[k]
                    # sum over m < j with both L[i, m] and L[j, m] inside the band
                    for m in range(i - 3, j):
                        if m >= 0:
                            s -= lo[i - m - 1, m] * lo[j - m - 1, m] * d[m]
                    lo[k - 1, j] = s / d[j]
        if np.min(d_arr) <= 0.0:
            raise np.linalg.LinAlgError("operator is not positive definite")

    def solve(self, const double[::1] rhs):
        cdef Py_ssize_t n = self.n
        cdef Py_ssize_t i, k
        cdef double s
        if rhs.shape[0] != n:
            raise ValueError("size mismatch")
        out = np.empty(n)
        cdef double[::1] x = out
        cdef double[::1] d = self.d
        cdef double[:, ::1] lo = self.lo
        with nogil:
            for i in range(n):
                s = rhs[i]
                for k in range(1, 4):
                    if i - k >= 0:
                        s -= lo[k - 1, i - k] * x[i - k]
                x[i] = s
            for i in range(n):
                x[i] /= d[i]
            for i in range(n - 1, -1, -1):
                s = x[i]
                for k in range(1, 4):
                    if i + k < n:
                        s -= lo[k - 1, i] * x[i + k]
                x[i] = s
        return out


def factor(const double[::1] c, Py_ssize_t n):
    return BandedFactor(c, n)


def apply_stencil(const double[::1] c, const double[::1] w):
    """Apply the symmetric half-stencil ``c`` to ``w`` with zero extension."""
    cdef Py_ssize_t n = w.shape[0]
    cdef Py_ssize_t i, k, nk = c.shape[0]
    cdef Py_ssize_t m = nk - 1
    cdef double s
    out = np.empty(n)
    cdef double[::1] o = out
    with nogil:
        for i in range(n):
            if i == m and n > 2 * m:
                break
            s = c[0] * w[i]
            for k in range(1, nk):
                if i - k >= 0:
                    s += c[k] * w[i - k]
                if i + k < n:
                    s += c[k] * w[i + k]
            o[i] = s
        if n > 2 * m:
            if nk == 4:
                for i in range(m, n - m):
                    o[i] = (c[0] * w[i] + c[1] * (w[i - 1] + w[i + 1])
                            + c[2] * (w[i - 2] + w[i + 2]) + c[3] * (w[i - 3] + w[i + 3]))
            else:
                for i in range(m, n - m):
                    s = c[0] * w[i]
                    for k in range(1, nk):
                        s += c[k] * (w[i - k] + w[i + k])
                    o[i] = s
            for i in range(n - m, n):
                s = c[0] * w[i]
                for k in range(1, nk):
                    if i - k >= 0:
                        s += c[k] * w[i - k]
                    if i + k < n:
                        s += c[k] * w[i + k]
                o[i] = s
    return out


def odd_power(const double[::1] w, double q):
    """Return ``(sign(w)|w|^(q-1), sum |w|^q)`` in one pass."""
    cdef Py_ssize_t n = w.shape[0]
    cdef Py_ssize_t i
    cdef double a, p, total = 0.0
    out = np.empty(n)
    cdef double[::1] g = out
    with nogil:
        for i in range(n):
            a = fabs(w[i])
            if a == 0.0:
                g[i] = 0.0
                continue
            p = pow(a, q - 1.0)
            total += p * a
            g[i] = p if w[i] > 0.0 else -p
    return out, total
