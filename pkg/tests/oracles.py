"""Independent reference computations used only by the tests.

Nothing here imports the package's discretization: the spectral solver uses
FFTs on a periodic box, the closed forms are textbook formulas, and the
quadratures call scipy.integrate directly.
"""

import math

import numpy as np
from scipy import integrate, optimize, special


def constants(n, lam):
    mu = n * (n - 4) / 4.0
    nu = (n - 4) ** 2 / 4.0
    Lam = n * n / 4.0
    a = (2 * (mu + 2) - lam) / 2.0
    b = (Lam - lam) * nu
    omega = 2.0 * math.pi ** (n / 2) / math.gamma(n / 2)
    return mu, nu, a, b, omega


def spectral_ground_state(n, q, lam, half_width=40.0, points=2**13, iters=400):
    """Inverse iteration with the exact symbol k⁴ + 2a k² + b on a periodic box.

    Returns (s_rad, u0, u1, u2) with ω ∫|w|^q = 1.
    """
    mu, nu, a, b, omega = constants(n, lam)
    L = 2.0 * half_width
    h = L / points
    t = -half_width + h * np.arange(points)
    k = 2.0 * np.pi * np.fft.fftfreq(points, h)
    symbol = k**4 + 2.0 * a * k**2 + b
    w = np.exp(-(t**2))
    for _ in range(iters):
        g = np.abs(w) ** (q - 2) * w
        w = np.real(np.fft.ifft(np.fft.fft(g) / symbol))
        w /= (omega * h * np.sum(np.abs(w) ** q)) ** (1.0 / q)
        w = np.roll(w, points // 2 - int(np.argmax(np.abs(w))))
    what = np.fft.fft(w)
    # Parseval: h Σ |w|² = (h / N) Σ |ŵ|²
    def norm(mult):
        return h / points * float(np.sum(mult * np.abs(what) ** 2))
    i0, i1, i2 = norm(1.0), norm(k**2), norm(k**4)
    u0 = omega * i0
    u1 = omega * (i1 + nu * i0)
    u2 = omega * (i2 + 2 * (mu + 2) * i1 + mu**2 * i0)
    return u2 - lam * u1, u0, u1, u2


def sobolev_constant(n):
    """Best constant of ∫|Δu|² ≥ S (∫|u|^(2n/(n−4)))^((n−4)/n) on ℝⁿ."""
    return (
        math.pi**2
        * (n + 2)
        * n
        * (n - 2)
        * (n - 4)
        * (math.gamma(n / 2) / math.gamma(n)) ** (4.0 / n)
    )


def q_threshold_root(n):
    """Root in (2, ∞) of (3q+2)/(q(q−2)) = (n−4)²/(n−1)."""
    c = (n - 4) ** 2 / (n - 1)
    return optimize.brentq(lambda q: (3 * q + 2) - c * q * (q - 2), 2.0 + 1e-12, 1e6, xtol=1e-15, rtol=1e-15)


def spherical_mean_quad(r, s, n):
    num = integrate.quad(
        lambda th: math.sin(th) ** (n - 2) / (r * r + s * s - 2 * r * s * math.cos(th)),
        0.0,
        math.pi,
        epsabs=0,
        epsrel=1e-13,
        limit=400,
    )[0]
    den = math.sqrt(math.pi) * math.gamma((n - 1) / 2) / math.gamma(n / 2)
    return num / den


def bubble_grad_sq(n, r):
    k = (n - 4) / 2.0
    return (2 * k * r * (1 + r * r) ** (-k - 1)) ** 2


def bubble_integrals(n):
    """U₂ = ∫|ΔU|², U₁ = ∫|x|⁻²|∇U|² and ∫U^(2**) for U = (1+r²)^((4−n)/2), by scipy.quad."""
    k = (n - 4) / 2.0
    omega = constants(n, 0)[4]
    qc = 2 * n / (n - 4)

    def lap(r):
        # U'' + (n−1)/r U'
        s = 1 + r * r
        d1 = -2 * k * r * s ** (-k - 1)
        d2 = -2 * k * s ** (-k - 1) + 4 * k * (k + 1) * r * r * s ** (-k - 2)
        return d2 + (n - 1) / r * d1

    def q(f):
        return omega * (
            integrate.quad(f, 0, 1, epsabs=0, epsrel=1e-13, limit=400)[0]
            + integrate.quad(f, 1, np.inf, epsabs=0, epsrel=1e-13, limit=400)[0]
        )

    u2 = q(lambda r: lap(r) ** 2 * r ** (n - 1))
    u1 = q(lambda r: bubble_grad_sq(n, r) * r ** (n - 3))
    lq = q(lambda r: (1 + r * r) ** (-k * qc) * r ** (n - 1))
    return u2, u1, lq


def shifted_hardy_quad(n, y):
    """ω ∫|∇U|²(r) M(r, y) r^(n−1) dr with M by an inner quadrature."""
    omega = constants(n, 0)[4]
    f = lambda r: bubble_grad_sq(n, r) * spherical_mean_quad(r, y, n) * r ** (n - 1)
    parts = [(0, y / 2), (y / 2, y), (y, 2 * y), (2 * y, np.inf)]
    return omega * sum(
        integrate.quad(f, a, b, epsabs=0, epsrel=1e-11, limit=400)[0] for a, b in parts
    )
