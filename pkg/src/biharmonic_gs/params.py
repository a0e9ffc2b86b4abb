"""Dimensional constants, admissibility checks and closed-form values.

All constants refer to the fourth order problem

    Δ²u + λ div(|x|⁻² ∇u) = |x|^(-β) |u|^(q-2) u   on ℝⁿ,  β = n − q(n−4)/2,

and to its one-dimensional Emden–Fowler reduction with coefficients
``2a = 2(μ+2) − λ`` and ``b = (Λ − λ)ν``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DimensionTooSmall, ExponentOutOfRange, LambdaOutOfRange

__all__ = [
    "ProblemParams",
    "make_params",
    "s2_closed_form",
    "q_threshold",
    "bs_condition",
    "sphere_area",
]


def sphere_area(n: int) -> float:
    """Surface measure of the unit sphere in ℝⁿ, 2π^(n/2)/Γ(n/2)."""
    return math.exp(math.log(2.0) + 0.5 * n * math.log(math.pi) - math.lgamma(0.5 * n))


@dataclass(frozen=True)
class ProblemParams:
    """The triple (n, q, λ) with every derived constant precomputed."""

    n: int
    q: float
    lam: float
    mu: float
    nu: float
    lambda_max: float
    beta: float
    q_crit: float
    omega_n: float
    a_coeff: float
    b_coeff: float

    @property
    def is_critical(self) -> bool:
        """True for q = 2** (β = 0), where attainment depends on the sign of λ."""
        return math.isclose(self.q, self.q_crit, rel_tol=0.0, abs_tol=1e-14 * self.q_crit)

    def with_lambda(self, lam: float) -> "ProblemParams":
        return make_params(self.n, self.q, lam)

    def with_q(self, q: float) -> "ProblemParams":
        return make_params(self.n, q, self.lam)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "q": self.q,
            "lambda": self.lam,
            "mu": self.mu,
            "nu": self.nu,
            "lambda_max": self.lambda_max,
            "beta": self.beta,
            "q_crit": self.q_crit,
            "omega_n": self.omega_n,
            "a_coeff": self.a_coeff,
            "b_coeff": self.b_coeff,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ProblemParams":
        # derived fields are recomputed, never trusted from the file
        return make_params(int(data["n"]), float(data["q"]), float(data["lambda"]))


def _check_dimension(n) -> int:
    if int(n) != n:
        raise DimensionTooSmall(f"dimension must be an integer, got {n!r}")
    n = int(n)
    if n < 5:
        raise DimensionTooSmall(f"dimension must be at least 5, got n={n}")
    return n


def make_params(n: int, q: float, lam: float) -> ProblemParams:
    """Validate (n, q, λ) and compute the derived constants.

    Raises DimensionTooSmall for n < 5, ExponentOutOfRange for q < 2 and
    LambdaOutOfRange for λ ≥ n²/4.
    """
    n = _check_dimension(n)
    q = float(q)
    lam = float(lam)
    if not math.isfinite(q) or q < 2.0:
        raise ExponentOutOfRange(f"exponent must satisfy q >= 2, got q={q}")
    lambda_max = n * n / 4.0
    if not math.isfinite(lam) or lam >= lambda_max:
        raise LambdaOutOfRange(
            f"lambda must be below n^2/4 = {lambda_max} for positivity, got {lam}"
        )
    mu = n * (n - 4) / 4.0
    nu = (n - 4) ** 2 / 4.0
    a_coeff = (2.0 * (mu + 2.0) - lam) / 2.0
    b_coeff = (lambda_max - lam) * nu
    return ProblemParams(
        n=n,
        q=q,
        lam=lam,
        mu=mu,
        nu=nu,
        lambda_max=lambda_max,
        beta=n - q * (n - 4) / 2.0,
        q_crit=2.0 * n / (n - 4),
        omega_n=sphere_area(n),
        a_coeff=a_coeff,
        b_coeff=b_coeff,
    )


def s2_closed_form(p: ProblemParams) -> float:
    """Best constant of the linear case q = 2, μ² − λν.

    The infimum is not attained: neither the full nor the radial problem has
    an extremal function when q = 2.
    """
    return p.mu * p.mu - p.lam * p.nu


_BOUNDARY_RTOL = 1e-12


def _a_n(n: int) -> Fraction:
    return Fraction(3 * (n - 1), 2 * (n - 4) ** 2)


def q_threshold(n: int) -> float:
    """Lower end q_n of the exponent window where symmetry breaking is guaranteed."""
    n = _check_dimension(n)
    a = float(_a_n(n))
    return 1.0 + a + math.sqrt((1.0 + a) ** 2 + 4.0 * a / 3.0)


def bs_condition(n: int, q: float) -> bool:
    """Strict inequality (3q+2)/(q(q−2)) < (n−4)²/(n−1).

    Evaluated in exact rational arithmetic. Exponents within 1e-12 relative of
    the root ``q_threshold(n)`` are treated as the boundary, where the strict
    inequality fails; a rounded root cannot decide the side reliably.
    """
    n = _check_dimension(n)
    if not q > 2.0:
        raise ExponentOutOfRange(f"condition needs q > 2, got q={q}")
    if abs(q - q_threshold(n)) <= _BOUNDARY_RTOL * q:
        return False
    qf = Fraction(q)
    return (3 * qf + 2) / (qf * (qf - 2)) < Fraction((n - 4) ** 2, n - 1)
