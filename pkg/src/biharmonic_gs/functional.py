"""Integrals of a profile: quadratic form, q-norm, Rayleigh quotient, U-triple.

For u(x) = |x|^((4−n)/2) w(−log|x|) on ℝⁿ and ω = |𝕊ⁿ⁻¹|:

    U₂ = ∫|Δu|²          = ω ∫ (w''² + 2(μ+2) w'² + μ² w²) dt
    U₁ = ∫|x|⁻²|∇u|²     = ω ∫ (w'² + ν w²) dt
    U₀ = ∫|x|⁻⁴ u²       = ω ∫ w² dt
    ∫|x|^(−β)|u|^q      = ω ∫ |w|^q dt

The U₀ line follows from the same change of variables: with r = e^(−t),
|x|⁻⁴u² r^(n−1) dr = w² dt.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import ZeroDenominator
from .operator import DiscreteOperator
from .params import ProblemParams
from .profile import Profile, differentiate, integrate

__all__ = [
    "EnergyBreakdown",
    "energy_breakdown",
    "rayleigh_quotient",
    "el_gradient",
    "odd_power",
    "operator_for",
]


@dataclass(frozen=True)
class EnergyBreakdown:
    i_w2pp: float
    i_w2p: float
    i_w2: float
    i_wq: float
    u0: float
    u1: float
    u2: float
    a_value: float
    b_value: float
    degenerate: bool = False

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "EnergyBreakdown":
        return cls(**data)

    def quadratic(self, p: ProblemParams) -> float:
        """∫ (w''² + 2a w'² + b w²) dt."""
        return self.i_w2pp + 2.0 * p.a_coeff * self.i_w2p + p.b_coeff * self.i_w2


def odd_power(w: np.ndarray, q: float) -> np.ndarray:
    """|w|^(q−2) w, continuous at w = 0 for q > 2."""
    a = np.abs(w)
    return np.copysign(a ** (q - 1.0), w) * (a > 0)


def energy_breakdown(w: Profile, p: ProblemParams) -> EnergyBreakdown:
    d1 = differentiate(w, 1).values
    d2 = differentiate(w, 2).values
    h = w.h
    i_w2pp = integrate(d2 * d2, h)
    i_w2p = integrate(d1 * d1, h)
    i_w2 = integrate(w.values * w.values, h)
    i_wq = integrate(np.abs(w.values) ** p.q, h)
    om = p.omega_n
    u0 = om * i_w2
    u1 = om * (i_w2p + p.nu * i_w2)
    u2 = om * (i_w2pp + 2.0 * (p.mu + 2.0) * i_w2p + p.mu**2 * i_w2)
    return EnergyBreakdown(
        i_w2pp=i_w2pp,
        i_w2p=i_w2p,
        i_w2=i_w2,
        i_wq=i_wq,
        u0=u0,
        u1=u1,
        u2=u2,
        a_value=u2 - p.lam * u1,
        b_value=(om * i_wq) ** (2.0 / p.q) if i_wq > 0 else 0.0,
        degenerate=w.is_zero(),
    )


def rayleigh_quotient(w: Profile, p: ProblemParams) -> float:
    """R(w) = ∫(w''² + 2a w'² + b w²) / (∫|w|^q)^(2/q).

    Multiply by ω^((q−2)/q) to obtain the ℝⁿ quotient of the radial function.
    """
    if w.is_zero():
        raise ZeroDenominator("Rayleigh quotient of the zero profile")
    e = energy_breakdown(w, p)
    return e.quadratic(p) / e.i_wq ** (2.0 / p.q)


def operator_for(p: ProblemParams, w: Profile) -> DiscreteOperator:
    return DiscreteOperator(p.a_coeff, p.b_coeff, w.h, w.grid.points)


def el_gradient(w: Profile, p: ProblemParams, op: DiscreteOperator | None = None) -> Profile:
    """Residual r = w'''' − 2a w'' + b w − s |w|^(q−2) w of the Euler–Lagrange equation.

    Derivatives use the solver's discrete operator and integrals the uniform
    node sum, so with s = ⟨Lw, w⟩ / Σ|w|^q the residual is orthogonal to w.
    """
    if w.is_zero():
        raise ZeroDenominator("Euler-Lagrange residual of the zero profile")
    op = op or operator_for(p, w)
    lw = op.apply(w.values)
    g = odd_power(w.values, p.q)
    s = float(lw @ w.values) / float(g @ w.values)
    return Profile(w.grid, lw - s * g)


def residual_norm(r: Profile) -> float:
    """Discrete L² norm (h Σ r²)^(1/2)."""
    return float(np.sqrt(r.h * (r.values @ r.values)))
