"""Independent identity checks on computed ground states.

At a solution w of w'''' − 2a w'' + b w = S |w|^(q−2) w normalized by
ω ∫|w|^q = 1 (so that S = A(u)):

* first integral:  −w'''w' + ½w''² + a w'² − (b/2) w² + (S/q)|w|^q ≡ 0,
* its integral:    3∫w''² + 2a∫w'² − b∫w² + (2/q) S ∫|w|^q = 0,
* the same identity in terms of U₀, U₁, U₂ (a Pohozaev-type relation),
* Hardy:           U₁ > ν U₀.

``cross_check_ef`` compares the Emden–Fowler integrals with direct radial
quadrature of the n-dimensional integrals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import QuadratureFailure
from .functional import EnergyBreakdown, energy_breakdown
from .params import ProblemParams
from .profile import Grid, Profile, differentiate, ef_transform, integrate
from .solver import GroundState

__all__ = [
    "IdentityReport",
    "check_first_integral",
    "check_integrated_identity",
    "check_pohozaev",
    "pohozaev_sides",
    "check_hardy",
    "cross_check_ef",
    "radial_integrals",
    "verify_ground_state",
    "TOLERANCES",
]

TOLERANCES = {
    "first_integral": 1e-5,
    "integrated_identity": 1e-7,
    "pohozaev": 1e-6,
    "cross_check_ef": 1e-6,
}


@dataclass(frozen=True)
class IdentityReport:
    name: str
    lhs: float
    rhs: float
    residual: float
    tolerance: float | None
    passed: bool
    kind: str = "equality"

    @classmethod
    def equality(cls, name: str, lhs: float, rhs: float, tolerance: float) -> "IdentityReport":
        residual = abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1.0)
        return cls(name, float(lhs), float(rhs), float(residual), tolerance, bool(residual <= tolerance))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "kind": self.kind,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "IdentityReport":
        return cls(d["name"], d["lhs"], d["rhs"], d["residual"], d["tolerance"], d["pass"], d["kind"])


def _normalized(gs: GroundState) -> tuple[Profile, EnergyBreakdown]:
    """Profile and breakdown rescaled so that ω ∫|w|^q = 1."""
    p = gs.params
    i_wq = integrate(np.abs(gs.w.values) ** p.q, gs.w.h)
    w = gs.w.scaled((p.omega_n * i_wq) ** (-1.0 / p.q))
    return w, energy_breakdown(w, p)


def check_first_integral(gs: GroundState, tol: float = TOLERANCES["first_integral"]) -> IdentityReport:
    """Pointwise conserved quantity, max-norm over the core, relative to the largest term."""
    p = gs.params
    w, _ = _normalized(gs)
    v = w.values
    d1 = differentiate(w, 1).values
    d2 = differentiate(w, 2).values
    d3 = differentiate(w, 3).values
    s = gs.s_rad
    terms = np.stack(
        [
            -d3 * d1,
            0.5 * d2 * d2,
            p.a_coeff * d1 * d1,
            -0.5 * p.b_coeff * v * v,
            (s / p.q) * np.abs(v) ** p.q,
        ]
    )
    mask = np.abs(v) > 1e-6 * np.abs(v).max()
    mask[:3] = mask[-3:] = False  # one-sided closures at the edge
    if not mask.any():
        return IdentityReport("first_integral", 0.0, 0.0, 0.0, tol, True)
    total = np.abs(terms.sum(axis=0)[mask]).max()
    scale = np.abs(terms[:, mask]).max()
    value = total / scale
    return IdentityReport("first_integral", float(value), 0.0, float(value), tol, bool(value <= tol))


def check_integrated_identity(
    gs: GroundState, tol: float = TOLERANCES["integrated_identity"]
) -> IdentityReport:
    """3∫w''² + 2a∫w'² + (2/q) S ∫|w|^q = b∫w², after restoring the normalization."""
    p = gs.params
    _, e = _normalized(gs)
    lhs = 3.0 * e.i_w2pp + 2.0 * p.a_coeff * e.i_w2p + (2.0 / p.q) * gs.s_rad * e.i_wq
    rhs = p.b_coeff * e.i_w2
    return IdentityReport.equality("integrated_identity", lhs, rhs, tol)


def pohozaev_sides(e: EnergyBreakdown, p: ProblemParams) -> tuple[float, float]:
    """Both sides of the U-form of the integrated identity.

        (3 + 2/q) U₂ + (4(μ+2)ν − 4μ² + 2λν) U₀ = (4(μ+2) + λ(q+2)/q) U₁

    Obtained by writing ω∫w² = U₀, ω∫w'² = U₁ − νU₀,
    ω∫w''² = U₂ − 2(μ+2)(U₁ − νU₀) − μ²U₀ and S ω∫|w|^q = A(u) = U₂ − λU₁.
    Homogeneous of degree 2 in w, so independent of the normalization.
    """
    q, mu, nu, lam = p.q, p.mu, p.nu, p.lam
    c0 = 4.0 * (mu + 2.0) * nu - 4.0 * mu * mu + 2.0 * lam * nu
    c1 = 4.0 * (mu + 2.0) + lam * (q + 2.0) / q
    lhs = (3.0 + 2.0 / q) * e.u2
    rhs = c1 * e.u1
    # keep the U₀ term on whichever side makes it non-negative
    if c0 >= 0:
        lhs += c0 * e.u0
    else:
        rhs -= c0 * e.u0
    return lhs, rhs


def check_pohozaev(gs: GroundState, tol: float = TOLERANCES["pohozaev"]) -> IdentityReport:
    lhs, rhs = pohozaev_sides(gs.breakdown, gs.params)
    return IdentityReport.equality("pohozaev", lhs, rhs, tol)


def check_hardy(b: EnergyBreakdown, p: ProblemParams) -> IdentityReport:
    """Strict inequality U₁ > ν U₀; ``residual`` is the relative margin."""
    lhs, rhs = b.u1, p.nu * b.u0
    margin = (lhs - rhs) / max(abs(lhs), abs(rhs), 1.0)
    return IdentityReport("hardy", lhs, rhs, abs(margin), None, bool(lhs > rhs), "strict_inequality")


def verify_ground_state(gs: GroundState) -> list[IdentityReport]:
    """The four reports embedded in every solve result."""
    return [
        check_first_integral(gs),
        check_integrated_identity(gs),
        check_pohozaev(gs),
        check_hardy(gs.breakdown, gs.params),
    ]


# --- direct n-dimensional route ---------------------------------------------

# sixth order central differences in s = log r
_D1 = np.array([-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0]) / 60.0
_D2 = np.array([2.0, -27.0, 270.0, -490.0, 270.0, -27.0, 2.0]) / 180.0
_LOG_STEP = 1e-2


def _gauss_nodes(lo: float, hi: float, panel: float, order: int):
    x, wt = np.polynomial.legendre.leggauss(order)
    n_pan = max(1, int(math.ceil((hi - lo) / panel)))
    edges = np.linspace(lo, hi, n_pan + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * wt[None, :]).ravel()
    return nodes, weights


def _log_derivatives(radial_u: Callable, s: np.ndarray):
    offs = _LOG_STEP * np.arange(-3, 4)
    with np.errstate(all="ignore"):
        vals = np.asarray(radial_u(np.exp(s[:, None] + offs[None, :]).ravel()), dtype=float)
    vals = vals.reshape(s.size, offs.size)
    u = vals[:, 3]
    u_s = vals @ _D1 / _LOG_STEP
    u_ss = vals @ _D2 / _LOG_STEP**2
    return u, u_s, u_ss


def _direct(radial_u: Callable, p: ProblemParams, lo: float, hi: float, order: int) -> np.ndarray:
    s, wt = _gauss_nodes(lo, hi, 0.25, order)
    u, u_s, u_ss = _log_derivatives(radial_u, s)
    n = p.n
    r_n4 = np.exp((n - 4) * s)  # r^(n−4)
    # r²Δu = u_ss + (n−2) u_s and |∇u|² = u_s² / r² for radial u
    lap = (u_ss + (n - 2) * u_s) ** 2 * r_n4
    grad = u_s**2 * r_n4
    zero = u**2 * r_n4
    lq = np.abs(u) ** p.q * np.exp((n - p.beta) * s)
    out = p.omega_n * np.array([wt @ lap, wt @ grad, wt @ zero, wt @ lq])
    return out


def radial_integrals(radial_u: Callable, p: ProblemParams, half_width: float) -> dict:
    """U₂, U₁, U₀ and ∫|x|^(−β)|u|^q by Gauss–Legendre quadrature in r over [e^(−T), e^T].

    Derivatives of ``radial_u`` come from central differences in log r; two
    rule orders are compared and a disagreement raises QuadratureFailure.
    """
    lo, hi = -half_width, half_width
    a = _direct(radial_u, p, lo, hi, 12)
    b = _direct(radial_u, p, lo, hi, 16)
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise QuadratureFailure("non-finite radial integrand")
    scale = np.maximum(np.abs(b), 1e-300)
    if np.any(np.abs(a - b) > 1e-9 * scale + 1e-300):
        raise QuadratureFailure(f"Gauss-Legendre orders 12 and 16 disagree: {a} vs {b}")
    u2, u1, u0, lq = (float(x) for x in b)
    s_rad = u2 - p.lam * u1
    return {"u2": u2, "u1": u1, "u0": u0, "lq": lq, "a_value": s_rad}


def cross_check_ef(
    radial_u: Callable, p: ProblemParams, g: Grid, tol: float = TOLERANCES["cross_check_ef"]
) -> tuple[IdentityReport, IdentityReport, IdentityReport, IdentityReport]:
    """Compare each n-dimensional integral with its Emden–Fowler counterpart.

    Returns reports for ∫|Δu|², ∫|x|⁻²|∇u|², ∫|x|⁻⁴u² and ∫|x|^(−β)|u|^q,
    direct route on the left, Emden–Fowler route on the right.
    """
    direct = radial_integrals(radial_u, p, g.half_width)
    e = energy_breakdown(ef_transform(radial_u, p, g), p)
    pairs = [
        ("laplacian_l2", direct["u2"], e.u2),
        ("hardy_gradient", direct["u1"], e.u1),
        ("rellich_weight", direct["u0"], e.u0),
        ("weighted_lq", direct["lq"], p.omega_n * e.i_wq),
    ]
    out = []
    for name, lhs, rhs in pairs:
        scale = max(abs(lhs), abs(rhs))
        residual = abs(lhs - rhs) / scale if scale > 0 else 0.0
        out.append(IdentityReport(name, float(lhs), float(rhs), float(residual), tol, bool(residual <= tol)))
    return tuple(out)
