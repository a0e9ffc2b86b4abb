"""Second-variation test for symmetry breaking and the critical-case bubble bounds.

At a radial minimizer u normalized by ∫|x|^(−β)|u|^q = 1, minimality among
all functions requires A(uφ) ≥ (q−1)A(u) for φ a first spherical harmonic
(eigenvalue n−1, mean zero, ∫φ² = |𝕊ⁿ⁻¹|), where

    A(uφ) = A(u) + (n−1)(n−1−λ)U₀ − 2(n−1)∫|x|⁻²uΔu
          = A(u) + (n−1)(3n−9−λ)U₀ + 2(n−1)U₁.

The gap D = (q−1)A(u) − A(uφ) is therefore ≤ 0 whenever the radial and the
full infimum coincide, and D > 0 certifies S_q(λ) < S_q^rad(λ).
"""

from __future__ import annotations

import functools
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .errors import NotConverged, QuadratureFailure, SingularConfiguration
from .functional import rayleigh_quotient
from .params import ProblemParams, bs_condition, make_params, q_threshold
from .profile import Grid, differentiate, ef_transform, integrate
from .solver import GroundState, SolverOptions, solve_radial
from .verify import _gauss_nodes, _log_derivatives, radial_integrals, verify_ground_state

__all__ = [
    "RADIALLY_STABLE",
    "SYMMETRY_BROKEN",
    "SymmetryCertificate",
    "certify",
    "second_variation_gap",
    "thm4_coefficient_c1",
    "ScanRow",
    "ScanResult",
    "lambda_star",
    "spherical_mean_weight",
    "StarConstant",
    "s_star",
    "bubble",
    "bubble_comparison",
    "BubbleRow",
    "bs_window",
]

log = logging.getLogger(__name__)

RADIALLY_STABLE = "RadiallyStable"
SYMMETRY_BROKEN = "SymmetryBroken"
CERTIFY_MARGIN = 1e-6

_VERDICT_NOTE = {
    RADIALLY_STABLE: "no obstruction found: the radial minimizer passes the first-harmonic test",
    SYMMETRY_BROKEN: "the radial minimizer is unstable along the first harmonic: S_q < S_q^rad",
}


def thm4_coefficient_c1(n: int, q: float, lam: float) -> float:
    """Coefficient of U₁ in the combined necessary condition; positive for λ → −∞."""
    mu = n * (n - 4) / 4.0
    return -2.0 * q / (3.0 * q + 2.0) * lam + (
        4.0 * q * (mu + 2.0) / (3.0 * q + 2.0) - 2.0 * (n - 1) / (q - 2.0)
    )


def second_variation_gap(u0: float, u1: float, u2: float, p: ProblemParams) -> float:
    """D in the grouped form (q−2)[U₂ − (λ + 2(n−1)/(q−2))U₁ − (n−1)(3n−9−λ)/(q−2) U₀]."""
    n, q, lam = p.n, p.q, p.lam
    k1 = lam + 2.0 * (n - 1) / (q - 2.0)
    k0 = (n - 1) * (3 * n - 9 - lam) / (q - 2.0)
    return (q - 2.0) * (u2 - k1 * u1 - k0 * u0)


@dataclass(frozen=True)
class SymmetryCertificate:
    params: ProblemParams
    u0: float
    u1: float
    u2: float
    a_u: float
    a_uphi: float
    second_variation_gap: float
    gap_grouped: float
    routes_agree: bool
    cross_term: float
    cross_term_numeric: float
    margin: float
    verdict: str
    thm4_coefficient_c1: float
    thm4_condition_met: bool

    @property
    def relative_gap(self) -> float:
        return self.second_variation_gap / abs(self.a_u)

    @property
    def note(self) -> str:
        return _VERDICT_NOTE[self.verdict]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["params"] = self.params.to_dict()
        d["relative_gap"] = self.relative_gap
        d["note"] = self.note
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SymmetryCertificate":
        d = {k: v for k, v in d.items() if k not in ("relative_gap", "note")}
        d["params"] = ProblemParams.from_dict(d["params"])
        return cls(**d)


def certify(gs: GroundState, margin: float = CERTIFY_MARGIN) -> SymmetryCertificate:
    """Evaluate the first-harmonic second variation at a converged radial ground state.

    D is computed twice: from A(uφ) assembled term by term and from the grouped
    form; the two must agree to 1e-9 relative. The cross term ∫|x|⁻²uΔu is
    also integrated directly from the profile and reported for comparison
    with −(n−4)U₀ − U₁.
    """
    if not gs.converged:
        raise NotConverged(
            f"ground state at {gs.params.to_dict()} is not converged "
            f"(residual {gs.el_residual:.3e})"
        )
    p, e = gs.params, gs.breakdown
    n, q, lam = p.n, p.q, p.lam
    u0, u1, u2 = e.u0, e.u1, e.u2
    a_u = u2 - lam * u1
    cross = -(n - 4) * u0 - u1
    a_uphi = a_u + (n - 1) * (n - 1 - lam) * u0 - 2.0 * (n - 1) * cross
    gap = (q - 1.0) * a_u - a_uphi
    grouped = second_variation_gap(u0, u1, u2, p)
    scale = max(abs(gap), abs(grouped), 1e-300)
    agree = abs(gap - grouped) <= 1e-9 * max(scale, abs(a_u))
    if not agree:
        log.warning("second-variation routes disagree: %.17g vs %.17g", gap, grouped)
    w = gs.w
    cross_num = p.omega_n * (
        integrate(w.values * differentiate(w, 2).values, w.h) - p.mu * e.i_w2
    )
    c1 = thm4_coefficient_c1(n, q, lam)
    verdict = SYMMETRY_BROKEN if gap > margin * abs(a_u) else RADIALLY_STABLE
    return SymmetryCertificate(
        params=p,
        u0=u0,
        u1=u1,
        u2=u2,
        a_u=a_u,
        a_uphi=a_uphi,
        second_variation_gap=gap,
        gap_grouped=grouped,
        routes_agree=bool(agree),
        cross_term=cross,
        cross_term_numeric=cross_num,
        margin=margin,
        verdict=verdict,
        thm4_coefficient_c1=c1,
        thm4_condition_met=bool(c1 > 0),
    )


# --- λ scan -------------------------------------------------------------------


@dataclass(frozen=True)
class ScanRow:
    lam: float
    gap: float
    s_rad: float
    verdict: str
    verified: bool = True  # all identity checks passed at this λ

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "D": self.gap,
            "s_rad": self.s_rad,
            "verdict": self.verdict,
            "verified": self.verified,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ScanRow":
        return cls(d["lambda"], d["D"], d["s_rad"], d["verdict"], d.get("verified", True))


@dataclass(frozen=True)
class ScanResult:
    n: int
    q: float
    lambda_range: tuple
    rows: tuple
    brackets: tuple = field(default=())  # refined (lo, hi) pairs, in scan order

    @property
    def status(self) -> str:
        return "SignChange" if self.brackets else "NoSignChange"

    @property
    def first_bracket(self):
        return self.brackets[0] if self.brackets else None

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "q": self.q,
            "lambda_range": list(self.lambda_range),
            "status": self.status,
            "rows": [r.to_dict() for r in self.rows],
            "brackets": [list(b) for b in self.brackets],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ScanResult":
        return cls(
            n=d["n"],
            q=d["q"],
            lambda_range=tuple(d["lambda_range"]),
            rows=tuple(ScanRow.from_dict(r) for r in d["rows"]),
            brackets=tuple(tuple(b) for b in d["brackets"]),
        )


def _thread_cap() -> int:
    raw = os.environ.get("THREADS", "").strip()
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            log.warning("ignoring THREADS=%r", raw)
    return os.cpu_count() or 1


def _scan_point(n, q, lam, grid, opts) -> ScanRow:
    gs = solve_radial(make_params(n, q, lam), grid, opts)
    cert = certify(gs)
    ok = all(r.passed for r in verify_ground_state(gs))
    return ScanRow(lam, cert.second_variation_gap, gs.s_rad, cert.verdict, ok)


def lambda_star(
    n: int,
    q: float,
    lambda_range: Sequence[float],
    steps: int,
    grid: Grid | None = None,
    opts: SolverOptions | None = None,
    threads: int | None = None,
) -> ScanResult:
    """Scan D(λ) from the most negative λ upward and bracket every sign change.

    Solves at ``steps`` equally spaced values run concurrently; each bracket is
    then bisected to width 1e-3·|λ_lo|. An empty ``brackets`` tuple means no
    sign change in the range, which is a finding rather than an error.
    """
    lo, hi = (float(x) for x in lambda_range)
    if lo > hi:
        raise ValueError(f"lambda range must be increasing, got {lo}:{hi}")
    if steps < 1:
        raise ValueError("need at least one scan step")
    p = make_params(n, q, hi)  # validates n, q and the upper end
    if not 2.0 < p.q < p.q_crit:
        raise ValueError(f"scan needs 2 < q < {p.q_crit}, got q={q}")
    lams = [lo] if steps == 1 or lo == hi else list(np.linspace(lo, hi, steps))
    workers = min(threads or _thread_cap(), len(lams))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        rows = list(pool.map(lambda lam: _scan_point(n, q, float(lam), grid, opts), lams))

    brackets = []
    for left, right in zip(rows, rows[1:]):
        if (left.gap > 0) == (right.gap > 0):
            continue
        a, b = left.lam, right.lam
        fa = left.gap
        width = 1e-3 * abs(a) if a != 0 else 1e-3
        while b - a > width:
            mid = 0.5 * (a + b)
            fm = _scan_point(n, q, mid, grid, opts).gap
            if (fm > 0) == (fa > 0):
                a, fa = mid, fm
            else:
                b = mid
        brackets.append((a, b))
    return ScanResult(n, float(q), (lo, hi), tuple(rows), tuple(brackets))


# --- spherical means and the translated bubble -----------------------------------


@functools.lru_cache(maxsize=None)
def _angle_rule(n: int, order: int):
    """Gauss–Legendre nodes on [0, π], graded geometrically toward θ = 0."""
    edges = np.concatenate(([0.0], math.pi * 2.0 ** -np.arange(48, -1, -1.0)))
    x, wt = np.polynomial.legendre.leggauss(order)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    th = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    w = (half[:, None] * wt[None, :]).ravel() * np.sin(th) ** (n - 2)
    norm = math.sqrt(math.pi) * math.gamma((n - 1) / 2) / math.gamma(n / 2)
    return 2.0 * np.sin(0.5 * th) ** 2, w / norm


def _mean_weight(r: np.ndarray, s: float, n: int, order: int) -> np.ndarray:
    one_minus_cos, w = _angle_rule(n, order)
    # r² + s² − 2rs cosθ as (r−s)² + 2rs(1−cosθ): no cancellation for r ≈ s
    d2 = (r[:, None] - s) ** 2 + 2.0 * r[:, None] * s * one_minus_cos[None, :]
    return (w[None, :] / d2).sum(axis=1)


def _spherical_mean(r: np.ndarray, s: float, n: int) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    if s == 0.0:
        return r**-2.0
    if n <= 3 and np.any(r == s):
        raise SingularConfiguration(f"|x+y|^-2 is not integrable on the sphere r = s for n = {n}")
    out = np.empty_like(r)
    zero = r == 0.0
    out[zero] = s**-2.0
    rr = r[~zero]
    fine = _mean_weight(rr, s, n, 20)
    coarse = _mean_weight(rr, s, n, 14)
    if np.any(np.abs(fine - coarse) > 1e-10 * np.abs(fine)):
        raise QuadratureFailure("angular quadrature failed its error estimate")
    out[~zero] = fine
    return out


def spherical_mean_weight(r: float, s: float, n: int) -> float:
    """Average of |x+y|⁻² over |x| = r for a fixed |y| = s in ℝⁿ."""
    if r < 0 or s < 0 or (r == 0 and s == 0):
        raise ValueError(f"need r, s >= 0 not both zero, got r={r}, s={s}")
    if n < 2:
        raise ValueError("need n >= 2")
    return float(_spherical_mean(np.array([float(r)]), float(s), int(n))[0])


def bubble(n: int):
    """The extremal U(r) = (1 + r²)^((4−n)/2) of the critical embedding."""
    k = (4.0 - n) / 2.0

    def u(r):
        return (1.0 + np.asarray(r, dtype=float) ** 2) ** k

    return u


STAR_HALF_WIDTH = 40.0
STAR_POINTS = 2**16 + 1


@dataclass(frozen=True)
class StarConstant:
    n: int
    value: float  # direct radial quadrature
    ef_value: float  # Emden–Fowler route on a fine grid
    u2: float
    u1: float
    lq: float  # ∫U^(2**)

    @property
    def agreement(self) -> float:
        return abs(self.value - self.ef_value) / self.value

    def to_dict(self) -> dict:
        d = asdict(self)
        d["agreement"] = self.agreement
        return d


@functools.lru_cache(maxsize=None)
def s_star(n: int) -> StarConstant:
    """Best constant of the critical embedding, evaluated at the bubble along two routes."""
    p = make_params(n, 2.0 * n / (n - 4), 0.0)
    u = bubble(n)
    d = radial_integrals(u, p, STAR_HALF_WIDTH)
    value = d["u2"] / d["lq"] ** (2.0 / p.q)
    w = ef_transform(u, p, Grid(STAR_HALF_WIDTH, STAR_POINTS))
    ef_value = p.omega_n ** ((p.q - 2.0) / p.q) * rayleigh_quotient(w, p)
    return StarConstant(n, float(value), float(ef_value), float(d["u2"]), float(d["u1"]), float(d["lq"]))


def _graded_rule(lo: float, cut: float, hi: float, order: int):
    """Gauss–Legendre on [lo, hi] with panels refined geometrically toward ``cut``."""
    x, wt = np.polynomial.legendre.leggauss(order)
    edges = set(np.arange(lo, hi, 0.25).tolist()) | {hi}
    for k in range(40):
        d = 0.25 * 2.0**-k
        edges.update(e for e in (cut - d, cut, cut + d) if lo <= e <= hi)
    edges = np.array(sorted(edges))
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    return (mid[:, None] + half[:, None] * x).ravel(), (half[:, None] * wt).ravel()


def _shifted_hardy(n: int, offset: float, half_width: float = STAR_HALF_WIDTH) -> float:
    """ω ∫₀^∞ |∇U|²(r) M(r, |y|) r^(n−1) dr for the bubble, by Gauss–Legendre in log r.

    M(·, |y|) is continuous but not smooth at r = |y|, hence the graded panels.
    """
    if offset == 0.0:
        return s_star(n).u1
    omega = make_params(n, 4.0, 0.0).omega_n
    cut = min(max(math.log(offset), -half_width), half_width)
    total = {}
    for order in (12, 16):
        s, wt = _graded_rule(-half_width, cut, half_width, order)
        _, u_s, _ = _log_derivatives(bubble(n), s)
        r = np.exp(s)
        total[order] = omega * (wt @ (u_s**2 * _spherical_mean(r, offset, n) * r ** (n - 2)))
    if abs(total[12] - total[16]) > 1e-9 * abs(total[16]):
        raise QuadratureFailure(f"shifted Hardy term unresolved at |y| = {offset}")
    return total[16]


@dataclass(frozen=True)
class BubbleRow:
    offset: float
    ratio: float
    s_star: float

    @property
    def gap(self) -> float:
        return self.ratio - self.s_star

    def to_dict(self) -> dict:
        return {"offset": self.offset, "R": self.ratio, "S_star": self.s_star, "gap": self.gap}


def bubble_comparison(n: int, lam: float, offsets: Sequence[float]) -> list[BubbleRow]:
    """Quotient of the bubble translated by |y| = offset, against S**.

    R(y) = [∫|ΔU|² − λ∫|x+y|⁻²|∇U|²] / (∫U^(2**))^(2/2**); the Hardy term is
    the only part that feels the translation.
    """
    make_params(n, 2.0 * n / (n - 4), lam)
    star = s_star(n)
    p_q = 2.0 * n / (n - 4)
    denom = star.lq ** (2.0 / p_q)
    rows = []
    for y in offsets:
        y = float(y)
        if y < 0:
            raise ValueError(f"offsets must be non-negative, got {y}")
        num = star.u2 if lam == 0 else star.u2 - lam * _shifted_hardy(n, y)
        rows.append(BubbleRow(y, num / denom, star.value))
    return rows


def bs_window(n: int):
    """Exponents q with guaranteed breaking for λ → −∞: (q_n, 2**), or None when empty."""
    lo = q_threshold(n)
    hi = 2.0 * n / (n - 4)
    return (lo, hi) if lo < hi else None


def in_bs_window(n: int, q: float) -> bool:
    w = bs_window(n)
    return w is not None and q < w[1] and bs_condition(n, q)
