import math

import numpy as np
import pytest

from biharmonic_gs import make_params
from biharmonic_gs.errors import ZeroDenominator
from biharmonic_gs.functional import (
    EnergyBreakdown,
    el_gradient,
    energy_breakdown,
    odd_power,
    rayleigh_quotient,
    residual_norm,
)
from biharmonic_gs.profile import Grid, Profile

G = Grid(20.0, 4001)
GAUSS = Profile.from_function(lambda t: np.exp(-t * t), G)


def test_breakdown_of_gaussian_closed_forms():
    p = make_params(6, 3.0, -2.0)
    e = energy_breakdown(GAUSS, p)
    c = math.sqrt(math.pi / 2)
    assert e.i_w2 == pytest.approx(c, rel=1e-12)
    assert e.i_w2p == pytest.approx(c, rel=1e-7)  # O(h⁴) differences
    assert e.i_w2pp == pytest.approx(3 * c, rel=1e-7)
    assert e.i_wq == pytest.approx(math.sqrt(math.pi / 3), rel=1e-12)
    om = p.omega_n
    assert e.u0 == pytest.approx(om * c, rel=1e-12)
    assert e.u1 == pytest.approx(om * (c + p.nu * c), rel=1e-7)
    assert e.u2 == pytest.approx(om * (3 * c + 2 * (p.mu + 2) * c + p.mu**2 * c), rel=1e-7)
    assert e.a_value == pytest.approx(e.u2 - p.lam * e.u1, rel=1e-15)
    assert not e.degenerate


def test_quadratic_matches_u_triple():
    p = make_params(7, 4.0, -30.0)
    e = energy_breakdown(GAUSS, p)
    # ω × (w''² + 2a w'² + b w²) equals U₂ − λU₁
    assert p.omega_n * e.quadratic(p) == pytest.approx(e.a_value, rel=1e-12)


def test_breakdown_round_trip():
    e = energy_breakdown(GAUSS, make_params(5, 4.0, 0.0))
    assert EnergyBreakdown.from_dict(e.to_dict()) == e


def test_zero_profile():
    z = Profile(G, np.zeros(G.points))
    p = make_params(5, 4.0, 0.0)
    assert energy_breakdown(z, p).degenerate
    with pytest.raises(ZeroDenominator):
        rayleigh_quotient(z, p)
    with pytest.raises(ZeroDenominator):
        el_gradient(z, p)


@pytest.mark.parametrize("c", [1e-3, 0.5, 7.0, -2.0])
def test_quotient_is_scale_invariant(c):
    p = make_params(5, 3.5, -4.0)
    assert rayleigh_quotient(GAUSS.scaled(c), p) == pytest.approx(rayleigh_quotient(GAUSS, p), rel=1e-12)


def test_quotient_translation_invariant_away_from_edges():
    p = make_params(6, 4.0, 0.0)
    assert rayleigh_quotient(GAUSS.shifted(1.37), p) == pytest.approx(rayleigh_quotient(GAUSS, p), rel=1e-11)


def test_el_residual_orthogonal_to_profile():
    p = make_params(5, 4.0, 0.0)
    r = el_gradient(GAUSS, p)
    assert abs(r.values @ GAUSS.values) <= 1e-12 * np.abs(r.values).sum() * GAUSS.max_abs()
    assert residual_norm(r) > 0.1  # a Gaussian is not a solution


def test_odd_power_continuous_at_zero():
    w = np.array([-1.0, -1e-300, 0.0, 1e-300, 2.0])
    assert np.array_equal(odd_power(w, 3.0), np.array([-1.0, -0.0, 0.0, 0.0, 4.0]))
