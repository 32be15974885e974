import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad, solve_ivp

from conftest import gaussian
from quasiground.dual_transform import (
    ScalarPhi,
    phi,
    phi_inv,
    phi_prime_of_u,
    phi_values,
    u_to_v,
    v_to_u,
)
from quasiground.radial_field import RadialProfile, graded_grid

# int_0^1 sqrt(1 + 2t^2) dt by adaptive quadrature (frozen)
PHI_INV_ONE = 1.2712738985228156


def test_phi_inv_oracle():
    val = quad(lambda t: math.sqrt(1 + 2 * t * t), 0, 1, epsabs=1e-14)[0]
    assert val == pytest.approx(PHI_INV_ONE, rel=1e-14)
    assert phi_inv(1.0) == pytest.approx(PHI_INV_ONE, rel=1e-14)


def test_phi_against_cauchy_problem():
    # phi' = 1/sqrt(1 + 2 phi^2), phi(0) = 0 integrated directly
    s = np.linspace(0, 20, 41)
    sol = solve_ivp(lambda t, y: 1 / np.sqrt(1 + 2 * y**2), (0, 20), [0.0], t_eval=s, rtol=1e-12, atol=1e-14)
    assert np.allclose(phi_values(s), sol.y[0], rtol=1e-9, atol=1e-12)


def test_phi_at_origin():
    pv = phi(0.0)
    assert pv.phi == 0.0 and pv.phi_prime == 1.0


def test_phi_inv_quadratic_growth():
    # phi(s)/sqrt(s) -> 2^{1/4} inverts to phi_inv(u)/u^2 -> 2^{-1/2}
    assert phi_inv(1e3) / 1e6 == pytest.approx(2**-0.5, rel=1e-2)


def test_shape_on_a_grid():
    s = np.linspace(0.0, 50.0, 5001)
    u = phi_values(s)
    d = phi_prime_of_u(u)
    assert np.all(np.diff(u) > 0)
    assert np.all(np.diff(d) < 0)
    assert np.all(np.diff(u, 2) < 1e-14)  # concave


def test_phi_scalar_record():
    pv = phi(2.0)
    assert pv.s == 2.0
    assert pv.phi_prime == pytest.approx(1 / math.sqrt(1 + 2 * pv.phi**2))
    assert phi(0.0).phi == 0.0


def test_odd_extension():
    s = np.array([-3.0, -0.1, 0.1, 3.0])
    assert np.allclose(phi_values(s), -phi_values(-s))
    assert phi_inv(-2.0) == -phi_inv(2.0)


def test_asymptotic_constants():
    s = 1e6
    u = phi_values(s)
    assert u / math.sqrt(s) == pytest.approx(2**0.25, rel=5e-3)
    assert phi_prime_of_u(u) * math.sqrt(s) == pytest.approx(2**-0.75, rel=5e-3)


def test_large_argument_branch_continuous():
    u = np.array([1e8 * (1 - 1e-12), 1e8 * (1 + 1e-12)])
    v = phi_inv(u)
    assert v[1] > v[0]
    assert (v[1] - v[0]) / v[0] < 1e-10


magnitudes = st.floats(-12, 12).map(lambda e: 10.0**e)


@settings(max_examples=300, deadline=None)
@given(s=magnitudes, sign=st.sampled_from([-1.0, 1.0]))
def test_round_trip(s, sign):
    s = sign * s
    u = phi_values(s)
    assert phi_inv(u) == pytest.approx(s, rel=1e-11)
    assert phi_values(phi_inv(u)) == pytest.approx(u, rel=1e-11)


@settings(max_examples=300, deadline=None)
@given(s=magnitudes)
def test_bounds(s):
    u = phi_values(s)
    d = phi_prime_of_u(u)
    eps = 1e-14
    assert 0 < d <= 1
    assert u <= min(s, 2**0.25 * math.sqrt(s)) * (1 + eps)
    assert 0.5 * u * u <= u * d * s * (1 + eps)
    assert u * d * s <= u * u * (1 + eps)
    assert u * d <= 2**-0.5 * (1 + eps)


@settings(max_examples=200, deadline=None)
@given(seq=st.lists(st.floats(0.0, 1e5), min_size=1, max_size=30))
def test_scalar_phi_matches_vectorised(seq):
    f = ScalarPhi()
    for s in seq:
        assert f(s) == pytest.approx(float(phi_values(s)), rel=1e-14, abs=1e-300)


def test_profile_maps():
    u = gaussian(1, height=2.0)
    v = u_to_v(u)
    back = v_to_u(v)
    assert np.allclose(back.values, u.values, rtol=1e-13)
    assert np.all(v.values >= u.values)


def test_profile_maps_zero_and_monotone():
    r = graded_grid(3.0, 1e-2)
    zero = RadialProfile(1, r, np.zeros_like(r))
    assert not np.any(u_to_v(zero).values) and not np.any(v_to_u(zero).values)
    v = u_to_v(gaussian(2, height=3.0))
    assert np.all(np.diff(v.values) <= 0)
    assert np.max(np.abs(v_to_u(v).values - gaussian(2, height=3.0).values)) <= 1e-11


def test_profile_maps_reject_negative():
    r = graded_grid(3.0, 1e-2)
    with pytest.raises(ValueError):
        v_to_u(RadialProfile(1, r, -np.ones_like(r)))
    with pytest.raises(ValueError):
        u_to_v(RadialProfile(1, r, -np.ones_like(r)))
