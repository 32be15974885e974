import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from conftest import gaussian
from quasiground.fiber_map import fiber_scale
from quasiground.radial_field import (
    ParameterError,
    Params,
    RadialProfile,
    delta_exponent,
    functionals,
    gn_exponents,
    gn_ratio,
    graded_grid,
    index_derivative,
    radial_laplacian,
    read_profile_csv,
    sphere_area,
)

# Gaussian e^{-r^2/2} on the line, from adaptive quadrature (frozen)
GAUSS_MASS = 1.7724538509055159
GAUSS_KINETIC = 0.88622692545275801
GAUSS_QUASI = 0.31332853432887503


def test_gaussian_oracle_values_frozen():
    f = lambda x: math.exp(-x * x / 2)
    df = lambda x: -x * math.exp(-x * x / 2)
    assert quad(lambda x: f(x) ** 2, -np.inf, np.inf)[0] == pytest.approx(GAUSS_MASS, rel=1e-13)
    assert quad(lambda x: df(x) ** 2, -np.inf, np.inf)[0] == pytest.approx(GAUSS_KINETIC, rel=1e-13)
    assert quad(lambda x: f(x) ** 2 * df(x) ** 2, -np.inf, np.inf)[0] == pytest.approx(GAUSS_QUASI, rel=1e-13)
    assert GAUSS_MASS == pytest.approx(math.sqrt(math.pi), rel=1e-15)


def test_gaussian_functionals_N1():
    fv = functionals(gaussian(1), Params(1, 9))
    assert fv.mass == pytest.approx(GAUSS_MASS, rel=1e-9)
    assert fv.kinetic == pytest.approx(GAUSS_KINETIC, rel=1e-9)
    assert fv.quasi == pytest.approx(GAUSS_QUASI, rel=1e-9)
    assert fv.sup_norm == 1.0


def test_gaussian_mass_in_higher_dimension():
    # |e^{-r^2/2}|_2^2 over R^N is pi^{N/2}
    for N, p in [(2, 7), (3, 6), (5, 6)]:
        fv = functionals(gaussian(N), Params(N, p))
        assert fv.mass == pytest.approx(math.pi ** (N / 2), rel=1e-9)


def test_zero_profile_all_zero():
    r = graded_grid(5.0, 1e-2)
    fv = functionals(RadialProfile(1, r, np.zeros_like(r)), Params(1, 9))
    assert fv.as_dict() == {k: 0.0 for k in fv.as_dict()}


def test_sphere_area():
    assert sphere_area(1) == pytest.approx(2.0)
    assert sphere_area(2) == pytest.approx(2 * math.pi)
    assert sphere_area(3) == pytest.approx(4 * math.pi)


@pytest.mark.parametrize("N,p", [(1, 8.0), (1, 7.5), (3, 4.0), (3, 12.0), (2, -1.0), (0, 9.0)])
def test_params_gate(N, p):
    with pytest.raises(ParameterError):
        Params(N, p)


def test_params_fields():
    pr = Params(3, 6)
    assert pr.sigma == 6.0
    assert pr.two_star == 6.0
    assert pr.mass_critical == pytest.approx(4 + 4 / 3)
    assert pr.sigma > pr.N + 2
    assert Params(2, 7).two_star == math.inf


def test_profile_validation():
    with pytest.raises(ValueError):
        RadialProfile(1, [0.1, 0.2, 0.3], [1, 1, 1])
    with pytest.raises(ValueError):
        RadialProfile(1, [0.0, 0.2, 0.1], [1, 1, 1])
    with pytest.raises(ValueError):
        RadialProfile(1, [0.0, 0.1, 0.2], [1, np.nan, 1])
    with pytest.raises(ValueError):
        RadialProfile(1, [0.0, 0.1, 0.2], [1, 2, 0], decreasing=True)
    with pytest.raises(ValueError):
        RadialProfile(1, [0.0, 0.1], [1, 0])


def test_profile_arrays_read_only():
    u = gaussian(1)
    with pytest.raises(ValueError):
        u.values[0] = 3.0


def test_graded_grid_pins_endpoint():
    r = graded_grid(7.3, 1e-3, 1.02)
    assert r[0] == 0.0 and r[-1] == pytest.approx(7.3, rel=1e-15)
    q = np.diff(r)[1:] / np.diff(r)[:-1]
    assert np.allclose(q, q[0])
    assert r[1] <= 1e-3


def test_index_derivative_exact_on_quartics():
    s = np.arange(20.0)
    f = 0.3 * s**4 - s**3 + 2 * s
    assert np.allclose(index_derivative(f), 1.2 * s**3 - 3 * s**2 + 2, atol=1e-9)


def test_fourth_order_convergence():
    pr = Params(1, 9)
    exact = GAUSS_KINETIC
    e1 = abs(functionals(gaussian(1, growth=1.02), pr).kinetic - exact)
    e2 = abs(functionals(gaussian(1, growth=1.01), pr).kinetic - exact)
    # halving ln(q) roughly halves the spacing; fourth order gives a ratio near 16
    assert e1 / e2 > 10


def test_laplacian_of_gaussian():
    u = gaussian(3)
    r = u.nodes
    exact = (r**2 - 3) * np.exp(-(r**2) / 2)
    lap = radial_laplacian(u)
    # one-sided stencils at the origin lose a little accuracy
    assert abs(lap[0] - exact[0]) < 1e-5
    sel = (r > 0) & (r < 6)
    assert np.max(np.abs(lap[sel] - exact[sel])) < 1e-6


def test_csv_round_trip(tmp_path):
    u = gaussian(2)
    path = tmp_path / "u.csv"
    u.to_csv(path)
    assert path.read_text().splitlines()[0] == "r,value"
    back = read_profile_csv(path, 2)
    assert np.array_equal(back.nodes, u.nodes) and np.array_equal(back.values, u.values)


def test_support_end_trailing_zeros():
    r = graded_grid(4.0, 1e-2)
    v = np.where(r < 2.0, 2.0 - r, 0.0)
    u = RadialProfile(1, r, v)
    m = u.support_end
    assert v[m - 2] > 0 and v[m - 1] == 0.0


def test_gn_exponents_and_theta2():
    for N, p in [(1, 9), (2, 8), (3, 6), (5, 6)]:
        t1, t2 = gn_exponents(N, p)
        assert t2 > 1
        assert t2 * (N + 2) == pytest.approx((p - 2) * N / 2)
        assert t1 + t2 * 2 == pytest.approx(p / 2)  # homogeneity in u
    assert delta_exponent(5, 6) == pytest.approx(-1 / 3)


def test_gn_ratio_fiber_invariant():
    pr = Params(1, 9)
    u = gaussian(1)
    r1 = gn_ratio(u, pr).ratio
    r2 = gn_ratio(fiber_scale(u, 2.0), pr).ratio
    assert r2 == pytest.approx(r1, rel=1e-10)
    assert math.isfinite(r1) and r1 > 0


def test_gn_ratio_grid_refinement():
    pr = Params(1, 9)
    r1 = gn_ratio(gaussian(1, growth=1.01), pr).ratio
    r2 = gn_ratio(gaussian(1, growth=1.005), pr).ratio
    assert r2 == pytest.approx(r1, rel=1e-6)


def test_gn_ratio_zero_profile_rejected():
    r = graded_grid(5.0, 1e-2)
    with pytest.raises(ValueError):
        gn_ratio(RadialProfile(1, r, np.zeros_like(r)), Params(1, 9))


mixtures = st.lists(
    st.tuples(st.floats(0.2, 1.5), st.floats(0.5, 2.0)), min_size=1, max_size=3
)


@settings(max_examples=40, deadline=None)
@given(mix=mixtures, N=st.sampled_from([1, 2, 3, 5]), frac=st.floats(0.01, 0.99))
def test_identities_hold_for_random_profiles(mix, N, frac):
    lo = 4 + 4 / N
    hi = min(2 * 2 * N / (N - 2) if N >= 3 else math.inf, lo + 10)
    pr = Params(N, lo + frac * (hi - lo))
    wmax = max(w for _, w in mix)
    wmin = min(w for _, w in mix)
    r = graded_grid(12 * wmax, 1e-3 * wmin, 1.005)
    u = RadialProfile(N, r, sum(c * np.exp(-((r / w) ** 2)) for c, w in mix), decreasing=True)
    fv = functionals(u, pr)
    K, V, L, p = fv.kinetic, fv.quasi, fv.lp, pr.p
    scale = K + V + L
    assert abs(fv.energy - (K / 2 + V - L / p)) <= 1e-12 * scale
    assert abs(fv.energy - fv.manifold_energy() - 2 * fv.pohozaev / ((p - 2) * N)) <= 1e-12 * scale
    k_sq = functionals(u.with_values(u.values**2, decreasing=False), pr).kinetic
    assert V == pytest.approx(k_sq / 4, rel=1e-8)
    assert fv.sup_norm == u.values[0]
