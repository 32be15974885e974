import csv
import math

import numpy as np
import pytest

from quasiground.curves import (
    CSV_FIELDS,
    SemilinearNorms,
    branch_point,
    branch_structure_report,
    branch_sweep,
    critical_rescale,
    delta_bound_report,
    estimate_a0,
    large_mass_asymptotics,
    large_mass_targets,
    rescale_bar,
    rescale_tilde,
    richardson_sqrt_lambda,
    small_mass_limit_check,
    talenti,
    tau_check,
)
from quasiground.dual_transform import phi_values
from quasiground.radial_field import ParameterError, Params, functionals
from quasiground.shooting import shoot_zero_mass


def test_branch_point_residuals(branch_19_lam1):
    pt = branch_19_lam1
    assert pt.lagrange_ok() and pt.pohozaev_ok()
    assert pt.lagrange_residual <= 1e-6 * pt.lam * pt.a
    assert pt.M > 0 and pt.a > 0


def test_branch_point_energy_on_manifold(branch_19_lam1, p19):
    pt = branch_19_lam1
    fv = functionals(pt.u_profile, p19)
    assert pt.M == pytest.approx(fv.manifold_energy(), rel=1e-6)
    assert pt.sup_norm == pytest.approx(4.5 ** (1 / 7), rel=1e-12)


def test_branch_point_profiles(branch_19_lam1):
    pt = branch_19_lam1
    assert np.array_equal(pt.u_profile.values, phi_values(pt.v_profile.values))
    bare = branch_point(Params(1, 9), 1.0)
    assert bare.v_profile is None and bare.a == pytest.approx(pt.a, rel=1e-14)


@pytest.mark.parametrize(
    "lams",
    [np.geomspace(1e-2, 1e2, 7), np.geomspace(1.0, 10.0, 10), [-1.0] + [1.0] * 7 + [1e4]],
)
def test_sweep_validation(lams):
    with pytest.raises(ParameterError):
        branch_sweep(Params(1, 9), lams)


@pytest.fixture(scope="module")
def table19():
    return branch_sweep(Params(1, 9), np.geomspace(1e-2, 1e2, 8))


def test_small_sweep_monotone(table19):
    rep = table19.monotonicity()
    assert rep.passed, rep.lines()
    assert np.all(np.diff(table19.a) > 0)
    assert np.all(np.diff(table19.lam) < 0)
    assert table19.a_star == math.inf
    assert not table19.failures


def test_branch_csv(table19, tmp_path):
    path = table19.to_csv(tmp_path / "b.csv")
    with path.open() as fh:
        rows = list(csv.reader(fh))
    assert tuple(rows[0]) == CSV_FIELDS
    assert len(rows) == 9
    assert float(rows[1][1]) == table19.points[0].a


def test_delta_report(table19):
    rep = delta_bound_report(table19)
    assert rep.passed
    # ((N-2)p - 4N)/((p-4)N - 4) at N=1, p=9
    assert rep.data["exponent"] == pytest.approx(-13.0)


@pytest.mark.slow
def test_lambda_a_vanishes_N2():
    table = branch_sweep(Params(2, 8), np.geomspace(1e-9, 1.0, 10))
    rep = branch_structure_report(table)
    assert rep.passed, rep.lines()
    la = table.lam * table.a
    assert la[-1] / la[la.size // 2] < 0.1


@pytest.mark.slow
def test_tau_limits_N3():
    # N = 3, p = 8: a* is infinite and the large-mass end approaches the zero-mass solution
    params = Params(3, 8)
    zm = shoot_zero_mass(params, stab_rtol=1e-6)
    assert zm.decay_ok
    table = branch_sweep(params, np.geomspace(1e-7, 1e-4, 8))
    rep = tau_check(table, zm, params)
    assert rep.passed, rep.lines()


def test_richardson_exact_on_quadratics():
    lams = np.array([1e-3, 4e-3, 1.6e-2])
    s = np.sqrt(lams)
    assert richardson_sqrt_lambda(lams, 7.0 - 3.0 * s + 11.0 * s**2) == pytest.approx(7.0, rel=1e-12)
    with pytest.raises(ValueError):
        richardson_sqrt_lambda(lams[:2], [1.0, 2.0])


def test_gates():
    with pytest.raises(ParameterError):
        estimate_a0(Params(4, 6), None, None)
    with pytest.raises(ParameterError):
        tau_check(None, None, Params(1, 9))
    with pytest.raises(ParameterError):
        large_mass_asymptotics(Params(3, 6), None, None)
    with pytest.raises(ParameterError):
        critical_rescale(Params(1, 9), None)


def test_rescalings(branch_19_lam1):
    pt = branch_19_lam1
    lam, p = 16.0, 9.0
    vt = rescale_tilde(pt.v_profile, lam, p)
    ub = rescale_bar(pt.u_profile, lam, p)
    beta = 5 / 14
    assert vt.nodes[-1] == pytest.approx(pt.v_profile.nodes[-1] * lam**beta)
    assert vt.values[0] == pytest.approx(pt.v_profile.values[0] * lam ** (-2 / 7))
    assert ub.values[0] == pytest.approx(pt.u_profile.values[0] * lam ** (-1 / 7))


def test_small_mass_check(p19, free_boundary_19):
    pt = branch_point(p19, 1e3, keep_profile=True)
    chk = small_mass_limit_check(p19, pt, free_boundary_19)
    # rescaled height ratio is phi(alpha)/sqrt(alpha), independent of the rescaling
    assert chk.ratio == pytest.approx(float(phi_values(pt.alpha)) / math.sqrt(pt.alpha), rel=1e-12)
    assert chk.linf_ratio >= 2 ** (-7 / 4) * 0.99
    assert chk.ratio_vs_limit == pytest.approx(2**0.25, rel=0.05)
    assert chk.sup_distance < 0.2
    with pytest.raises(ValueError):
        small_mass_limit_check(p19, branch_point(p19, 1e3), free_boundary_19)


def test_critical_rescale_single_point():
    params = Params(3, 6)
    pt = branch_point(params, 1e-2, keep_profile=True)
    cr = critical_rescale(params, pt)
    assert cr.mu > 0 and math.isfinite(cr.sup_distance)
    assert cr.sup_distance < talenti(0.0)


def test_large_mass_targets_N2():
    tg = large_mass_targets(Params(2, 8), SemilinearNorms(2.0, 3.0))
    # d = 8 for N=2, p=8
    assert tg["slope"] == pytest.approx(-1.5)
    assert tg["prefactor"] == pytest.approx(2.0**1.5)
    assert tg["ratio"] == pytest.approx(8 / 24 * 1.5)


def test_talenti_height():
    assert talenti(0.0) == pytest.approx(1.31607, abs=1e-5)
    assert talenti(0.0) == 3**0.25
