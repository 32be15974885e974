"""The acceptance suite: nine numbered criteria, each a Report with a runtime budget.

Shared by ``tests/test_acceptance.py`` and ``quasiground verify``.
"""

from __future__ import annotations

import logging
import math
import time
from pathlib import Path

import numpy as np
from scipy.integrate import solve_bvp

from . import curves, direct_minimizer, shooting
from .dual_transform import phi_inv, phi_prime_of_u, phi_values
from .fiber_map import FiberPolynomial
from .radial_field import Params, RadialProfile, functionals, graded_grid
from .report import Check, Report, bound_check, relative_check

log = logging.getLogger(__name__)

FIBER_EXAMPLE_ROOT = 1.1192850506  # real root of 5t^3 - 4t^2 - 2, from numpy.roots


def _timed(name: str, budget: float):
    def deco(fn):
        def run(*args, **kwargs) -> Report:
            t0 = time.perf_counter()
            rep = fn(*args, **kwargs)
            elapsed = time.perf_counter() - t0
            rep.name = name
            rep.data["runtime_s"] = elapsed
            rep.add(bound_check("runtime [s]", elapsed, budget))
            return rep

        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run

    return deco


# --------------------------------------------------------------------------
# 1. functional identities


def random_profile(rng, N: int) -> RadialProfile:
    """A smooth decreasing profile: positive combination of 1 to 3 Gaussians."""
    k = int(rng.integers(1, 4))
    widths = rng.uniform(0.5, 2.0, k)
    weights = rng.uniform(0.2, 1.5, k)
    r = graded_grid(12.0 * widths.max(), 1e-3 * widths.min(), 1.005)
    u = sum(w * np.exp(-((r / s) ** 2)) for w, s in zip(weights, widths))
    return RadialProfile(N, r, u, decreasing=True)


def random_params(rng, N: int) -> Params:
    lo = 4 + 4 / N
    hi = min(2 * (2 * N / (N - 2)) if N >= 3 else math.inf, lo + 10)
    return Params(N, float(rng.uniform(lo + 1e-3, hi - 1e-3)))


@_timed("1 functional identities", 10.0)
def criterion_1(n_profiles: int = 100, seed: int = 1) -> Report:
    rng = np.random.default_rng(seed)
    worst_lin, worst_quasi = 0.0, 0.0
    for i in range(n_profiles):
        N = (1, 2, 3, 5)[i % 4]
        params = random_params(rng, N)
        u = random_profile(rng, N)
        fv = functionals(u, params)
        K, V, L, p = fv.kinetic, fv.quasi, fv.lp, params.p
        scale = K + V + L
        errs = [
            fv.energy - (K / 2 + V - L / p),
            fv.pohozaev - (K + (N + 2) * V - (p - 2) * N / (2 * p) * L),
            fv.pohozaev2 - (K + (N + 2) * (N + 1) * V - (p - 2) * N * ((p - 2) * N - 2) / (4 * p) * L),
            fv.energy - fv.manifold_energy() - 2 * fv.pohozaev / ((p - 2) * N),
        ]
        worst_lin = max(worst_lin, max(abs(e) for e in errs) / scale)
        k_sq = functionals(u.with_values(u.values**2, decreasing=False), params).kinetic
        worst_quasi = max(worst_quasi, abs(V - k_sq / 4) / V)
    rep = Report("")
    rep.add(bound_check("linear identities (relative)", worst_lin, 1e-12))
    rep.add(bound_check("quasi = kinetic(u^2)/4 (relative)", worst_quasi, 1e-8))
    return rep


# --------------------------------------------------------------------------
# 2. fiber map


@_timed("2 fiber map", 5.0)
def criterion_2(n_samples: int = 10_000, seed: int = 2) -> Report:
    rng = np.random.default_rng(seed)
    non_unique = not_max = trich = 0
    for _ in range(n_samples):
        N = int(rng.integers(1, 7))
        sigma = float(N + 2 + rng.uniform(0.5, 10.0))
        A, B, C = 10.0 ** rng.uniform(-3, 3, 3)
        poly = FiberPolynomial(A, B, C, sigma, N + 2)
        x = poly.log_critical_point()
        t = math.exp(x)
        if not poly.d2h(t) < 0:
            not_max += 1
        # h' changes sign exactly once on a wide log grid around t_u
        sg = np.sign(poly.log_balance(x + np.linspace(-7.0, 7.0, 241)))
        sg = sg[sg != 0]
        if np.count_nonzero(np.diff(sg)) != 1:
            non_unique += 1
        # P(u) = h'(1): sign(P) > 0 iff t_u > 1
        P = float(poly.dh(1.0))
        if np.sign(P) != np.sign(math.log(t)):
            trich += 1
    ex = FiberPolynomial(1.0, 1.0, 1.0, 5.0, 4).critical_point()
    rep = Report("")
    rep.add(bound_check("non-unique critical points", non_unique, 0))
    rep.add(bound_check("critical points with h''(t_u) >= 0", not_max, 0))
    rep.add(bound_check("trichotomy violations", trich, 0))
    rep.add(Check("example root 5t^3-4t^2-2", ex, FIBER_EXAMPLE_ROOT, 1e-8, abs(ex - FIBER_EXAMPLE_ROOT) <= 1e-8))
    return rep


# --------------------------------------------------------------------------
# 3. dual transform


@_timed("3 dual transform", 1.0)
def criterion_3(n_samples: int = 1000, seed: int = 3) -> Report:
    rng = np.random.default_rng(seed)
    s = 10.0 ** rng.uniform(-6, 6, n_samples) * rng.choice([-1.0, 1.0], n_samples)
    u = phi_values(s)
    dphi = phi_prime_of_u(u)
    rt1 = np.max(np.abs(phi_inv(u) - s) / np.abs(s))
    rt2 = np.max(np.abs(phi_values(phi_inv(u)) - u) / np.abs(u))
    eps = 1e-14
    a, au = np.abs(s), np.abs(u)
    b1 = np.all((dphi > 0) & (dphi <= 1))
    b2 = np.all(au <= np.minimum(a, 2**0.25 * np.sqrt(a)) * (1 + eps))
    prod = u * dphi * s
    b3 = np.all((0.5 * u**2 <= prod * (1 + eps)) & (prod <= u**2 * (1 + eps)))
    b4 = np.all(au * dphi <= 2**-0.5 * (1 + eps))
    big = 1e6
    ub = float(phi_values(big))
    c1 = ub / math.sqrt(big)
    c2 = float(phi_prime_of_u(ub)) * math.sqrt(big)
    rep = Report("")
    rep.add(bound_check("round trip (relative)", max(rt1, rt2), 1e-11))
    rep.add(Check("0 < phi' <= 1", float(dphi.min()), None, None, bool(b1)))
    rep.add(Check("|phi| <= min(|t|, 2^{1/4} sqrt|t|)", float(au.max()), None, None, bool(b2)))
    rep.add(Check("phi^2/2 <= phi phi' t <= phi^2", float(prod.max()), None, None, bool(b3)))
    rep.add(Check("phi phi' <= 2^{-1/2}", float((au * dphi).max()), 2**-0.5, None, bool(b4)))
    rep.add(relative_check("phi(s)/sqrt(s) at 1e6", c1, 2**0.25, 5e-3))
    rep.add(relative_check("phi'(s) sqrt(s) at 1e6", c2, 2**-0.75, 5e-3))
    return rep


# --------------------------------------------------------------------------
# 4. shooting correctness


def collocation_alpha(p: float, lam: float, length: float = 30.0) -> float:
    """v(0) of the N = 1 dual ground state by collocation on [0, L].

    Boundary conditions: v'(0) = 0 and the linearised decay v' = -sqrt(lam) v at L.
    """
    k = math.sqrt(lam)

    def fun(r, y):
        u = phi_values(y[0])
        return np.vstack([y[1], -(np.abs(u) ** (p - 2) - lam) * u * phi_prime_of_u(u)])

    def bc(ya, yb):
        return np.array([ya[1], yb[1] + k * yb[0]])

    r = np.linspace(0.0, length / k, 400)
    guess_height = 1.5
    y0 = np.vstack([guess_height / np.cosh(k * r), -guess_height * k * np.tanh(k * r) / np.cosh(k * r)])
    sol = solve_bvp(fun, bc, r, y0, tol=1e-10, max_nodes=200_000)
    if not sol.success:
        raise RuntimeError(f"collocation failed: {sol.message}")
    return float(sol.sol(0.0)[0])


def sech_ground_state(p: float, x):
    """W(x) = ((p/2) sech^2((p-2)x/2))^{1/(p-2)}, the N = 1 semilinear ground state."""
    x = np.asarray(x, dtype=float)
    e = np.exp(-(p - 2) * np.abs(x))  # sech^2(y) = 4e^{-2|y|} / (1 + e^{-2|y|})^2
    return ((p / 2) * 4 * e / (1 + e) ** 2) ** (1 / (p - 2))


def sech_residual(p: float, x) -> float:
    """sup |W'' - W + W^{p-1}| with W'' written out analytically."""
    x = np.asarray(x, dtype=float)
    k = 2 / (p - 2)
    b = (p - 2) / 2
    A = (p / 2) ** (1 / (p - 2))
    sech = 1 / np.cosh(b * x)
    W = A * sech**k
    W2 = A * k * b**2 * sech**k * (k - (k + 1) * sech**2)
    return float(np.max(np.abs(W2 - W + W ** (p - 1))))


@_timed("4 shooting correctness", 30.0)
def criterion_4() -> Report:
    rep = Report("")
    p9 = Params(1, 9)
    traj = shooting.shoot_dual(p9, 1.0)
    a_bvp = collocation_alpha(9.0, 1.0)
    rep.add(Check("dual alpha vs collocation", traj.alpha, a_bvp, 1e-6, abs(traj.alpha - a_bvp) <= 1e-6))

    W = shooting.shoot_semilinear(p9)
    x = np.linspace(0, 12, 3001)
    res = sech_residual(9.0, x)
    rep.add(bound_check("sech ansatz ODE residual", res, 1e-10))
    nodes = W.profile.nodes
    sel = nodes <= 12
    dist = float(np.max(np.abs(W.profile.values[sel] - sech_ground_state(9.0, nodes[sel]))))
    rep.add(bound_check("W vs sech ansatz (sup)", dist, 1e-6))

    N, alpha = 3, 3**0.25
    talenti = shooting.integrate_radial_ivp(N, lambda v: abs(v) ** 4 * v, alpha, 10.0)
    prof = talenti.profile
    d_t = float(np.max(np.abs(prof.values - curves.talenti(prof.nodes))))
    rep.add(bound_check("Talenti bubble (sup on [0,10])", d_t, 1e-6))
    return rep


# --------------------------------------------------------------------------
# 5. branch structure


@_timed("5 branch structure", 600.0)
def criterion_5(jobs: int = 1, out_dir: Path | None = None) -> Report:
    rep = Report("")
    p9 = Params(1, 9)
    table = curves.branch_sweep(p9, np.geomspace(1e-2, 1e3, 25), jobs=jobs)
    srep = curves.branch_structure_report(table)
    for c in srep.checks:
        c.name = "N=1 p=9: " + c.name
        rep.add(c)
    p5 = Params(5, 6)
    zm = shooting.shoot_zero_mass(p5)
    table5 = curves.branch_sweep(p5, np.geomspace(1e-5, 1e-1, 9), jobs=jobs, zero_mass=zm)
    est = curves.estimate_a0(p5, table5, zm)
    for c in est.report.checks:
        c.name = "N=5 p=6: " + c.name
        rep.add(c)
    rep.data.update({"a0": zm.a0, "a0_extrapolated": est.extrapolated, "I_u0": est.energy_u0})
    if out_dir is not None:
        table.to_csv(Path(out_dir) / "branch_N1_p9.csv")
        table5.to_csv(Path(out_dir) / "branch_N5_p6.csv")
    return rep


# --------------------------------------------------------------------------
# 6. small-mass limits


@_timed("6 small-mass limits", 300.0)
def criterion_6() -> Report:
    rep = Report("")
    p9 = Params(1, 9)
    fb = shooting.shoot_free_boundary(p9)
    checks = []
    for lam in (1e2, 1e3, 1e4):
        pt = curves.branch_point(p9, lam, keep_profile=True)
        checks.append(curves.small_mass_limit_check(p9, pt, fb))
    series = curves.small_mass_series_report(checks)
    for c in series.checks:
        rep.add(c)
    closed = shooting.free_boundary_alpha_1d(9.0)
    rep.add(Check("free-boundary alpha vs closed form", fb.alpha, closed, 1e-8, abs(fb.alpha - closed) <= 1e-8 * closed))
    floor = 2 ** ((2 - 9) / 4) * (1 - 1e-2)
    worst = min(c.linf_ratio for c in checks)
    rep.add(bound_check("liminf |v|_inf^{(p-2)/2}/lambda", worst, floor, upper=False))
    rep.data.update({
        "ratio_vs_limit_profile": [c.ratio_vs_limit for c in checks],
        "ratio": [c.ratio for c in checks],
        "sup_distance": [c.sup_distance for c in checks],
    })
    return rep


# --------------------------------------------------------------------------
# 7. large-mass asymptotics


@_timed("7 large-mass asymptotics", 300.0)
def criterion_7(jobs: int = 1) -> Report:
    rep = Report("")
    for N, p in ((1, 9), (2, 8)):
        params = Params(N, p)
        W = curves.SemilinearNorms.from_trajectory(shooting.shoot_semilinear(params), params)
        table = curves.branch_sweep(params, np.geomspace(1e-12, 1e-9, 8), jobs=jobs, check_span=False)
        sub = curves.large_mass_asymptotics(params, table, W)
        for c in sub.checks:
            c.name = f"N={N} p={p}: " + c.name
            rep.add(c)
    return rep


# --------------------------------------------------------------------------
# 8. min-max oracle


@_timed("8 min-max oracle agreement", 900.0)
def criterion_8(lambdas=(0.1, 1.0, 10.0)) -> Report:
    rep = Report("")
    for N, p in ((1, 9), (2, 8)):
        params = Params(N, p)
        for lam in lambdas:
            pt = curves.branch_point(params, lam)
            res = direct_minimizer.minimize_reduced(params, pt.a, direct_minimizer.gaussian_init(N, pt.a))
            tag = f"N={N} p={p} a={pt.a:.5g}"
            rep.add(relative_check(f"{tag}: M_hat vs branch M", res.M_hat, pt.M, 1e-2))
            rep.add(bound_check(f"{tag}: M_hat not below M", (pt.M - res.M_hat) / abs(pt.M), 1e-6))
    return rep


# --------------------------------------------------------------------------
# 9. uniqueness hypotheses


@_timed("9 uniqueness hypotheses", 1.0)
def criterion_9() -> Report:
    rep = Report("")
    for N, p in ((5, 5.0), (3, 6.0), (1, 9.0)):
        u = shooting.check_uniqueness_hypotheses(Params(N, p))
        rep.add(Check(f"p={p:g}: f(sqrt(2)/2) == 0", u.f_at_b, 0.0, 0.0, u.f_at_b == 0.0))
        rep.add(Check(f"p={p:g}: g non-increasing", float(u.g_samples[:, 1].min()), None, None, u.g_monotone))
        rep.add(relative_check(f"p={p:g}: g(1e6 b)", u.g_limit, (p - 2) / 2, 1e-3))
    return rep


CRITERIA = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
}


def summary_line(number: int, rep: Report) -> str:
    status = "PASS" if rep.passed else "FAIL"
    return f"criterion {number}: {status}  {rep.name}  ({rep.data.get('runtime_s', math.nan):.1f} s)"


def run_acceptance(selected=None, jobs: int = 1, out_dir=None, echo=print) -> dict[int, Report]:
    out = Path(out_dir) if out_dir is not None else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
    reports = {}
    for k in selected or sorted(CRITERIA):
        fn = CRITERIA[k]
        if k == 5:
            rep = fn(jobs=jobs, out_dir=out)
        elif k == 7:
            rep = fn(jobs=jobs)
        else:
            rep = fn()
        reports[k] = rep
        if echo is not None:
            echo(summary_line(k, rep))
            for line in rep.lines():
                echo("    " + line)
        if out is not None:
            rep.write_json(out / f"criterion_{k}.json")
    return reports
