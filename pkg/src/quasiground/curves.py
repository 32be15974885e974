"""The ground-state branch lambda -> (a, M) and the limit regimes along it.

The branch is parametrised by the frequency: each lambda gives one shooting
solution, whose mass ``a`` and energy ``M`` are read off.  Sorting by ``a``
then exposes monotonicity, the small-mass and large-mass asymptotics and the
threshold ``a0`` in dimension N >= 5.
"""

from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path

import numpy as np

from .dual_transform import ConvergenceError, phi_values
from .radial_field import (
    ParameterError,
    Params,
    RadialProfile,
    delta_exponent,
    functionals,
)
from .report import Check, Report, bound_check, relative_check
from .shooting import (
    DEFAULT_OPTIONS,
    FreeBoundarySolution,
    ShootingOptions,
    Trajectory,
    ZeroMassResult,
    shoot_dual,
)

log = logging.getLogger(__name__)

CSV_FIELDS = (
    "lambda",
    "a",
    "M",
    "kinetic",
    "quasi",
    "lp",
    "sup_norm",
    "lagrange_residual",
    "pohozaev_residual",
)
TALENTI_HEIGHT = 3.0**0.25


@dataclass
class BranchPoint:
    lam: float
    a: float
    M: float
    kinetic: float
    quasi: float
    lp: float
    sup_norm: float
    lagrange_residual: float  # |lam a - (lp - kinetic - 4 quasi)|
    pohozaev_residual: float  # |P(u)|
    alpha: float = math.nan
    v_profile: RadialProfile | None = field(default=None, repr=False, compare=False)
    u_profile: RadialProfile | None = field(default=None, repr=False, compare=False)

    def lagrange_ok(self, tol: float = 1e-4) -> bool:
        return self.lagrange_residual <= tol * self.lam * self.a

    def pohozaev_ok(self, tol: float = 1e-4) -> bool:
        return self.pohozaev_residual <= tol * self.kinetic

    def row(self) -> list[float]:
        return [self.lam, self.a, self.M, self.kinetic, self.quasi, self.lp, self.sup_norm,
                self.lagrange_residual, self.pohozaev_residual]


def branch_point(
    params: Params,
    lam: float,
    opts: ShootingOptions = DEFAULT_OPTIONS,
    keep_profile: bool = False,
) -> BranchPoint:
    """Solve at one frequency and evaluate the functionals of ``u = phi(v)``."""
    traj = shoot_dual(params, lam, opts)
    v = traj.profile
    u = v.with_values(phi_values(v.values))
    fv = functionals(u, params)
    lagrange = abs(lam * fv.mass - (fv.lp - fv.kinetic - 4 * fv.quasi))
    return BranchPoint(
        lam=lam,
        a=fv.mass,
        M=fv.energy,
        kinetic=fv.kinetic,
        quasi=fv.quasi,
        lp=fv.lp,
        sup_norm=fv.sup_norm,
        lagrange_residual=lagrange,
        pohozaev_residual=abs(fv.pohozaev),
        alpha=traj.alpha,
        v_profile=v if keep_profile else None,
        u_profile=u if keep_profile else None,
    )


@dataclass
class BranchTable:
    params: Params
    points: list  # BranchPoint, sorted by a
    a_star: float
    tau_estimates: dict
    failures: list = field(default_factory=list)

    @property
    def a(self) -> np.ndarray:
        return np.array([pt.a for pt in self.points])

    @property
    def M(self) -> np.ndarray:
        return np.array([pt.M for pt in self.points])

    @property
    def lam(self) -> np.ndarray:
        return np.array([pt.lam for pt in self.points])

    def to_csv(self, path) -> Path:
        path = Path(path)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_FIELDS)
            for pt in self.points:
                w.writerow([f"{x:.17g}" for x in pt.row()])
        return path

    def monotonicity(self, slack: float = 1e-6) -> Report:
        """M decreasing in a (restricted to a <= a* when a* is finite)."""
        rep = Report("branch-monotonicity")
        pts = [pt for pt in self.points if not math.isfinite(self.a_star) or pt.a <= self.a_star]
        M = np.array([pt.M for pt in pts])
        dM = np.diff(M)
        worst = float(np.max(dM / np.abs(M[:-1]))) if dM.size else -math.inf
        rep.add(bound_check("M strictly decreasing in a", worst, 0.0, note="max relative increase"))
        rep.add(bound_check("M decreasing up to slack", worst, slack))
        rep.add(bound_check("all points pass residual gates", float(self.gate_failures()), 0.0))
        rep.data["a"] = [pt.a for pt in pts]
        rep.data["M"] = M.tolist()
        return rep

    def gate_failures(self, tol: float = 1e-4) -> int:
        return sum(not (pt.lagrange_ok(tol) and pt.pohozaev_ok(tol)) for pt in self.points)


def _lambda_span_ok(lambdas) -> None:
    lam = np.asarray(lambdas, dtype=float)
    if lam.size < 8 or np.any(lam <= 0):
        raise ParameterError("a sweep needs at least 8 positive lambda values")
    if math.log10(lam.max() / lam.min()) < 3 - 1e-12:
        raise ParameterError("a sweep must span at least 3 decades of lambda")


def _safe_point(params, opts, keep_profile, lam):
    try:
        return branch_point(params, lam, opts, keep_profile)
    except (ConvergenceError, ValueError) as exc:
        return exc


def branch_sweep(
    params: Params,
    lambdas,
    opts: ShootingOptions = DEFAULT_OPTIONS,
    jobs: int = 1,
    zero_mass: ZeroMassResult | None = None,
    keep_profiles: bool = False,
    check_span: bool = True,
) -> BranchTable:
    """Branch points for every lambda, sorted by mass.

    Failed points are skipped with a warning; fewer than 80% successes is an error.
    """
    lambdas = [float(x) for x in lambdas]
    if check_span:
        _lambda_span_ok(lambdas)
    work = partial(_safe_point, params, opts, keep_profiles)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(work, lambdas))
    else:
        results = [work(lam) for lam in lambdas]
    points, failures = [], []
    for lam, res in zip(lambdas, results):
        if isinstance(res, Exception):
            log.warning("branch point at lambda=%g failed: %s", lam, res)
            failures.append((lam, str(res)))
        else:
            points.append(res)
    if len(points) < 0.8 * len(lambdas):
        raise ConvergenceError(f"only {len(points)} of {len(lambdas)} branch points succeeded")
    points.sort(key=lambda pt: (pt.a, pt.lam))

    if params.N <= 4:
        a_star = math.inf
    else:
        a_star = zero_mass.a0 if zero_mass is not None else math.nan
    # observed values at the large-mass end
    tail = points[-1]
    tau = {"tau1": tail.kinetic, "tau2": tail.quasi, "tau3": tail.lp}
    return BranchTable(params, points, a_star, tau, failures)


def branch_structure_report(table: BranchTable, min_decades: float = 3.0) -> Report:
    """Monotonicity, residual gates and the lambda -> infinity / lambda a -> 0 trends."""
    rep = table.monotonicity()
    rep.name = "branch-structure"
    lam = table.lam
    # as a decreases lambda must grow past every sampled bound
    lam_by_a = lam  # already sorted by a
    rep.add(Check(
        "lambda increases as a decreases",
        float(np.max(np.diff(lam_by_a))) if lam.size > 1 else math.nan,
        0.0,
        None,
        bool(np.all(np.diff(lam_by_a) < 0)),
    ))
    decades = math.log10(lam.max() / lam.min())
    rep.add(bound_check("lambda range in decades", decades, min_decades, upper=False))
    N, p = table.params.N, table.params.p
    if N <= 3 and p < table.params.two_star:
        la = lam * table.a
        mid = la[la.size // 2]
        rep.add(bound_check("lambda*a at largest a over mid-branch", la[-1] / mid, 0.1))
        rep.add(Check("lambda*a decreasing at large-a end", float(la[-1]), None, None, bool(np.all(np.diff(la[-3:]) < 0))))
    rep.data["lambda"] = lam.tolist()
    return rep


# --------------------------------------------------------------------------
# extrapolation to lambda -> 0 (N >= 5)


def richardson_sqrt_lambda(lams, values) -> float:
    """Value at lambda = 0 of the quadratic in sqrt(lambda) through three points."""
    s = np.sqrt(np.asarray(lams, dtype=float))
    y = np.asarray(values, dtype=float)
    if s.size != 3:
        raise ValueError("three-point extrapolation needs exactly three samples")
    V = np.vander(s, 3)
    return float(np.linalg.solve(V, y)[-1])


@dataclass
class A0Estimate:
    extrapolated: float
    a0_zero_mass: float
    rel_diff: float
    M_extrapolated: float
    energy_u0: float
    M_rel_diff: float
    truncation_flag: bool
    report: Report


def zero_mass_energy(zm: ZeroMassResult, params: Params) -> float:
    """I(u0) with the analytic tail beyond the truncation radius."""
    fv = functionals(zm.u0, params)
    t = zm.tails
    return (fv.kinetic + t["kinetic"]) / 2 + fv.quasi + t["quasi"] - (fv.lp + t["lp"]) / params.p


def estimate_a0(params: Params, table: BranchTable, zero_mass: ZeroMassResult, tol: float = 0.01) -> A0Estimate:
    """Extrapolate a(lambda) and M(lambda) to lambda -> 0+ and compare with the zero-mass solution."""
    if params.N < 5:
        raise ParameterError("a0 is finite only for N >= 5")
    lam = table.lam
    if lam.min() > 1e-3:
        raise ParameterError("the table must reach lambda <= 1e-3 to extrapolate a0")
    idx = np.argsort(lam)[:3]
    a_ext = richardson_sqrt_lambda(lam[idx], table.a[idx])
    M_ext = richardson_sqrt_lambda(lam[idx], table.M[idx])
    e0 = zero_mass_energy(zero_mass, params)
    rel = abs(a_ext - zero_mass.a0) / zero_mass.a0
    relM = abs(M_ext - e0) / abs(e0)
    rep = Report("a0-extrapolation")
    rep.add(relative_check("a(0+) vs a0", a_ext, zero_mass.a0, tol))
    rep.add(relative_check("M(0+) vs I(u0)", M_ext, e0, tol))
    rep.data.update({"lambdas": lam[idx].tolist(), "a": table.a[idx].tolist(), "M": table.M[idx].tolist()})
    flag = rel > 0.05
    if flag:
        log.warning("a(0+) differs from a0 by %.1f%%: branch truncated too early", 100 * rel)
    return A0Estimate(a_ext, zero_mass.a0, rel, M_ext, e0, relM, flag, rep)


def tau_check(table: BranchTable, zero_mass: ZeroMassResult, params: Params, tol: float = 0.02) -> Report:
    """Tail values of (kinetic, V, L^p) against those of u0, for N=3, p in (6,12) or N=4, p in (5,8)."""
    N, p = params.N, params.p
    if not ((N == 3 and 6 < p < 12) or (N == 4 and 5 < p < 8)):
        raise ParameterError("tau limits are pinned down only for N=3, 6<p<12 and N=4, 5<p<8")
    fv = functionals(zero_mass.u0, params)
    t = zero_mass.tails
    targets = {"tau1": fv.kinetic + t["kinetic"], "tau2": fv.quasi + t["quasi"], "tau3": fv.lp + t["lp"]}
    rep = Report("tau-limits")
    for key, target in targets.items():
        rep.add(relative_check(key, table.tau_estimates[key], target, tol))
    return rep


def delta_bound_report(table: BranchTable) -> Report:
    """log V - delta_exponent * log a stays bounded below along the branch."""
    N, p = table.params.N, table.params.p
    e = delta_exponent(N, p)
    c = np.log([pt.quasi for pt in table.points]) - e * np.log(table.a)
    rep = Report("delta-lower-bound")
    rep.add(Check("min of log V - e log a", float(c.min()), None, None, bool(np.all(np.isfinite(c)))))
    rep.data.update({"exponent": e, "constants": c.tolist(), "spread": float(c.max() - c.min())})
    return rep


# --------------------------------------------------------------------------
# small-mass limit (large lambda)


def rescale_tilde(v: RadialProfile, lam: float, p: float) -> RadialProfile:
    """v~(x) = lam^{-2/(p-2)} v(x / lam^{(p-4)/(2(p-2))})."""
    beta = (p - 4) / (2 * (p - 2))
    return RadialProfile(v.N, v.nodes * lam**beta, lam ** (-2 / (p - 2)) * v.values)


def rescale_bar(u: RadialProfile, lam: float, p: float) -> RadialProfile:
    """u_bar(x) = lam^{-1/(p-2)} u(x / lam^{(p-4)/(2(p-2))})."""
    beta = (p - 4) / (2 * (p - 2))
    return RadialProfile(u.N, u.nodes * lam**beta, lam ** (-1 / (p - 2)) * u.values)


@dataclass
class SmallMassCheck:
    lam: float
    sup_distance: float  # |v~_lam - v~| on [0, 0.9 R]
    ratio: float  # u_bar(0) / sqrt(v~_lam(0))
    ratio_vs_limit: float  # u_bar(0) / sqrt(v~(0)) with the free-boundary v~
    linf_ratio: float  # |v_lam|_inf^{(p-2)/2} / lam
    u_linf_ratio: float  # |u_lam|_inf^{p-2} / lam
    report: Report


def small_mass_limit_check(params: Params, point: BranchPoint, fb: FreeBoundarySolution, tol: float = 0.01) -> SmallMassCheck:
    if point.v_profile is None or point.u_profile is None:
        raise ValueError("small-mass check needs a branch point computed with keep_profile=True")
    p, lam = params.p, point.lam
    vt = rescale_tilde(point.v_profile, lam, p)
    ub = rescale_bar(point.u_profile, lam, p)
    r = np.linspace(0.0, 0.9 * fb.R, 2001)
    dist = float(np.max(np.abs(vt(r) - fb.v_tilde(r))))
    ratio = ub.values[0] / math.sqrt(vt.values[0])
    ratio_lim = ub.values[0] / math.sqrt(fb.v_tilde.values[0])
    vinf = float(np.max(point.v_profile.values))
    linf = vinf ** ((p - 2) / 2) / lam
    u_linf = point.sup_norm ** (p - 2) / lam
    rep = Report(f"small-mass lambda={lam:g}")
    rep.add(Check("sup distance to free-boundary profile", dist))
    rep.add(relative_check("u_bar(0)/sqrt(v~_lam(0))", ratio, 2**0.25, tol))
    rep.add(relative_check("u_bar(0)/sqrt(v~(0)) (limit profile)", ratio_lim, 2**0.25, tol))
    rep.add(bound_check("|v|_inf^{(p-2)/2}/lambda lower bound", linf, 2 ** ((2 - p) / 4) * (1 - 1e-2), upper=False))
    return SmallMassCheck(lam, dist, ratio, ratio_lim, linf, u_linf, rep)


def small_mass_series_report(checks: list[SmallMassCheck], tol: float = 0.01) -> Report:
    """Convergence as monotone improvement across increasing lambda."""
    checks = sorted(checks, key=lambda c: c.lam)
    d = [c.sup_distance for c in checks]
    rep = Report("small-mass-limit")
    rep.add(Check("sup distance strictly decreasing in lambda", d[-1], None, None, bool(np.all(np.diff(d) < 0))))
    last = checks[-1]
    rep.add(relative_check(f"u_bar(0)/sqrt(v~_lam(0)) at lambda={last.lam:g}", last.ratio, 2**0.25, tol))
    rep.data.update({
        "lambda": [c.lam for c in checks],
        "sup_distance": d,
        "ratio": [c.ratio for c in checks],
        "ratio_vs_limit": [c.ratio_vs_limit for c in checks],
        "u_linf_ratio": [c.u_linf_ratio for c in checks],
    })
    return rep


# --------------------------------------------------------------------------
# large-mass asymptotics (small lambda)


@dataclass
class SemilinearNorms:
    mass: float
    kinetic: float

    @classmethod
    def from_trajectory(cls, traj: Trajectory, params: Params) -> SemilinearNorms:
        fv = functionals(traj.profile, params)
        return cls(fv.mass, fv.kinetic)


def large_mass_targets(params: Params, W: SemilinearNorms) -> dict:
    N, p = params.N, params.p
    d = (p - 2) * N - 4
    return {
        "slope": -2 * (p - 2) / d,
        "prefactor": W.mass ** (2 * (p - 2) / d),  # |W|_2^{4(p-2)/d}
        "ratio": d / (2 * (p - 2) * N) * W.kinetic / W.mass,
    }


def large_mass_asymptotics(
    params: Params,
    table: BranchTable,
    W: SemilinearNorms,
    slope_tol: float = 0.02,
    prefactor_tol: float = 0.03,
    ratio_tol: float = 0.02,
) -> Report:
    """Power law of lambda against a, its prefactor, and M/(lambda a), in the small-lambda regime."""
    N, p = params.N, params.p
    if not (N <= 3 and params.mass_critical < p < params.two_star):
        raise ParameterError("large-mass asymptotics need 1 <= N <= 3 and 4+4/N < p < 2*")
    tg = large_mass_targets(params, W)
    x, y = np.log(table.a), np.log(table.lam)
    slope, icpt = np.polyfit(x, y, 1)
    resid = y - (slope * x + icpt)
    r2 = 1 - np.sum(resid**2) / np.sum((y - y.mean()) ** 2)
    # prefactor and ratio read off at the smallest lambda
    k = int(np.argmin(table.lam))
    pt = table.points[k]
    prefactor = pt.lam * pt.a ** (-tg["slope"])
    ratio = pt.M / (pt.lam * pt.a)
    rep = Report(f"large-mass N={N} p={p:g}")
    rep.add(relative_check("log-log slope lambda vs a", slope, tg["slope"], slope_tol))
    rep.add(relative_check("prefactor", prefactor, tg["prefactor"], prefactor_tol))
    rep.add(relative_check("M/(lambda a)", ratio, tg["ratio"], ratio_tol))
    rep.add(bound_check("fit R^2", r2, 0.999, upper=False))
    rep.data.update({"lambda_min": pt.lam, "W_mass": W.mass, "W_kinetic": W.kinetic})
    return rep


# --------------------------------------------------------------------------
# critical exponent N = 3, p = 6


def talenti(r):
    return TALENTI_HEIGHT / np.sqrt(1.0 + np.asarray(r, dtype=float) ** 2)


@dataclass
class CriticalRescale:
    lam: float
    mu: float
    sup_distance: float


def critical_rescale(params: Params, point: BranchPoint, r_max: float = 5.0) -> CriticalRescale:
    """mu = (U(0)/u(0))^2 and the distance of mu^{1/2} u(mu x) to the Talenti bubble on [0, r_max]."""
    if not (params.N == 3 and params.p == 6):
        raise ParameterError("critical rescaling applies to N=3, p=6 only")
    if point.u_profile is None:
        raise ValueError("critical rescaling needs keep_profile=True")
    u = point.u_profile
    mu = (TALENTI_HEIGHT / u.values[0]) ** 2
    w = RadialProfile(3, u.nodes / mu, math.sqrt(mu) * u.values)
    r = np.linspace(0.0, r_max, 2001)
    return CriticalRescale(point.lam, mu, float(np.max(np.abs(w(r) - talenti(r)))))


def critical_series_report(items: list[CriticalRescale], lo: float = -0.30, hi: float = -0.20) -> Report:
    items = sorted(items, key=lambda c: c.lam)
    lam = np.array([c.lam for c in items])
    mu = np.array([c.mu for c in items])
    slope = float(np.polyfit(np.log(lam), np.log(mu), 1)[0])
    d = [c.sup_distance for c in items]
    rep = Report("critical-rescale")
    rep.add(Check("mu exponent vs lambda", slope, -0.25, None, bool(lo <= slope <= hi)))
    # d listed by increasing lambda: decreasing lambda must shrink the distance
    rep.add(Check("sup distance decreasing as lambda decreases", d[0], None, None, bool(np.all(np.diff(d) > 0))))
    rep.data.update({"lambda": lam.tolist(), "mu": mu.tolist(), "sup_distance": d})
    return rep
