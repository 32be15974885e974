"""Radial shooting for the dual, semilinear, zero-mass and free-boundary problems.

Every target has the form

    v'' + (N-1)/r v' + rhs(v) = 0,    v(0) = alpha, v'(0) = 0,

and is solved by bisection on ``alpha`` between a trajectory that crosses
zero (alpha too large) and one that turns back up while still positive
(alpha too small).  Integration uses scipy's DOP853 with event location.
"""

from __future__ import annotations

import enum
import json
import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .dual_transform import ConvergenceError, ScalarPhi, phi_inv, phi_values
from .radial_field import ParameterError, Params, RadialProfile, functionals, graded_grid, sphere_area

log = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)
B_ZERO = 1.0 / SQRT2  # zero of the free-boundary nonlinearity


class NoGroundStateError(ConvergenceError):
    """Bisection could not bracket a decaying solution."""


class Outcome(enum.Enum):
    DECAY = "decay"
    CROSSING = "crossing"
    TURNING = "turning"
    TRUNCATED = "truncated"


@dataclass(frozen=True)
class ShootingOptions:
    rtol: float = 1e-12
    atol: float = 1e-15  # relative to alpha
    start_offset: float = 1e-6  # relative to the length scale
    grid_h0: float = 1e-3  # first grid spacing, relative to the length scale
    grid_growth: float = 1.0025
    eps_decay: float = 1e-10
    tail_window: int = 20
    bisect_rtol: float = 4e-16
    separation_tol: float = 1e-3
    alpha_min: float = 1e-6
    alpha_max: float = 1e12

    def refined(self) -> ShootingOptions:
        """Same options with integrator tolerances halved."""
        return replace(self, rtol=self.rtol / 2, atol=self.atol / 2)


DEFAULT_OPTIONS = ShootingOptions()


@dataclass
class Trajectory:
    profile: RadialProfile
    outcome: Outcome
    alpha: float
    derivative_at_end: float
    r_event: float | None = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def r_cross(self) -> float | None:
        return self.r_event if self.outcome is Outcome.CROSSING else None

    @property
    def r_turn(self) -> float | None:
        return self.r_event if self.outcome is Outcome.TURNING else None


# --------------------------------------------------------------------------
# single initial-value problem


@dataclass
class _Run:
    outcome: Outcome
    alpha: float
    r0: float
    r_end: float
    v_end: float
    dv_end: float
    sol: object  # OdeSolution or None
    steps: np.ndarray
    values: np.ndarray


def _integrate(N, rhs, alpha, r_max, length, opts, dense=False) -> _Run:
    f0 = rhs(alpha)
    r0 = opts.start_offset * length
    if f0 < 0:
        # v increases away from the origin: turning point at r = 0
        return _Run(Outcome.TURNING, alpha, 0.0, 0.0, alpha, 0.0, None, np.zeros(1), np.array([alpha]))
    if f0 == 0:
        # equilibrium: v stays at alpha all the way out
        return _Run(Outcome.TRUNCATED, alpha, r0, r_max, alpha, 0.0, None, np.array([r0, r_max]), np.array([alpha, alpha]))
    v0 = alpha - f0 * r0**2 / (2 * N)
    w0 = -f0 * r0 / N

    def deriv(r, y):
        return [y[1], -rhs(y[0]) - (N - 1) * y[1] / r]

    def crossing(r, y):
        return y[0]

    def turning(r, y):
        return y[1]

    def blowup(r, y):
        return abs(y[0]) - 1e6 * alpha

    crossing.terminal, crossing.direction = True, -1
    turning.terminal, turning.direction = True, 1
    blowup.terminal = True

    sol = solve_ivp(
        deriv,
        (r0, r_max),
        [v0, w0],
        method="DOP853",
        rtol=opts.rtol,
        atol=opts.atol * alpha,
        events=(crossing, turning, blowup),
        dense_output=dense,
    )
    if len(sol.t_events[0]):
        outcome, r_end = Outcome.CROSSING, float(sol.t_events[0][0])
        v_end, dv_end = 0.0, float(sol.y_events[0][0][1])
    elif len(sol.t_events[1]):
        outcome, r_end = Outcome.TURNING, float(sol.t_events[1][0])
        v_end, dv_end = float(sol.y_events[1][0][0]), 0.0
        if v_end < 0:
            # crossing and turning fell in one step and only the turning was located
            outcome = Outcome.CROSSING
    else:
        outcome, r_end = Outcome.TRUNCATED, float(sol.t[-1])
        v_end, dv_end = float(sol.y[0, -1]), float(sol.y[1, -1])
        tail = sol.y[0, -opts.tail_window :]
        if (
            sol.status == 0
            and abs(v_end) < opts.eps_decay * alpha
            and tail.size >= 2
            and np.all(np.diff(tail) <= 0)
        ):
            outcome = Outcome.DECAY
    return _Run(outcome, alpha, r0, r_end, v_end, dv_end, sol.sol if dense else None, sol.t, sol.y[0])


def _sample(run: _Run, N, rhs, nodes) -> np.ndarray:
    # series start inside r0, and wherever no integration was done
    vals = run.alpha - rhs(run.alpha) * nodes**2 / (2 * N)
    outer = nodes >= run.r0
    if run.sol is not None and np.any(outer):
        vals[outer] = run.sol(np.clip(nodes[outer], run.r0, run.r_end))[0]
    return vals


def integrate_radial_ivp(
    N: int,
    rhs: Callable[[float], float],
    alpha: float,
    r_max: float,
    opts: ShootingOptions = DEFAULT_OPTIONS,
    length_scale: float = 1.0,
) -> Trajectory:
    """Integrate ``v'' + (N-1)/r v' + rhs(v) = 0`` from ``v(0) = alpha`` and classify it."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    run = _integrate(N, rhs, alpha, r_max, length_scale, opts, dense=True)
    r_end = max(run.r_end, 3 * opts.grid_h0 * length_scale)
    nodes = graded_grid(r_end, opts.grid_h0 * length_scale, opts.grid_growth)
    vals = _sample(run, N, rhs, nodes)
    if run.outcome is Outcome.CROSSING:
        vals[-1] = 0.0
    return Trajectory(
        RadialProfile(N, nodes, vals),
        run.outcome,
        alpha,
        run.dv_end,
        run.r_end if run.outcome in (Outcome.CROSSING, Outcome.TURNING) else None,
        {"steps": int(run.steps.size)},
    )


# --------------------------------------------------------------------------
# bisection machinery


def _too_large(run: _Run) -> bool | None:
    if run.outcome is Outcome.CROSSING:
        return True
    if run.outcome is Outcome.TURNING:
        return False
    return None


def _bisect(classify, lo, hi, rtol, max_iter=400):
    """Shrink [lo, hi] with classify(lo) False and classify(hi) True."""
    for _ in range(max_iter):
        if hi - lo <= rtol * hi:
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if classify(mid):
            hi = mid
        else:
            lo = mid
    return lo, hi


class _Shooter:
    """Classification of alpha for one right-hand side, extending r_max on demand."""

    def __init__(self, N, rhs, r_max, length, opts):
        self.N, self.rhs, self.r_max, self.length, self.opts = N, rhs, r_max, length, opts

    def run(self, alpha, dense=False) -> _Run:
        for _ in range(12):
            run = _integrate(self.N, self.rhs, alpha, self.r_max, self.length, self.opts, dense)
            if run.outcome is not Outcome.TRUNCATED and run.outcome is not Outcome.DECAY:
                return run
            self.r_max *= 2
        return run

    def classify(self, alpha) -> bool:
        verdict = _too_large(self.run(alpha))
        if verdict is None:
            raise ConvergenceError(f"trajectory at alpha={alpha} neither crossed nor turned")
        return verdict

    def bracket(self, guess):
        o = self.opts
        hi = guess
        while not self.classify(hi):
            hi *= 2
            if hi > o.alpha_max:
                raise NoGroundStateError("no crossing witness below alpha_max")
        lo = min(guess, hi / 2)
        while self.classify(lo):
            lo /= 2
            if lo < o.alpha_min:
                raise NoGroundStateError("no turning witness above alpha_min")
        return lo, hi


def _decaying_profile(shooter: _Shooter, lo, hi, kappa):
    """Profile of the decaying solution from the two bracketing trajectories.

    The mean of the turning and crossing trajectories is kept while they
    agree to ``separation_tol``; past that point the linearised tail
    ``c r^{-(N-1)/2} exp(-kappa r)`` is appended.
    """
    N, rhs, opts, L = shooter.N, shooter.rhs, shooter.opts, shooter.length
    run_lo = shooter.run(lo, dense=True)
    run_hi = shooter.run(hi, dense=True)
    alpha = 0.5 * (lo + hi)
    r_stop = min(run_lo.r_end, run_hi.r_end)
    nodes = graded_grid(r_stop, opts.grid_h0 * L, opts.grid_growth)
    v_lo = _sample(run_lo, N, rhs, nodes)
    v_hi = _sample(run_hi, N, rhs, nodes)
    v_mid = 0.5 * (v_lo + v_hi)
    bad = (np.abs(v_hi - v_lo) > opts.separation_tol * np.abs(v_mid)) | (v_mid < opts.eps_decay * alpha)
    cut = int(np.argmax(bad)) if np.any(bad) else nodes.size
    cut = max(cut, 8)
    r_keep, v_keep = nodes[:cut], v_mid[:cut]
    r_c, v_c = r_keep[-1], v_keep[-1]

    # fitted tail rate on the reliable segment, compared with kappa
    sel = (v_keep < 1e-2 * alpha) & (r_keep > 0.5 * r_c)
    rate_fit = math.nan
    if np.count_nonzero(sel) >= 5:
        y = np.log(v_keep[sel] * r_keep[sel] ** ((N - 1) / 2))
        rate_fit = -np.polyfit(r_keep[sel], y, 1)[0]
    tail_ok = bool(np.isfinite(rate_fit) and abs(rate_fit - kappa) <= 0.2 * kappa)

    if kappa > 0:
        # the appended tail spans 40 decay lengths past r_c
        dr = nodes[cut - 1] - nodes[cut - 2]
        r_tail = []
        r = r_c
        r_last = r_c + 40.0 / kappa
        while r < r_last:
            dr *= opts.grid_growth
            r += min(dr, 0.05 / kappa)
            r_tail.append(r)
        r_tail = np.array(r_tail)
        v_tail = v_c * (r_c / r_tail) ** ((N - 1) / 2) * np.exp(-kappa * (r_tail - r_c))
        r_all = np.concatenate([r_keep, r_tail])
        v_all = np.concatenate([v_keep, v_tail])
    else:
        r_all, v_all = r_keep, v_keep

    decreasing = bool(np.all(np.diff(v_all) <= 0))
    profile = RadialProfile(N, r_all, v_all, decreasing=decreasing)
    diag = {
        "alpha_lo": lo,
        "alpha_hi": hi,
        "r_reliable": float(r_c),
        "v_reliable": float(v_c),
        "tail_rate_fit": float(rate_fit),
        "tail_rate_expected": float(kappa),
        "tail_rate_ok": tail_ok,
        "decreasing": decreasing,
    }
    dv_end = float((v_all[-1] - v_all[-2]) / (r_all[-1] - r_all[-2]))
    return Trajectory(profile, Outcome.DECAY, alpha, dv_end, None, diag)


def shoot_ground_state(
    N: int,
    rhs: Callable[[float], float],
    kappa: float,
    alpha_guess: float,
    length_scale: float,
    opts: ShootingOptions = DEFAULT_OPTIONS,
) -> Trajectory:
    """Positive decaying solution for a right-hand side with linear decay rate ``kappa``."""
    r_max = 50 * length_scale + 100.0 / kappa
    shooter = _Shooter(N, rhs, r_max, min(length_scale, 1.0 / kappa), opts)
    lo, hi = shooter.bracket(alpha_guess)
    # the guess may be far off; size the grid from the bracketed height
    shooter.length = min(_core_length(N, rhs, hi), 1.0 / kappa)
    lo, hi = _bisect(shooter.classify, lo, hi, opts.bisect_rtol)
    traj = _decaying_profile(shooter, lo, hi, kappa)
    if not traj.diagnostics["tail_rate_ok"]:
        log.warning("tail decay rate %.4g differs from linearised %.4g", traj.diagnostics["tail_rate_fit"], kappa)
    return traj


def _core_length(N, rhs, alpha) -> float:
    f = rhs(alpha)
    return math.sqrt(2 * N * alpha / f) if f > 0 else 1.0


# --------------------------------------------------------------------------
# the four targets


def dual_rhs(p: float, lam: float) -> Callable[[float], float]:
    """v -> phi(v)^{p-1} phi'(v) - lam phi(v) phi'(v)."""
    phi = ScalarPhi()

    def rhs(v):
        u = phi(v)
        au = abs(u)
        return (au ** (p - 2) - lam) * u / math.sqrt(1.0 + 2.0 * u * u)

    return rhs


def shoot_dual(params: Params, lam: float, opts: ShootingOptions = DEFAULT_OPTIONS) -> Trajectory:
    """Positive radial decaying solution v_lambda of the dual equation.

    Returns the v-profile; the ground state is ``u = phi(v)``.
    """
    if not lam > 0:
        raise ParameterError("lambda must be positive")
    N, p = params.N, params.p
    rhs = dual_rhs(p, lam)
    # exact initial height for N = 1 (first integral); a starting guess otherwise
    guess = float(phi_inv((p * lam / 2) ** (1 / (p - 2))))
    length = _core_length(N, rhs, guess * 1.5)
    traj = shoot_ground_state(N, rhs, math.sqrt(lam), guess, length, opts)
    traj.diagnostics["lambda"] = lam
    return traj


def shoot_semilinear(params: Params, opts: ShootingOptions = DEFAULT_OPTIONS) -> Trajectory:
    """Positive decaying solution W of -W'' - (N-1)/r W' + W = W^{p-1}."""
    N, p = params.N, params.p
    if not (params.mass_critical < p < params.two_star):
        raise ParameterError(f"semilinear limit needs 4+4/N < p < 2*, got N={N}, p={p}")

    def rhs(w):
        return abs(w) ** (p - 2) * w - w

    guess = (p / 2) ** (1 / (p - 2))
    return shoot_ground_state(N, rhs, 1.0, guess, _core_length(N, rhs, 1.5 * guess), opts)


# --------------------------------------------------------------------------
# zero-mass problem


@dataclass
class ZeroMassResult:
    trajectory: Trajectory  # v-profile
    u0: RadialProfile
    a0: float
    tail_constant: float
    decay_exponent: float
    decay_ok: bool
    r_max: float
    alpha_history: list
    tails: dict  # analytic tail corrections for mass, kinetic, quasi, lp

    @property
    def alpha(self) -> float:
        return self.trajectory.alpha


def zero_mass_rhs(p: float) -> Callable[[float], float]:
    phi = ScalarPhi()

    def rhs(v):
        u = phi(v)
        return abs(u) ** (p - 2) * u / math.sqrt(1.0 + 2.0 * u * u)

    return rhs


def _zero_mass_tails(N, p, c, R) -> dict:
    om = sphere_area(N)
    k = N - 2
    return {
        "mass": om * c**2 * R ** (4 - N) / (N - 4) if N > 4 else math.inf,
        "kinetic": om * k * c**2 * R ** (2 - N),
        "quasi": om * k**2 * c**4 * R ** (6 - 3 * N) / (3 * N - 6),
        "lp": om * c**p * R ** (N - p * k) / (p * k - N),
    }


def shoot_zero_mass(
    params: Params,
    opts: ShootingOptions = DEFAULT_OPTIONS,
    r_max: float = 50.0,
    stab_rtol: float = 1e-8,
    max_doublings: int = 40,
) -> ZeroMassResult:
    """Fast-decaying positive solution u0 of the zero-mass equation, and a0 = |u0|_2^2.

    Bisection predicate: "crosses zero before r_max" versus "positive at
    r_max"; r_max is doubled until the bisected alpha is stable to ``stab_rtol``.
    """
    N, p = params.N, params.p
    if not (N >= 3 and params.two_star < p < 2 * params.two_star):
        raise ParameterError("zero-mass solution needs N >= 3 and 2* < p < 2*2*")
    rhs = zero_mass_rhs(p)

    def crosses(alpha, R):
        run = _integrate(N, rhs, alpha, R, _core_length(N, rhs, alpha), opts)
        if run.outcome is Outcome.TURNING:
            raise ConvergenceError(f"zero-mass trajectory turned at alpha={alpha}")
        return run.outcome is Outcome.CROSSING

    # orientation is read off the scan rather than assumed
    grid = np.geomspace(opts.alpha_min, opts.alpha_max, 37)
    flags = [crosses(a, r_max) for a in grid]
    changes = [i for i in range(len(grid) - 1) if flags[i] != flags[i + 1]]
    if not changes:
        raise NoGroundStateError("no sign change of the zero-mass shooting predicate")
    i = changes[0]
    lo, hi = grid[i], grid[i + 1]
    large_crosses = flags[i + 1]

    def classify(alpha, R):
        return crosses(alpha, R) == large_crosses

    history = []
    R = r_max
    alpha_prev = None
    for _ in range(max_doublings):
        # widen the bracket if r_max moved the root outside
        while not classify(hi, R):
            hi *= 1.5
        while classify(lo, R):
            lo /= 1.5
        lo, hi = _bisect(lambda a: classify(a, R), lo, hi, opts.bisect_rtol)
        alpha = 0.5 * (lo + hi)
        history.append((R, alpha))
        if alpha_prev is not None and abs(alpha - alpha_prev) <= stab_rtol * alpha:
            break
        alpha_prev = alpha
        R *= 2
    else:
        log.warning("zero-mass alpha not stable to %g after %d doublings", stab_rtol, max_doublings)

    L = _core_length(N, rhs, alpha)
    shooter = _Shooter(N, rhs, R, L, opts)
    lo_c, hi_c = (lo, hi) if large_crosses else (hi, lo)
    traj = _decaying_profile(shooter, lo_c, hi_c, 0.0)
    v = traj.profile
    u0 = v.with_values(phi_values(v.values))

    # u0 ~ c r^{-(N-2)}. The bisected solution vanishes at the truncation radius,
    # so it looks like c (r^{2-N} - R^{2-N}) there; fit one decade further in.
    r, u = u0.nodes, u0.values
    R_end = r[-1]
    sel = (r >= R_end / 100) & (r <= R_end / 10) & (u > 0)
    slope, _ = np.polyfit(np.log(r[sel]), np.log(u[sel]), 1)
    decay_exponent = -slope
    c = float(np.median(r[sel] ** (N - 2) * u[sel]))
    decay_ok = abs(decay_exponent - (N - 2)) <= 0.05 * (N - 2)
    if not decay_ok:
        log.warning("zero-mass decay exponent %.4f off target %d: truncation radius unconverged", decay_exponent, N - 2)
    tails = _zero_mass_tails(N, p, c, R_end)

    mass_grid = functionals(u0, params).mass
    a0 = mass_grid + tails["mass"] if N >= 5 else math.inf
    traj.diagnostics.update({"r_max": R, "alpha_history": history})
    return ZeroMassResult(traj, u0, a0, c, decay_exponent, decay_ok, R, history, tails)


# --------------------------------------------------------------------------
# free-boundary (overdetermined) limit problem


def free_boundary_f(p: float):
    """f(s) = -sqrt(2)/2 + 2^{(p-4)/4} s^{(p-2)/2}, written so that f(sqrt(2)/2) == 0 exactly."""
    k = (p - 2) / 2

    def f(s):
        s = np.asarray(s, dtype=float)
        out = B_ZERO * (np.maximum(s / B_ZERO, 0.0) ** k - 1.0)
        return float(out) if out.ndim == 0 else out

    return f


def free_boundary_F(p: float):
    """Primitive F(s) = -(sqrt(2)/2) s + 2^{(p-4)/4} (2/p) s^{p/2}."""
    def F(s):
        s = np.asarray(s, dtype=float)
        return -B_ZERO * s + 2 ** ((p - 4) / 4) * (2 / p) * np.maximum(s, 0.0) ** (p / 2)

    return F


def free_boundary_alpha_1d(p: float) -> float:
    """Closed-form root of F(alpha) = 0 (the N = 1 initial height)."""
    return (p / 2) ** (2 / (p - 2)) * B_ZERO


@dataclass
class FreeBoundarySolution:
    alpha: float
    R: float
    v_tilde: RadialProfile
    residual: float
    edge_slope_u_bar: float  # reported only; its limit is not asserted
    alpha_F_root: float | None = None
    diagnostics: dict = field(default_factory=dict)

    def u_bar(self) -> RadialProfile:
        return self.v_tilde.with_values(2**0.25 * np.sqrt(np.maximum(self.v_tilde.values, 0.0)))


def shoot_free_boundary(params: Params, opts: ShootingOptions = DEFAULT_OPTIONS) -> FreeBoundarySolution:
    """Solve -Delta v = f(v) on a ball with v = dv/dnu = 0 on its boundary."""
    N, p = params.N, params.p
    f = free_boundary_f(p)
    k = (p - 2) / 2
    b = B_ZERO

    def rhs(v):
        return b * ((v / b) ** k - 1.0) if v > 0 else -b

    guess = free_boundary_alpha_1d(p)
    L = _core_length(N, rhs, 2 * guess)
    shooter = _Shooter(N, rhs, 200 * L, L, opts)
    hi = guess
    while not shooter.classify(hi):
        hi *= 2
    lo = b * (1 + 1e-6)
    if shooter.classify(lo):
        raise ConvergenceError("free-boundary predicate is not monotone: crossing just above b")
    lo, hi = _bisect(shooter.classify, lo, hi, opts.bisect_rtol)
    run_hi = shooter.run(hi, dense=True)
    run_lo = shooter.run(lo, dense=True)
    # the turning point of the lower trajectory is where v and v' vanish together
    R = run_lo.r_end
    nodes = graded_grid(R, opts.grid_h0 * L, opts.grid_growth)
    vals = _sample(run_lo, N, rhs, nodes)
    vals[-1] = 0.0
    vals = np.maximum(vals, 0.0)
    # trailing exact zeros mark the compact support
    extra = R + np.cumsum(np.full(8, nodes[-1] - nodes[-2]))
    v_tilde = RadialProfile(N, np.concatenate([nodes, extra]), np.concatenate([vals, np.zeros(8)]))
    alpha = 0.5 * (lo + hi)
    residual = abs(run_lo.v_end) + abs(run_hi.dv_end) + abs(run_hi.v_end)
    # u_bar = 2^{1/4} sqrt(v): slope at R from the last interior nodes
    ub = 2**0.25 * np.sqrt(vals)
    edge = float((ub[-1] - ub[-2]) / (nodes[-1] - nodes[-2]))
    alpha_F = None
    if N == 1:
        F = free_boundary_F(p)
        alpha_F = brentq(lambda s: float(F(s)), b, 10 * guess + 10, xtol=1e-15, rtol=1e-15)
    diag = {
        "alpha_lo": lo,
        "alpha_hi": hi,
        "R_turn_lo": run_lo.r_end,
        "v_turn_lo": run_lo.v_end,
        "monotone": bool(np.all(np.diff(vals) <= 0)),
    }
    return FreeBoundarySolution(alpha, R, v_tilde, residual, edge, alpha_F, diag)


@dataclass
class UniquenessReport:
    b: float
    f_at_b: float
    g_samples: np.ndarray  # columns (s, g(s))
    g_monotone: bool
    g_closed_form_error: float
    h1_ok: bool
    h2_ok: bool
    hprime4_ok: bool
    g_limit: float


def g_closed_form(p: float, s):
    """s f'(s) / f(s) in closed form."""
    s = np.asarray(s, dtype=float)
    q = (p - 2) / 2
    return q * (1 + 1 / (2 ** ((p - 2) / 4) * s**q - 1))


def check_uniqueness_hypotheses(params: Params, n_samples: int = 1000) -> UniquenessReport:
    """Sample the hypotheses behind free-boundary uniqueness."""
    N, p = params.N, params.p
    f, F = free_boundary_f(p), free_boundary_F(p)
    b = B_ZERO
    q = (p - 2) / 2
    s = np.geomspace(b * (1 + 1e-6), 1e6 * b, n_samples)
    fs = f(s)
    fprime = 2 ** ((p - 4) / 4) * q * s ** (q - 1)
    g_direct = s * fprime / fs
    g = g_closed_form(p, s)
    g_err = float(np.max(np.abs(g - g_direct) / np.abs(g)))
    g_monotone = bool(np.all(np.diff(g) <= 0))

    below = np.linspace(1e-9, b, 200)
    h1 = bool(np.all(f(below) <= 0) and np.all(fs > 0))

    # (H'4) with m = 2 (Laplacian): d/du (F/f) >= (N-2)/(2N), u > 0, u != b
    u = np.concatenate([np.geomspace(1e-6, b * (1 - 1e-6), 400), s])
    fu = f(u)
    fpu = 2 ** ((p - 4) / 4) * q * u ** (q - 1)
    d_ratio = 1 - F(u) * fpu / fu**2
    hp4 = bool(np.all(d_ratio >= (N - 2) / (2 * N) - 1e-12))

    return UniquenessReport(
        b=b,
        f_at_b=float(f(b)),
        g_samples=np.column_stack([s, g]),
        g_monotone=g_monotone,
        g_closed_form_error=g_err,
        h1_ok=h1,
        h2_ok=g_monotone,
        hprime4_ok=hp4,
        g_limit=float(g_closed_form(p, 1e6 * b)),
    )


# --------------------------------------------------------------------------
# dumps


def dump_trajectory(traj: Trajectory, stem, **extra) -> tuple[Path, Path]:
    """Write ``stem.csv`` (profile) and ``stem.json`` (alpha, outcome, residuals, ...)."""
    stem = Path(stem)
    csv_path = stem.with_suffix(".csv")
    json_path = stem.with_suffix(".json")
    traj.profile.to_csv(csv_path)
    record = {
        "alpha": traj.alpha,
        "lambda": traj.diagnostics.get("lambda"),
        "outcome": traj.outcome.value,
        "residuals": extra.pop("residuals", {}),
    }
    record.update(extra)
    json_path.write_text(json.dumps(record, indent=2, sort_keys=True, default=float) + "\n")
    return csv_path, json_path
