"""Derivative-free minimisation of the reduced energy u -> max_t I(t * u) at fixed mass.

An independent route to the ground-state level M_a: no ODE is solved.
Profiles are monotone splines of ``log u`` in the variable ``r^2``, every
candidate is rescaled to mass ``a``, and the fiber maximum is read off the
polynomial ``h(t)`` in closed form.  Since the dilations ``t * u`` preserve
the mass, the search is effectively over shapes only.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import minimize

from .dual_transform import ConvergenceError
from .fiber_map import FiberPolynomial, fiber_scale
from .radial_field import (
    ParameterError,
    Params,
    RadialProfile,
    functionals,
    graded_grid,
    integrate_radial,
    sphere_area,
)

log = logging.getLogger(__name__)


@dataclass
class MinimizeOptions:
    knots: int = 12
    max_evals: int = 4000
    restarts: int = 3
    xatol: float = 1e-7
    fatol: float = 1e-11
    grid_growth: float = 1.005
    stall_rtol: float = 1e-7
    seed: int = 0


@dataclass
class MinimizeResult:
    profile: RadialProfile
    M_hat: float
    iterations: int
    converged: bool
    a: float = math.nan
    evaluations: int = 0
    history: list = field(default_factory=list, repr=False)

    def write(self, stem) -> tuple[Path, Path]:
        stem = Path(stem)
        self.profile.to_csv(stem.with_suffix(".csv"))
        rec = {"a": float(self.a), "M_hat": float(self.M_hat), "converged": bool(self.converged), "iterations": int(self.iterations)}
        js = stem.with_suffix(".json")
        js.write_text(json.dumps(rec, indent=2, sort_keys=True) + "\n")
        return stem.with_suffix(".csv"), js


class SplineFamily:
    """Decreasing profiles u = exp(y(r^2)) with a log-linear tail past the last knot.

    Parameter vector: ``[y0, log(y0 - y1), ..., log(y_{K-2} - y_{K-1})]``.
    """

    def __init__(self, N: int, width: float, knots: int = 12, growth: float = 1.005):
        if knots < 4:
            raise ParameterError("at least 4 knots are needed")
        self.N = N
        self.width = width
        self.r_knots = np.concatenate([[0.0], np.geomspace(0.1 * width, 8.0 * width, knots - 1)])
        self.s_knots = self.r_knots**2
        self.growth = growth

    @property
    def dim(self) -> int:
        return self.r_knots.size

    def heights(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        steps = np.exp(np.clip(x[1:], -40.0, 6.0))
        return x[0] - np.concatenate([[0.0], np.cumsum(steps)])

    def params_from(self, u: RadialProfile) -> np.ndarray:
        vals = np.maximum(u(self.r_knots), 0.0)
        y = np.empty(self.dim)
        y[0] = math.log(vals[0])
        for j in range(1, self.dim):
            yj = math.log(vals[j]) if vals[j] > 0 else -math.inf
            y[j] = min(yj, y[j - 1] - 1e-6)
        y = np.maximum(y, y[0] - 60.0)
        d = -np.diff(y)
        return np.concatenate([[y[0]], np.log(np.maximum(d, 1e-8))])

    def evaluate(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Nodes, values and exact radial derivatives of the candidate."""
        y = self.heights(x)
        spl = PchipInterpolator(self.s_knots, y)
        dspl = spl.derivative()
        r_last = self.r_knots[-1]
        # log-linear tail with the secant rate of the last interval
        rate = (y[-2] - y[-1]) / (self.r_knots[-1] - self.r_knots[-2])
        rate = max(rate, 1e-3 / self.width)
        r_end = r_last + 40.0 / rate
        r = graded_grid(r_end, 1e-3 * self.width, self.growth)
        inner = r <= r_last
        logu = np.empty_like(r)
        dlogu = np.empty_like(r)
        s = r[inner] ** 2
        logu[inner] = spl(s)
        dlogu[inner] = dspl(s) * 2 * r[inner]
        logu[~inner] = y[-1] - rate * (r[~inner] - r_last)
        dlogu[~inner] = -rate
        u = np.exp(logu)
        return r, u, u * dlogu


def _raw_integrals(N, r, u, du, p):
    prof = RadialProfile(N, r, u)
    return (
        integrate_radial(prof, u**2),
        integrate_radial(prof, du**2),
        integrate_radial(prof, u**2 * du**2),
        integrate_radial(prof, u**p),
    )


def _fiber_energy(params: Params, a, mass, kin, quasi, lp) -> tuple[float, float, float]:
    """(h(t_u), t_u, c) for the candidate rescaled by c to mass a."""
    c2 = a / mass
    p = params.p
    poly = FiberPolynomial(kin * c2 / 2, quasi * c2**2, lp * c2 ** (p / 2) / p, params.sigma, params.N + 2)
    t = poly.critical_point()
    return float(poly.h(t)), t, math.sqrt(c2)


def reduced_energy_at_mass(u: RadialProfile, params: Params, a: float) -> tuple[float, RadialProfile]:
    """max_t I(t * (c u)) with c chosen so that c u has mass a, and the maximising profile."""
    fv = functionals(u, params)
    h, t, c = _fiber_energy(params, a, fv.mass, fv.kinetic, fv.quasi, fv.lp)
    return h, fiber_scale(u.with_values(c * u.values), t)


def _half_width(u: RadialProfile) -> float:
    half = 0.5 * u.values[0]
    idx = int(np.argmax(u.values < half))
    return float(u.nodes[idx]) if idx > 0 else float(u.nodes[-1]) / 4


def gaussian_init(N: int, a: float, width: float = 1.0) -> RadialProfile:
    r = graded_grid(12.0 * width, 1e-3 * width, 1.01)
    g = np.exp(-((r / width) ** 2))
    # mass of exp(-2 r^2/w^2) over R^N
    m = sphere_area(N) * 0.5 * math.gamma(N / 2) * (width**2 / 2) ** (N / 2)
    return RadialProfile(N, r, math.sqrt(a / m) * g)


def minimize_reduced(
    params: Params,
    a: float,
    init: RadialProfile,
    opts: MinimizeOptions | None = None,
) -> MinimizeResult:
    """Minimise the reduced energy over decreasing spline profiles of mass a."""
    opts = opts or MinimizeOptions()
    if not a > 0:
        raise ParameterError("mass must be positive")
    if init.N != params.N:
        raise ParameterError("init profile dimension mismatch")
    if np.any(init.values < 0) or not np.any(init.values > 0):
        raise ValueError("init must be nonnegative and nonzero")
    if np.any(np.diff(init.values) > 1e-12 * init.values[0]):
        raise ValueError("init must be non-increasing")
    if functionals(init, params).mass > a * (1 + 1e-8):
        raise ValueError("init mass exceeds a")

    # candidate 0: the initial profile itself
    best_h, best_profile = reduced_energy_at_mass(init, params, a)
    fam = SplineFamily(params.N, _half_width(init), opts.knots, opts.grid_growth)
    p = params.p
    evals = 0

    def objective(x):
        nonlocal evals
        evals += 1
        r, u, du = fam.evaluate(x)
        m, k, q, lp = _raw_integrals(params.N, r, u, du, p)
        if not (m > 0 and k > 0 and lp > 0 and math.isfinite(m + k + q + lp)):
            return math.inf
        try:
            return _fiber_energy(params, a, m, k, q, lp)[0]
        except (ConvergenceError, ValueError):
            return math.inf

    x = fam.params_from(init)
    rng = np.random.default_rng(opts.seed)
    iterations, converged, history = 0, False, []
    f_prev = math.inf
    for k in range(opts.restarts):
        # fresh simplex around the current point; perturbation shrinks with restarts
        scale = 0.5 / (k + 1)
        simplex = np.vstack([x, x + scale * np.eye(x.size) * rng.choice([-1.0, 1.0], x.size)])
        res = minimize(
            objective,
            x,
            method="Nelder-Mead",
            options={
                "initial_simplex": simplex,
                "maxfev": opts.max_evals,
                "xatol": opts.xatol,
                "fatol": opts.fatol,
                "adaptive": True,
            },
        )
        iterations += int(res.nit)
        x = res.x
        history.append(float(res.fun))
        # a restart that no longer moves the level counts as convergence
        converged = bool(abs(f_prev - res.fun) <= opts.stall_rtol * abs(res.fun))
        f_prev = res.fun
        if converged:
            break

    if f_prev < best_h:
        r, u, du = fam.evaluate(x)
        spline_profile = RadialProfile(params.N, r, u)
        m, kin, q, lp = _raw_integrals(params.N, r, u, du, p)
        h, t, c = _fiber_energy(params, a, m, kin, q, lp)
        best_h = h
        best_profile = fiber_scale(spline_profile.with_values(c * u), t)
    else:
        log.info("no spline candidate improved on the initial profile")
    if not converged:
        log.warning("Nelder-Mead did not converge within %d restarts", opts.restarts)
    return MinimizeResult(best_profile, best_h, iterations, converged, a, evals, history)
