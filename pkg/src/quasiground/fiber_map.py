"""Mass-preserving dilations ``(t * u)(x) = t^{N/2} u(t x)`` and the Pohozaev projection.

Along a fiber the energy is the scalar polynomial

    h(t) = A t^2 + B t^{N+2} - C t^sigma,

with ``A = |grad u|^2 / 2``, ``B = V(u)``, ``C = |u|_p^p / p`` and
``sigma = (p-2)N/2 > N+2``.  It has a single critical point ``t_u``, a strict
maximum, and ``t_u * u`` lies on the Pohozaev manifold.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .dual_transform import ConvergenceError
from .radial_field import Params, RadialProfile, functionals


def fiber_scale(u: RadialProfile, t: float) -> RadialProfile:
    """t * u, represented exactly on the rescaled nodes ``u.nodes / t``."""
    if not t > 0:
        raise ValueError(f"fiber parameter must be positive, got {t}")
    return RadialProfile(u.N, u.nodes / t, t ** (u.N / 2.0) * u.values, u.decreasing)


@dataclass(frozen=True)
class FiberPolynomial:
    A: float
    B: float
    C: float
    sigma: float
    n_exp: int

    def __post_init__(self):
        if not self.sigma > self.n_exp:
            raise ValueError("fiber polynomial needs sigma > N + 2")
        if not (self.A > 0 and self.B >= 0 and self.C > 0):
            raise ValueError("fiber polynomial needs A > 0, B >= 0, C > 0")

    def h(self, t):
        t = np.asarray(t, dtype=float)
        return self.A * t**2 + self.B * t**self.n_exp - self.C * t**self.sigma

    def dh(self, t):
        t = np.asarray(t, dtype=float)
        return (
            2 * self.A * t
            + self.n_exp * self.B * t ** (self.n_exp - 1)
            - self.sigma * self.C * t ** (self.sigma - 1)
        )

    def d2h(self, t):
        t = np.asarray(t, dtype=float)
        n, s = self.n_exp, self.sigma
        return 2 * self.A + n * (n - 1) * self.B * t ** (n - 2) - s * (s - 1) * self.C * t ** (s - 2)

    def log_balance(self, x):
        """log(2A + nB t^{n-2}) - log(sigma C t^{sigma-2}) at t = e^x; has the sign of h'(t)."""
        A, B, C, s, n = self.A, self.B, self.C, self.sigma, self.n_exp
        x = np.asarray(x, dtype=float)
        second = math.log(n * B) + (n - 2) * x if B > 0 else np.full_like(x, -np.inf)
        out = np.logaddexp(math.log(2 * A), second) - math.log(s * C) - (s - 2) * x
        return float(out) if out.ndim == 0 else out

    def critical_point(self, rtol: float = 1e-12) -> float:
        """The unique positive root of h'."""
        x = self.log_critical_point(rtol)
        if abs(x) > 700:
            raise ConvergenceError(f"fiber critical point exp({x:.4g}) outside floating-point range")
        return math.exp(x)

    def log_critical_point(self, rtol: float = 1e-12) -> float:
        """log t_u; finite even when t_u itself is not representable."""
        g = self.log_balance
        lo, hi, step = -1.0, 1.0, 1.0
        for _ in range(200):
            if g(lo) > 0:
                break
            step *= 2
            lo -= step
        else:
            raise ConvergenceError("no positive lower bracket for the fiber critical point")
        step = 1.0
        for _ in range(200):
            if g(hi) < 0:
                break
            step *= 2
            hi += step
        else:
            raise ConvergenceError("no upper bracket for the fiber critical point")
        # bracketing in log t makes the tolerance relative in t
        return brentq(g, lo, hi, xtol=rtol * 1e-3, rtol=1e-15)


def fiber_polynomial(u: RadialProfile, params: Params) -> FiberPolynomial:
    fv = functionals(u, params)
    return FiberPolynomial(fv.kinetic / 2, fv.quasi, fv.lp / params.p, params.sigma, params.N + 2)


class Side(enum.Enum):
    BELOW = "below"  # P(u) < 0, t_u < 1
    ON = "on"
    ABOVE = "above"  # P(u) > 0, t_u > 1


@dataclass(frozen=True)
class Projection:
    t_u: float
    projected: RadialProfile
    side: Side
    energy: float  # max_t I(t * u) = h(t_u)
    pohozaev_before: float


def project_pohozaev(u: RadialProfile, params: Params, rtol: float = 1e-12) -> Projection:
    """Dilate ``u`` onto the Pohozaev manifold along its fiber."""
    fv = functionals(u, params)
    if fv.kinetic <= 0 or fv.lp <= 0:
        raise ValueError("cannot project the zero profile")
    poly = FiberPolynomial(fv.kinetic / 2, fv.quasi, fv.lp / params.p, params.sigma, params.N + 2)
    t_u = poly.critical_point(rtol)
    # P(u) = h'(1); "on" means |P| is at rounding level relative to its terms
    if abs(fv.pohozaev) <= 1e-12 * fv.pohozaev_scale:
        side, t_u = Side.ON, 1.0
    elif fv.pohozaev < 0:
        side = Side.BELOW
    else:
        side = Side.ABOVE
    return Projection(t_u, fiber_scale(u, t_u), side, float(poly.h(t_u)), fv.pohozaev)


def reduced_energy(u: RadialProfile, params: Params) -> float:
    """max over t > 0 of I(t * u)."""
    return project_pohozaev(u, params).energy
