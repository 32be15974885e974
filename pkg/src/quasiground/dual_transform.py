"""Change of unknown ``u = phi(v)`` between the quasilinear and dual equations.

``phi`` solves ``phi' = 1/sqrt(1 + 2 phi^2)``, ``phi(0) = 0``; its inverse has
the closed form

    phi_inv(u) = u sqrt(1 + 2u^2)/2 + (sqrt(2)/4) asinh(sqrt(2) u),

so ``phi`` is obtained by Newton inversion of ``phi_inv`` instead of
integrating the Cauchy problem.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .radial_field import RadialProfile

SQRT2 = math.sqrt(2.0)
_LARGE_U = 1e8
_MAX_NEWTON = 100


class ConvergenceError(ArithmeticError):
    """A numerical iteration failed to reach its tolerance."""


def phi_inv(u):
    """v = int_0^u sqrt(1 + 2t^2) dt, odd in u.  Accepts scalars or arrays."""
    u = np.asarray(u, dtype=float)
    a = np.abs(u)
    with np.errstate(over="ignore", invalid="ignore"):
        small = 0.5 * a * np.sqrt(1.0 + 2.0 * a * a) + SQRT2 / 4.0 * np.arcsinh(SQRT2 * a)
        # asymptotic branch; also avoids overflow of a*sqrt(1 + 2a^2)
        large = a * a / SQRT2 + SQRT2 / 8.0 + SQRT2 / 4.0 * np.log(2.0 * SQRT2 * np.maximum(a, 1.0))
    v = np.where(a > _LARGE_U, large, small)
    v = np.copysign(v, u)
    return float(v) if v.ndim == 0 else v


def phi_prime_of_u(u):
    """phi'(v) written in terms of u = phi(v)."""
    u = np.asarray(u, dtype=float)
    return 1.0 / np.sqrt(1.0 + 2.0 * u * u)


def _phi_array(s: np.ndarray) -> np.ndarray:
    a = np.abs(s)
    # phi(s) <= min(s, 2^{1/4} sqrt(s)); phi_inv is increasing and convex on
    # [0, inf), so Newton from this upper bound decreases monotonically to the root.
    u = np.minimum(a, 2.0**0.25 * np.sqrt(a))
    tiny = a < 1e-8  # phi(s) = s - s^3/3 + ..., exact in double precision
    for _ in range(_MAX_NEWTON):
        step = (phi_inv(u) - a) / np.sqrt(1.0 + 2.0 * u * u)
        u_new = np.maximum(u - step, 0.0)
        done = np.abs(u_new - u) <= 1e-15 * u_new
        u = u_new
        if np.all(done | tiny):
            break
    else:
        raise ConvergenceError("Newton inversion of phi_inv did not converge")
    return np.copysign(np.where(tiny, a, u), s)


@dataclass(frozen=True)
class PhiValue:
    s: float
    phi: float
    phi_prime: float


def phi(s) -> PhiValue:
    """phi(s) and phi'(s) for a scalar s (odd extension for s < 0)."""
    u = float(_phi_array(np.asarray([s], dtype=float))[0])
    return PhiValue(float(s), u, float(phi_prime_of_u(u)))


def phi_values(s) -> np.ndarray:
    """Vectorised phi on an array."""
    s = np.asarray(s, dtype=float)
    out = _phi_array(s.ravel()).reshape(s.shape)
    return float(out) if out.ndim == 0 else out


class ScalarPhi:
    """Scalar phi with a warm-started Newton iteration.

    The shooting right-hand sides call phi many thousands of times on slowly
    varying arguments, where restarting from the previous root takes two or
    three iterations instead of a cold start.
    """

    def __init__(self):
        self._s = 0.0
        self._u = 0.0

    def __call__(self, s: float) -> float:
        if s == self._s:
            return self._u
        a = abs(s)
        if a < 1e-8:
            # phi(s) = s - s^3/3 + ..., already exact in double precision
            return s
        u = self._u if self._u > 0 and abs(a - abs(self._s)) < 0.1 * a else min(a, 1.189207115002721 * math.sqrt(a))
        for _ in range(_MAX_NEWTON):
            w = math.sqrt(1.0 + 2.0 * u * u)
            if u > _LARGE_U:
                f = u * u / SQRT2 + SQRT2 / 8.0 + SQRT2 / 4.0 * math.log(2.0 * SQRT2 * u)
            else:
                f = 0.5 * u * w + SQRT2 / 4.0 * math.asinh(SQRT2 * u)
            step = (f - a) / w
            u_new = u - step
            if u_new <= 0.0:
                u_new = 0.5 * u
            if abs(u_new - u) <= 1e-15 * u_new:
                u = u_new
                break
            u = u_new
        else:
            raise ConvergenceError(f"phi({s}) did not converge")
        self._s, self._u = s, math.copysign(u, s)
        return self._u


def _require_nonnegative(profile: RadialProfile) -> None:
    if np.any(profile.values < 0):
        raise ValueError("ground-state profiles must be nonnegative")


def u_to_v(u: RadialProfile) -> RadialProfile:
    _require_nonnegative(u)
    return u.with_values(phi_inv(u.values))


def v_to_u(v: RadialProfile) -> RadialProfile:
    _require_nonnegative(v)
    return v.with_values(phi_values(v.values))
