"""Radial profiles on R^N and the scalar functionals evaluated on them.

A profile is stored on a graded grid ``0 = r_0 < r_1 < ...``.  All
integrals and derivatives are taken in the *index* variable ``s = i``: the
grid is treated as a smooth map ``r(s)``, derivatives use fourth-order
finite differences in ``s`` divided by ``dr/ds``, and integrals use
composite Simpson in ``s`` with the Jacobian ``dr/ds``.  On a geometric
grid this is fourth-order accurate and invariant under ``r -> r / t``,
which keeps the fiber scalings exact.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.integrate import simpson
from scipy.special import gamma


class ParameterError(ValueError):
    """Raised when (N, p) or a solver option violates its admissible range."""


@dataclass(frozen=True)
class Params:
    N: int
    p: float

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise ParameterError(f"N must be an integer >= 1, got {self.N}")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "p", float(self.p))
        if not math.isfinite(self.p):
            raise ParameterError("p must be finite")
        if not (self.mass_critical < self.p < 2.0 * self.two_star):
            raise ParameterError(
                f"p={self.p} outside the mass-supercritical range "
                f"({self.mass_critical:g}, {2.0 * self.two_star:g}) for N={self.N}"
            )

    @property
    def sigma(self) -> float:
        return (self.p - 2.0) * self.N / 2.0

    @property
    def two_star(self) -> float:
        return 2.0 * self.N / (self.N - 2.0) if self.N >= 3 else math.inf

    @property
    def mass_critical(self) -> float:
        return 4.0 + 4.0 / self.N


def sphere_area(N: int) -> float:
    """Surface measure of the unit sphere in R^N (equals 2 for N = 1)."""
    return 2.0 * math.pi ** (N / 2.0) / gamma(N / 2.0)


def graded_grid(r_max: float, h0: float, growth: float = 1.02) -> np.ndarray:
    """Geometric grid ``r_i = h0 (q^i - 1)/(q - 1)`` ending exactly at ``r_max``.

    The last node is pinned to ``r_max`` by a uniform rescaling, so the
    grid stays geometric with first spacing at most ``h0``.
    """
    if not (r_max > 0 and h0 > 0 and growth > 1.0):
        raise ParameterError("graded_grid needs r_max > 0, h0 > 0, growth > 1")
    q = growth
    n = int(math.ceil(math.log1p(r_max * (q - 1.0) / h0) / math.log(q)))
    n = max(n, 4)
    i = np.arange(n + 1, dtype=float)
    r = np.expm1(i * math.log(q)) / (q - 1.0)
    return r * (r_max / r[-1])


def index_derivative(f: np.ndarray) -> np.ndarray:
    """Fourth-order derivative of ``f`` with respect to the node index."""
    f = np.asarray(f, dtype=float)
    n = f.size
    if n < 5:
        return np.gradient(f)
    d = np.empty_like(f)
    d[2:-2] = (f[:-4] - 8.0 * f[1:-3] + 8.0 * f[3:-1] - f[4:]) / 12.0
    d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / 12.0
    d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / 12.0
    d[-1] = (25.0 * f[-1] - 48.0 * f[-2] + 36.0 * f[-3] - 16.0 * f[-4] + 3.0 * f[-5]) / 12.0
    d[-2] = (3.0 * f[-1] + 10.0 * f[-2] - 18.0 * f[-3] + 6.0 * f[-4] - f[-5]) / 12.0
    return d


@dataclass(frozen=True)
class RadialProfile:
    """Grid function ``values[i] = u(nodes[i])`` of a radial field on R^N."""

    N: int
    nodes: np.ndarray
    values: np.ndarray
    decreasing: bool = False

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=float)
        values = np.array(self.values, dtype=float)
        if nodes.ndim != 1 or nodes.shape != values.shape:
            raise ValueError("nodes and values must be 1-D arrays of equal length")
        if nodes.size < 3:
            raise ValueError("a profile needs at least 3 nodes")
        if nodes[0] != 0.0 or np.any(np.diff(nodes) <= 0):
            raise ValueError("nodes must start at 0 and be strictly increasing")
        if not (np.all(np.isfinite(nodes)) and np.all(np.isfinite(values))):
            raise ValueError("profile contains non-finite entries")
        if self.decreasing and np.any(np.diff(values) > 0):
            raise ValueError("profile flagged decreasing is not non-increasing")
        nodes.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "N", int(self.N))

    def __call__(self, r):
        """Linear interpolation, zero beyond the last node."""
        return np.interp(r, self.nodes, self.values, right=0.0)

    @property
    def support_end(self) -> int:
        """Number of leading nodes that carry the support (trailing exact zeros dropped)."""
        nz = np.flatnonzero(self.values)
        if nz.size == 0:
            return 0
        return min(int(nz[-1]) + 2, self.nodes.size)

    def with_values(self, values, decreasing: bool | None = None) -> RadialProfile:
        return RadialProfile(
            self.N, self.nodes, values, self.decreasing if decreasing is None else decreasing
        )

    def to_csv(self, path) -> None:
        write_profile_csv(self, path)


def write_profile_csv(profile: RadialProfile, path) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        fh.write("r,value\n")
        for r, v in zip(profile.nodes, profile.values):
            fh.write(f"{r:.17g},{v:.17g}\n")


def read_profile_csv(path, N: int) -> RadialProfile:
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != ["r", "value"]:
            raise ValueError(f"expected header 'r,value', got {reader.fieldnames}")
        rows = [(float(row["r"]), float(row["value"])) for row in reader]
    r, v = np.array(rows).T
    return RadialProfile(N, r, v)


def radial_derivative(u: RadialProfile) -> np.ndarray:
    """du/dr at every node."""
    return index_derivative(u.values) / index_derivative(u.nodes)


def radial_laplacian(u: RadialProfile) -> np.ndarray:
    """u'' + (N-1)/r u' at every node; the r = 0 entry uses N u''(0)."""
    rs = index_derivative(u.nodes)
    du = index_derivative(u.values) / rs
    d2u = index_derivative(du) / rs
    lap = d2u.copy()
    lap[1:] += (u.N - 1) / u.nodes[1:] * du[1:]
    lap[0] = u.N * d2u[0]
    return lap


def integrate_radial(u: RadialProfile, density: np.ndarray) -> float:
    """Integral over R^N of a radial density sampled on ``u.nodes``."""
    m = u.support_end
    if m < 2:
        return 0.0
    r = u.nodes[:m]
    jac = index_derivative(r) if m >= 5 else np.gradient(r)
    w = sphere_area(u.N) * r ** (u.N - 1) * jac
    return float(simpson(np.asarray(density)[:m] * w, dx=1.0))


@dataclass(frozen=True)
class FunctionalValues:
    mass: float
    kinetic: float
    quasi: float
    lp: float
    sup_norm: float
    p: float
    N: int
    energy: float = field(init=False)
    pohozaev: float = field(init=False)
    pohozaev2: float = field(init=False)

    def __post_init__(self):
        N, p = self.N, self.p
        object.__setattr__(self, "energy", self.kinetic / 2 + self.quasi - self.lp / p)
        object.__setattr__(
            self,
            "pohozaev",
            self.kinetic + (N + 2) * self.quasi - (p - 2) * N / (2 * p) * self.lp,
        )
        object.__setattr__(
            self,
            "pohozaev2",
            self.kinetic
            + (N + 2) * (N + 1) * self.quasi
            - (p - 2) * N * ((p - 2) * N - 2) / (4 * p) * self.lp,
        )

    @property
    def pohozaev_scale(self) -> float:
        """Size of the terms in P(u); used to judge |P| against."""
        N, p = self.N, self.p
        return self.kinetic + (N + 2) * self.quasi + (p - 2) * N / (2 * p) * self.lp

    def manifold_energy(self) -> float:
        """I(u) as it reads on the Pohozaev manifold (uses kinetic and quasi only)."""
        N, p = self.N, self.p
        return ((p - 2) * N - 4) / (2 * (p - 2) * N) * self.kinetic + (
            (p - 4) * N - 4
        ) / ((p - 2) * N) * self.quasi

    def as_dict(self) -> dict:
        keys = ("mass", "kinetic", "quasi", "lp", "energy", "pohozaev", "pohozaev2", "sup_norm")
        return {k: getattr(self, k) for k in keys}


def _check_params(u: RadialProfile, params) -> None:
    if u.N != params.N:
        raise ParameterError(f"profile dimension {u.N} != params.N {params.N}")


def functionals(u: RadialProfile, params: Params) -> FunctionalValues:
    """Mass, kinetic, V, L^p and the derived I, P and d^2/dt^2 I(t*u) at t = 1."""
    _check_params(u, params)
    du = radial_derivative(u)
    vals = u.values
    return FunctionalValues(
        mass=integrate_radial(u, vals**2),
        kinetic=integrate_radial(u, du**2),
        quasi=integrate_radial(u, vals**2 * du**2),
        lp=integrate_radial(u, np.abs(vals) ** params.p),
        sup_norm=float(np.max(np.abs(vals))),
        p=params.p,
        N=params.N,
    )


@dataclass(frozen=True)
class GNReport:
    theta1: float
    theta2: float
    ratio: float
    delta_exponent: float


def gn_exponents(N: int, p: float) -> tuple[float, float]:
    theta1 = (4 * N - p * (N - 2)) / (2 * (N + 2))
    theta2 = N * (p - 2) / (2 * (N + 2))
    return theta1, theta2


def delta_exponent(N: int, p: float) -> float:
    """Power of the mass in the lower bound of V over the manifold."""
    return ((N - 2) * p - 4 * N) / ((p - 4) * N - 4)


def gn_ratio(u: RadialProfile, params: Params) -> GNReport:
    """||u||_p^p / (mass^theta1 V^theta2); bounded above by the GN constant."""
    fv = functionals(u, params)
    if fv.quasi <= 0:
        if fv.lp > 0:
            raise ArithmeticError("V(u) = 0 with ||u||_p > 0: inconsistent profile")
        raise ValueError("gn_ratio needs a nonzero profile")
    t1, t2 = gn_exponents(params.N, params.p)
    ratio = fv.lp / (fv.mass**t1 * fv.quasi**t2)
    return GNReport(t1, t2, ratio, delta_exponent(params.N, params.p))
