"""Pairwise interaction potentials and the configuration energy.

The energy of a configuration is V(x) = a*n(x) + sum over ordered pairs
i != j of phi(x_i - x_j), so every unordered pair is counted twice. All
shipped pair potentials are nonnegative, which gives the local stability
bound exp(-(V(x u xi) - V(x))) <= exp(-a) used for rejection sampling.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .config_space import Configuration, Domain
from .errors import SingularGradient, UnboundedDomain


class PairPotential:
    """Radial pair potential phi: R^d -> [0, inf].

    Concrete kinds implement ``phi_r`` (value as a function of the pair
    distance r) and ``dphi_over_r`` (phi'(r)/r, so that the gradient is
    ``dphi_over_r(r) * xi``). Both accept numpy arrays.
    """

    singular = False  # True if phi(0) = +inf

    def phi_r(self, r):
        raise NotImplementedError

    def dphi_over_r(self, r):
        raise NotImplementedError

    def phi(self, xi) -> float:
        """Value at the separation vector xi."""
        r = float(np.linalg.norm(np.asarray(xi, dtype=float)))
        return float(self.phi_r(np.asarray(r)))

    def grad(self, xi) -> np.ndarray:
        """Analytic gradient at xi; errors at the origin for singular kinds."""
        xi = np.asarray(xi, dtype=float)
        r = float(np.linalg.norm(xi))
        if r == 0.0:
            if self.singular:
                raise SingularGradient("gradient at the origin is undefined")
            return np.zeros_like(xi)
        return float(self.dphi_over_r(np.asarray(r))) * xi

    def describe(self) -> dict:
        d = {"kind": type(self).__name__}
        d.update(getattr(self, "__dict__", {}))
        for f in getattr(self, "__dataclass_fields__", ()):
            d[f] = getattr(self, f)
        return d


@dataclass(frozen=True)
class Zero(PairPotential):
    """No interaction: phi = 0."""

    def phi_r(self, r):
        return np.zeros_like(np.asarray(r, dtype=float))

    def dphi_over_r(self, r):
        return np.zeros_like(np.asarray(r, dtype=float))


@dataclass(frozen=True)
class LennardJonesRepulsive(PairPotential):
    """phi(xi) = c * ||xi||^-12, the repulsive core alone."""

    c: float
    singular = True

    def __post_init__(self):
        if self.c <= 0:
            raise ValueError("c must be positive")

    def phi_r(self, r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            return self.c * r ** -12.0

    def dphi_over_r(self, r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            return -12.0 * self.c * r ** -14.0


@dataclass(frozen=True)
class Riesz(PairPotential):
    """phi(xi) = c * ||xi||^(alpha - d) with 0 < alpha < d."""

    c: float
    alpha: float
    dim: int
    singular = True

    def __post_init__(self):
        if self.c <= 0:
            raise ValueError("c must be positive")
        if not 0 < self.alpha < self.dim:
            raise ValueError("alpha must lie in (0, d)")

    def phi_r(self, r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            return self.c * r ** (self.alpha - self.dim)

    def dphi_over_r(self, r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            return self.c * (self.alpha - self.dim) * r ** (self.alpha - self.dim - 2.0)


@dataclass(frozen=True)
class SoftCore(PairPotential):
    """phi(xi) = -ln(1 - exp(-c ||xi||^2))."""

    c: float
    singular = True

    def __post_init__(self):
        if self.c <= 0:
            raise ValueError("c must be positive")

    def phi_r(self, r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            return -np.log(-np.expm1(-self.c * r * r))

    def dphi_over_r(self, r):
        # phi'(r)/r = -2c e^{-c r^2} / (1 - e^{-c r^2})
        r = np.asarray(r, dtype=float)
        e = np.exp(-self.c * r * r)
        with np.errstate(divide="ignore"):
            return -2.0 * self.c * e / (1.0 - e)


@dataclass(frozen=True)
class StraussRegularised(PairPotential):
    """Strauss plateau gamma on ||xi|| <= R - eps, zero beyond R + eps.

    The two levels are joined on [R-eps, R+eps] by the cubic smoothstep
    gamma * (1 - 3 s^2 + 2 s^3) with s = (r - (R-eps)) / (2 eps), the
    simplest monotone C^1 interpolant with flat slope at both ends.
    """

    gamma: float
    range_r: float
    eps: float

    def __post_init__(self):
        if not 0 < self.eps < self.range_r:
            raise ValueError("need 0 < eps < R")
        if self.gamma < 0:
            raise ValueError("gamma must be nonnegative")

    def phi_r(self, r):
        r = np.asarray(r, dtype=float)
        s = np.clip((r - (self.range_r - self.eps)) / (2.0 * self.eps), 0.0, 1.0)
        return self.gamma * (1.0 - 3.0 * s * s + 2.0 * s ** 3)

    def dphi_over_r(self, r):
        r = np.asarray(r, dtype=float)
        s = (r - (self.range_r - self.eps)) / (2.0 * self.eps)
        inside = (s > 0.0) & (s < 1.0)
        s = np.clip(s, 0.0, 1.0)
        dphi = self.gamma * (6.0 * s * s - 6.0 * s) / (2.0 * self.eps)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(inside, dphi / r, 0.0)
        return out


@dataclass(frozen=True)
class GibbsPotential:
    """Configuration energy V(x) = activity * n(x) + ordered-pair sum of phi.

    ``envelope_norm`` is the integral over W of the local stability envelope;
    all shipped pair potentials are nonnegative, so the envelope is the
    constant function 1 and the integral is |W|.
    """

    activity: float
    pair: PairPotential

    def describe(self) -> dict:
        return {"activity": self.activity, "pair": self.pair.describe()}


def _pair_sum(g: GibbsPotential, pts: np.ndarray) -> float:
    n = len(pts)
    if n < 2 or isinstance(g.pair, Zero):
        return 0.0
    diff = pts[:, None, :] - pts[None, :, :]
    r = np.linalg.norm(diff, axis=2)
    iu = np.triu_indices(n, k=1)
    return float(np.sum(g.pair.phi_r(r[iu])))


def V(g: GibbsPotential, x: Configuration) -> float:
    """Total energy; V(empty) = 0 and V({xi}) = activity."""
    return g.activity * len(x) + 2.0 * _pair_sum(g, x.points)


def energy_delta(g: GibbsPotential, x: Configuration, xi) -> float:
    """V(x u xi) - V(x) in O(n): activity + 2 * sum_i phi(x_i - xi)."""
    return float(energy_delta_points(g, x.points, np.asarray(xi, dtype=float)))


def energy_delta_points(g: GibbsPotential, pts: np.ndarray, xi: np.ndarray):
    """energy_delta against a raw (n, d) point array; xi may be (m, d) batched."""
    xi = np.asarray(xi, dtype=float)
    batched = xi.ndim == 2
    if len(pts) == 0:
        return np.full(len(xi), g.activity) if batched else g.activity
    if isinstance(g.pair, Zero):
        return np.full(len(xi), g.activity) if batched else g.activity
    if batched:
        r = np.linalg.norm(xi[:, None, :] - pts[None, :, :], axis=2)
        return g.activity + 2.0 * np.sum(g.pair.phi_r(r), axis=1)
    r = np.linalg.norm(pts - xi[None, :], axis=1)
    return g.activity + 2.0 * float(np.sum(g.pair.phi_r(r)))


@dataclass(frozen=True)
class QuadratureSpec:
    """Deterministic tensor-grid midpoint rule with cells_per_axis^d cells."""

    cells_per_axis: int = 128

    def __post_init__(self):
        if self.cells_per_axis < 2:
            raise ValueError("cells_per_axis must be >= 2")


@lru_cache(maxsize=8)
def _midpoint_grid(bounds: tuple, cells: int) -> tuple[np.ndarray, float]:
    b = np.asarray(bounds, dtype=float)
    axes = [np.linspace(lo, hi, cells, endpoint=False) + (hi - lo) / (2 * cells) for lo, hi in b]
    mesh = np.meshgrid(*axes, indexing="ij")
    grid = np.stack([m.ravel() for m in mesh], axis=1)
    cell_vol = float(np.prod((b[:, 1] - b[:, 0]) / cells))
    return grid, cell_vol


def z(g: GibbsPotential, x: Configuration, domain: Domain, quad: QuadratureSpec = QuadratureSpec()) -> float:
    """Normalizing integral of exp(-(V(x u xi) - V(x))) over W.

    Midpoint tensor-grid quadrature, deterministic given (g, x, quad). When
    the integrand is constant (empty x, or no interaction) the exact value
    exp(-activity) * |W| is returned directly.
    """
    if not domain.is_bounded:
        raise UnboundedDomain("z(x) needs a bounded W")
    return float(z_points(g, x.points, domain, quad))


def z_points(g: GibbsPotential, pts: np.ndarray, domain: Domain, quad: QuadratureSpec) -> float:
    if len(pts) == 0 or isinstance(g.pair, Zero):
        return math.exp(-g.activity) * domain.volume
    grid, cell_vol = _midpoint_grid(domain.bounds, quad.cells_per_axis)
    dv = energy_delta_points(g, pts, grid)
    return float(np.sum(np.exp(-dv)) * cell_vol)
