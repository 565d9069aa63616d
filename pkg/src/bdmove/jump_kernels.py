"""Birth/death intensities and the jump transition kernels.

A jump model is built from four parts: a birth intensity beta(x), a death
intensity delta(x) (their sum alpha = beta + delta is bounded by a known
constant alpha_star), a birth kernel proposing where the new point goes,
and a death kernel choosing which point dies. The combined jump kernel
picks a birth with probability beta/alpha, else a death.

Intensities here follow the detailed-balance convention for uniform
deaths: the Gibbs-driven birth intensity is z(x) / (n(x) + 1), which makes
the associated birth-death process reversible with respect to the Gibbs
measure of the underlying energy (a death from n+1 points removes a given
point with probability 1/(n+1), and the factor must match).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config_space import Configuration, Domain, insert, remove
from .errors import (
    EmptyConfiguration,
    NegativeKernelMass,
    RejectionBudgetExceeded,
    ThinningBoundViolated,
    UnboundedDomain,
    UnsupportedFamily,
    ZeroIntensity,
)
from .potentials import GibbsPotential, QuadratureSpec, energy_delta_points, z_points
from .rng import Stream, as_stream

BIRTH = "birth"
DEATH = "death"

REJECTION_BUDGET = 1_000_000


# ------------------------------------------------------- scalar fields

@dataclass(frozen=True)
class ConstantField:
    """r -> c."""

    c: float = 1.0

    def __call__(self, r):
        return np.full_like(np.asarray(r, dtype=float), self.c)

    def describe(self) -> dict:
        return {"kind": "constant", "c": self.c}


@dataclass(frozen=True)
class LinearField:
    """r -> c * r."""

    c: float = 1.0

    def __call__(self, r):
        return self.c * np.asarray(r, dtype=float)

    def describe(self) -> dict:
        return {"kind": "linear", "c": self.c}


@dataclass(frozen=True)
class ExpDecayField:
    """r -> c * exp(-r / ell)."""

    c: float = 1.0
    ell: float = 1.0

    def __call__(self, r):
        return self.c * np.exp(-np.asarray(r, dtype=float) / self.ell)

    def describe(self) -> dict:
        return {"kind": "exp_decay", "c": self.c, "ell": self.ell}


# ------------------------------------------------------- death kernels

@dataclass(frozen=True)
class UniformDeath:
    """Every point dies with probability 1/n."""

    def weights_points(self, pts: np.ndarray) -> np.ndarray:
        n = len(pts)
        return np.full(n, 1.0 / n)

    def draw_index(self, pts: np.ndarray, stream: Stream) -> int:
        return stream.integer(len(pts))

    def describe(self) -> dict:
        return {"kind": "uniform_death"}


@dataclass(frozen=True)
class WeightedDeath:
    """Point i dies with probability proportional to sum_{k != i} g(||x_k - x_i||)."""

    g: ConstantField | LinearField | ExpDecayField = ConstantField(1.0)

    def weights_points(self, pts: np.ndarray) -> np.ndarray:
        n = len(pts)
        if n == 1:
            return np.ones(1)
        dist = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2)
        vals = np.asarray(self.g(dist), dtype=float)
        np.fill_diagonal(vals, 0.0)
        w = vals.sum(axis=1)
        if np.any(w < 0.0):
            raise NegativeKernelMass("death weights must be nonnegative")
        total = w.sum()
        if total <= 0.0:
            return np.full(n, 1.0 / n)
        return w / total

    def draw_index(self, pts: np.ndarray, stream: Stream) -> int:
        w = self.weights_points(pts)
        u = stream.uniform()
        return int(np.searchsorted(np.cumsum(w), u, side="right").clip(0, len(w) - 1))

    def describe(self) -> dict:
        return {"kind": "weighted_death", "g": self.g.describe()}


def death_weights(k, x: Configuration) -> np.ndarray:
    """Removal probabilities for each point of x, in canonical point order."""
    if len(x) == 0:
        raise EmptyConfiguration("death weights need at least one point")
    return k.weights_points(x.points)


def sample_death(k, x: Configuration, rng) -> Configuration:
    """Remove one point drawn from the kernel's weights."""
    if len(x) == 0:
        raise EmptyConfiguration("cannot sample a death from the empty configuration")
    return remove(x, k.draw_index(x.points, as_stream(rng)))


# ------------------------------------------------------- birth kernels

def _uniform_point(domain: Domain, stream: Stream) -> np.ndarray:
    b = domain.bounds_array()
    out = np.empty(domain.dim)
    for k in range(domain.dim):
        out[k] = b[k, 0] + (b[k, 1] - b[k, 0]) * stream.uniform()
    return out


@dataclass(frozen=True)
class UniformBirth:
    """New point uniform on the (bounded) domain."""

    def draw_point(self, domain: Domain, pts: np.ndarray, stream: Stream) -> np.ndarray:
        if not domain.is_bounded:
            raise UnboundedDomain("uniform birth needs a bounded domain")
        return _uniform_point(domain, stream)

    def describe(self) -> dict:
        return {"kind": "uniform_birth"}


@dataclass(frozen=True)
class GibbsBirth:
    """New-point density proportional to exp(-(V(x u xi) - V(x))) on W.

    Sampled by rejection: propose uniformly on W and accept with probability
    exp(-(delta_V - activity)), which lies in [0, 1] because the shipped pair
    potentials are nonnegative (local stability).
    """

    g: GibbsPotential
    max_proposals: int = REJECTION_BUDGET

    def draw_point(self, domain: Domain, pts: np.ndarray, stream: Stream) -> np.ndarray:
        if not domain.is_bounded:
            raise UnboundedDomain("Gibbs birth needs a bounded domain")
        for _ in range(self.max_proposals):
            xi = _uniform_point(domain, stream)
            t = float(energy_delta_points(self.g, pts, xi)) - self.g.activity
            if t < -1e-9:
                raise ThinningBoundViolated(
                    "rejection envelope violated; pair potential must be nonnegative"
                )
            if stream.uniform() <= math.exp(-max(t, 0.0)):
                return xi
        raise RejectionBudgetExceeded(
            f"no accepted birth proposal in {self.max_proposals} draws"
        )

    def describe(self) -> dict:
        return {"kind": "gibbs_birth", "potential": self.g.describe()}


@dataclass(frozen=True)
class MixtureBirth:
    """Gaussian-mixture birth centred at the existing points.

    From a nonempty x: pick a centre x_i uniformly and draw an isotropic
    Gaussian around it with standard deviation base_scale * v(x_i, x), where
    v(x_i, x) = exp(phi1(x_i) + sum_{k != i} phi2(||x_k - x_i||)). From the
    empty configuration: draw from the base Gaussian centred at the middle
    of W with standard deviation base_scale. Points falling outside W are
    re-drawn (truncation); phi1 reads the norm of the centre position and
    phi2 the pairwise distances.
    """

    base_scale: float = 0.25
    phi1: ConstantField | LinearField | ExpDecayField = ConstantField(0.0)
    phi2: ConstantField | LinearField | ExpDecayField = ConstantField(0.0)
    max_proposals: int = REJECTION_BUDGET

    def dispersion(self, pts: np.ndarray, i: int) -> float:
        """v(x_i, x); equals exp(phi1) alone when x has a single point."""
        centre = pts[i]
        s = float(self.phi1(np.linalg.norm(centre)))
        if len(pts) > 1:
            others = np.delete(pts, i, axis=0)
            dist = np.linalg.norm(others - centre[None, :], axis=1)
            s += float(np.sum(self.phi2(dist)))
        return math.exp(s)

    def draw_point(self, domain: Domain, pts: np.ndarray, stream: Stream) -> np.ndarray:
        n = len(pts)
        if n == 0:
            b = domain.bounds_array() if domain.is_bounded else None
            centre = b.mean(axis=1) if b is not None else np.zeros(domain.dim)
            scale = self.base_scale
        else:
            i = stream.integer(n)
            centre = pts[i]
            scale = self.base_scale * self.dispersion(pts, i)
        for _ in range(self.max_proposals):
            xi = centre + scale * stream.normals(domain.dim)
            if not domain.is_bounded or domain.contains(xi[None, :]):
                return xi
        raise RejectionBudgetExceeded(
            f"no in-domain birth proposal in {self.max_proposals} draws"
        )

    def describe(self) -> dict:
        return {
            "kind": "mixture_birth",
            "base_scale": self.base_scale,
            "phi1": self.phi1.describe(),
            "phi2": self.phi2.describe(),
        }


def sample_birth(k, x: Configuration, rng) -> Configuration:
    """Add one point drawn from the kernel's new-point density."""
    xi = k.draw_point(x.domain, x.points, as_stream(rng))
    return insert(x, xi)


# -------------------------------------------------------- intensities

class BirthIntensity:
    def rate(self, x: Configuration) -> float:
        return self.rate_points(x.domain, x.points)

    def rate_points(self, domain: Domain, pts: np.ndarray) -> float:
        raise NotImplementedError

    def sup_sequence(self, domain: Domain, n_max: int) -> np.ndarray:
        raise UnsupportedFamily("no closed-form count envelope for this intensity")


class DeathIntensity:
    def rate(self, x: Configuration) -> float:
        return self.rate_points(x.domain, x.points)

    def rate_points(self, domain: Domain, pts: np.ndarray) -> float:
        raise NotImplementedError

    def inf_sequence(self, domain: Domain, n_max: int) -> np.ndarray:
        raise UnsupportedFamily("no closed-form count lower bound for this intensity")

    def sup_sequence(self, domain: Domain, n_max: int) -> np.ndarray:
        raise UnsupportedFamily("no closed-form count upper bound for this intensity")


class ConstantBirthRate(BirthIntensity):
    """beta(x) = b0 while n(x) < cutoff, 0 beyond (no cutoff by default)."""

    __slots__ = ("b0", "cutoff")

    def __init__(self, b0: float, cutoff: int | None = None):
        if b0 < 0:
            raise ValueError("b0 must be nonnegative")
        self.b0 = float(b0)
        self.cutoff = cutoff

    def rate_points(self, domain, pts) -> float:
        if self.cutoff is not None and len(pts) >= self.cutoff:
            return 0.0
        return self.b0

    def sup_sequence(self, domain, n_max) -> np.ndarray:
        n = np.arange(n_max + 1)
        if self.cutoff is None:
            return np.full(n_max + 1, self.b0)
        return np.where(n < self.cutoff, self.b0, 0.0)

    def describe(self) -> dict:
        return {"kind": "constant_birth", "b0": self.b0, "cutoff": self.cutoff}


class GibbsBirthIntensity(BirthIntensity):
    """beta(x) = z(x) / (n(x) + 1): reversible partner of uniform unit deaths.

    The count envelope used for domination is exp(-activity)|W| / (n + 1),
    an upper bound for sup over E_n since z(x) <= exp(-activity)|W| for
    nonnegative pair potentials (attained identically when the pair term
    vanishes). The last evaluation is memoised because the simulator asks
    for the rate and then immediately conditions a jump on the same state.
    """

    __slots__ = ("g", "quad", "_key", "_val")

    def __init__(self, g: GibbsPotential, quad: QuadratureSpec = QuadratureSpec()):
        self.g = g
        self.quad = quad
        self._key = None
        self._val = 0.0

    def rate_points(self, domain, pts) -> float:
        key = pts.tobytes()
        if key != self._key:
            self._val = z_points(self.g, pts, domain, self.quad) / (len(pts) + 1.0)
            self._key = key
        return self._val

    def sup_sequence(self, domain, n_max) -> np.ndarray:
        if not domain.is_bounded:
            raise UnboundedDomain("the Gibbs intensity envelope needs a bounded domain")
        c = math.exp(-self.g.activity) * domain.volume
        return c / (np.arange(n_max + 1) + 1.0)

    def describe(self) -> dict:
        return {
            "kind": "gibbs_birth_intensity",
            "potential": self.g.describe(),
            "cells_per_axis": self.quad.cells_per_axis,
        }


class UnitDeath(DeathIntensity):
    """delta(x) = 1 whenever x is nonempty."""

    __slots__ = ()

    def rate_points(self, domain, pts) -> float:
        return 1.0 if len(pts) >= 1 else 0.0

    def inf_sequence(self, domain, n_max) -> np.ndarray:
        return (np.arange(n_max + 1) >= 1).astype(float)

    sup_sequence = inf_sequence

    def describe(self) -> dict:
        return {"kind": "unit_death"}


class LinearDeath(DeathIntensity):
    """delta(x) = d0 * min(n(x), n_cap); the cap keeps alpha bounded."""

    __slots__ = ("d0", "n_cap")

    def __init__(self, d0: float, n_cap: int = 10_000):
        if d0 < 0:
            raise ValueError("d0 must be nonnegative")
        if n_cap < 1:
            raise ValueError("n_cap must be >= 1")
        self.d0 = float(d0)
        self.n_cap = int(n_cap)

    def rate_points(self, domain, pts) -> float:
        return self.d0 * min(len(pts), self.n_cap)

    def inf_sequence(self, domain, n_max) -> np.ndarray:
        return self.d0 * np.minimum(np.arange(n_max + 1), self.n_cap).astype(float)

    sup_sequence = inf_sequence

    def describe(self) -> dict:
        return {"kind": "linear_death", "d0": self.d0, "n_cap": self.n_cap}


@dataclass(frozen=True)
class IntensitySpec:
    """Bundle of birth/death intensities with the global jump-rate bound."""

    birth: BirthIntensity
    death: DeathIntensity
    alpha_star: float

    def __post_init__(self):
        if not self.alpha_star > 0:
            raise ValueError("alpha_star must be positive")

    def beta(self, x: Configuration) -> float:
        return self.birth.rate(x)

    def delta(self, x: Configuration) -> float:
        return self.death.rate(x)

    def alpha(self, x: Configuration) -> float:
        return self.birth.rate(x) + self.death.rate(x)

    def describe(self) -> dict:
        return {
            "birth": self.birth.describe(),
            "death": self.death.describe(),
            "alpha_star": self.alpha_star,
        }


def sup_inf_sequences(intens: IntensitySpec, domain: Domain, n_max: int):
    """Count-indexed envelopes: (birth sup, death inf, jump-rate sup) per n.

    The first two form a valid dominating pair for the coupled chain; the
    third bounds alpha on each E_n and its maximum is a valid alpha_star.
    Raises UnsupportedFamily for intensities without a closed form.
    """
    beta_n = np.asarray(intens.birth.sup_sequence(domain, n_max), dtype=float)
    delta_n = np.asarray(intens.death.inf_sequence(domain, n_max), dtype=float)
    alpha_n = beta_n + np.asarray(intens.death.sup_sequence(domain, n_max), dtype=float)
    return beta_n, delta_n, alpha_n


def bounded_intensities(
    birth: BirthIntensity,
    death: DeathIntensity,
    domain: Domain,
    n_max: int = 10_000,
) -> IntensitySpec:
    """IntensitySpec with alpha_star computed from the family envelopes."""
    beta_n = np.asarray(birth.sup_sequence(domain, n_max), dtype=float)
    delta_sup = np.asarray(death.sup_sequence(domain, n_max), dtype=float)
    return IntensitySpec(birth, death, float(np.max(beta_n + delta_sup)))


def sample_jump(intens: IntensitySpec, bk, dk, x: Configuration, rng):
    """One draw from the combined jump kernel.

    Returns (new configuration, tag) where the tag is BIRTH with probability
    beta(x)/alpha(x) and DEATH otherwise.
    """
    beta = intens.beta(x)
    delta = intens.delta(x)
    alpha = beta + delta
    if alpha <= 0.0:
        raise ZeroIntensity("jump kernel undefined where alpha(x) = 0")
    stream = as_stream(rng)
    if stream.uniform() * alpha < beta:
        return sample_birth(bk, x, stream), BIRTH
    return sample_death(dk, x, stream), DEATH
