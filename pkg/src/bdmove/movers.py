"""Continuous inter-jump motion on the fixed-count strata.

Movers never change the number of points. Four kinds are shipped: the
identity (pure-jump processes), overdamped Langevin dynamics driven by a
pair potential, reflected Brownian motion, and a deterministic
growth-interaction flow acting on a mark coordinate.

The Langevin drift on point i is -2 sum_{j != i} grad phi(z_i - z_j): the
gradient of the configuration energy, whose ordered-pair sum counts every
unordered pair twice. With inverse temperature 1 the resulting diffusion
leaves exp(-V) invariant on each stratum, matching the jump side.

All step routines accept arbitrary leading batch axes on the point array
(shape (..., n, d)), so many independent trajectories can be advanced in
lock-step; the public advance operates on one configuration.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config_space import Configuration, Domain
from .errors import NonFiniteState
from .potentials import PairPotential, Zero
from .rng import STREAM_MOVE, Stream, as_stream, substream


def fold_into_box(u: np.ndarray, bounds: np.ndarray) -> np.ndarray:
    """Reflect coordinates into the box by the triangular fold.

    The fold of a free path's endpoint has exactly the law of the reflected
    path's endpoint, coordinate by coordinate, so this is not an
    approximation for Brownian steps of any size.
    """
    lo = bounds[:, 0]
    width = bounds[:, 1] - bounds[:, 0]
    v = np.mod(u - lo, 2.0 * width)
    return lo + np.minimum(v, 2.0 * width - v)


def _check_finite(pts: np.ndarray) -> None:
    if not np.all(np.isfinite(pts)):
        raise NonFiniteState("non-finite coordinate after a move step")


@dataclass(frozen=True)
class Constant:
    """Identity mover: the configuration does not change between jumps."""

    def advance_points(self, domain, pts, dt, stream) -> np.ndarray:
        return pts

    def describe(self) -> dict:
        return {"kind": "constant"}


@dataclass(frozen=True)
class LangevinGradient:
    """Tamed Euler-Maruyama discretisation of interacting Langevin dynamics.

    Each advance splits dt into ceil(dt/step) equal substeps. Per substep of
    size h the drift b_i = -2 sum_{j != i} grad phi(z_i - z_j) is tamed to
    b_i / (1 + taming * h * ||b_i||), applied, Gaussian noise with standard
    deviation sqrt(2h/inv_temp) is added, and the result is folded back
    into the box. With no interaction the substep split is skipped: one
    folded Gaussian over the whole interval already has the exact law.
    """

    pair: PairPotential
    inv_temp: float = 1.0
    step: float = 1e-3
    taming: float = 1.0

    def __post_init__(self):
        if self.inv_temp <= 0 or self.step <= 0 or self.taming < 0:
            raise ValueError("need inv_temp > 0, step > 0, taming >= 0")

    def _drift(self, pts: np.ndarray) -> np.ndarray:
        diff = pts[..., :, None, :] - pts[..., None, :, :]
        r = np.linalg.norm(diff, axis=-1)
        n = pts.shape[-2]
        eye = np.eye(n, dtype=bool)
        r_safe = np.where(eye, 1.0, r)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            factor = np.asarray(self.pair.dphi_over_r(r_safe), dtype=float)
        factor = np.where(eye, 0.0, factor)
        return -2.0 * np.einsum("...ij,...ijd->...id", factor, diff)

    def advance_points(self, domain, pts, dt, stream) -> np.ndarray:
        if pts.shape[-2] == 0:
            return pts
        bounds = domain.bounds_array() if domain.is_bounded else None
        scale0 = math.sqrt(2.0 * dt / self.inv_temp)
        if isinstance(self.pair, Zero) or pts.shape[-2] == 1:
            out = pts + scale0 * stream.normals(pts.shape)
            out = fold_into_box(out, bounds) if bounds is not None else out
            _check_finite(out)
            return out
        k = max(1, math.ceil(dt / self.step))
        h = dt / k
        noise_scale = math.sqrt(2.0 * h / self.inv_temp)
        out = pts
        for _ in range(k):
            b = self._drift(out)
            nb = np.linalg.norm(b, axis=-1, keepdims=True)
            b = b / (1.0 + self.taming * h * nb)
            out = out + h * b + noise_scale * stream.normals(out.shape)
            if bounds is not None:
                out = fold_into_box(out, bounds)
        _check_finite(out)
        return out

    def describe(self) -> dict:
        return {
            "kind": "langevin",
            "pair": self.pair.describe(),
            "inv_temp": self.inv_temp,
            "step": self.step,
            "taming": self.taming,
        }


@dataclass(frozen=True)
class ReflectedBrownian:
    """Brownian motion with reflecting box walls; exact for any interval."""

    inv_temp: float = 1.0

    def __post_init__(self):
        if self.inv_temp <= 0:
            raise ValueError("inv_temp must be positive")

    def advance_points(self, domain, pts, dt, stream) -> np.ndarray:
        if pts.shape[-2] == 0:
            return pts
        out = pts + math.sqrt(2.0 * dt / self.inv_temp) * stream.normals(pts.shape)
        if domain.is_bounded:
            out = fold_into_box(out, domain.bounds_array())
        _check_finite(out)
        return out

    def describe(self) -> dict:
        return {"kind": "reflected_brownian", "inv_temp": self.inv_temp}


# ----------------------------------------------------- growth families

@dataclass(frozen=True)
class ConstantGrowth:
    """dm/dt = kappa for every mark."""

    kappa: float

    def mark_rate(self, marks, positions):
        return np.full_like(marks, self.kappa)

    def describe(self) -> dict:
        return {"kind": "constant_growth", "kappa": self.kappa}


@dataclass(frozen=True)
class LogisticGrowth:
    """dm/dt = kappa * m * (1 - m / m_max)."""

    kappa: float
    m_max: float = 1.0

    def mark_rate(self, marks, positions):
        return self.kappa * marks * (1.0 - marks / self.m_max)

    def describe(self) -> dict:
        return {"kind": "logistic_growth", "kappa": self.kappa, "m_max": self.m_max}


@dataclass(frozen=True)
class CompetitionGrowth:
    """Distance-weighted competition.

    dm_i/dt = kappa * max(0, 1 - sum_{j != i} exp(-||U_i - U_j||) m_j / m_max)
    with U the position part of each point; crowded points stop growing.
    """

    kappa: float
    m_max: float = 1.0

    def weight_matrix(self, positions):
        diff = positions[..., :, None, :] - positions[..., None, :, :]
        w = np.exp(-np.linalg.norm(diff, axis=-1))
        n = positions.shape[-2]
        return np.where(np.eye(n, dtype=bool), 0.0, w)

    def mark_rate(self, marks, positions):
        w = self.weight_matrix(positions)
        load = np.einsum("...ij,...j->...i", w, marks) / self.m_max
        return self.kappa * np.maximum(0.0, 1.0 - load)

    def describe(self) -> dict:
        return {"kind": "competition_growth", "kappa": self.kappa, "m_max": self.m_max}


@dataclass(frozen=True)
class GrowthInteraction:
    """Deterministic growth of the mark (last) coordinate; positions fixed.

    Integrates the mark system with classical fourth-order Runge-Kutta in
    ceil(dt/step) substeps, then clamps marks into the box (growth toward a
    wall saturates there).
    """

    family: ConstantGrowth | LogisticGrowth | CompetitionGrowth
    step: float = 1e-3

    def __post_init__(self):
        if self.step <= 0:
            raise ValueError("step must be positive")

    def advance_points(self, domain, pts, dt, stream) -> np.ndarray:
        if pts.shape[-2] == 0:
            return pts
        positions = pts[..., :-1]
        marks = pts[..., -1].copy()
        k = max(1, math.ceil(dt / self.step))
        h = dt / k
        rate = self.family.mark_rate
        for _ in range(k):
            k1 = rate(marks, positions)
            k2 = rate(marks + 0.5 * h * k1, positions)
            k3 = rate(marks + 0.5 * h * k2, positions)
            k4 = rate(marks + h * k3, positions)
            marks = marks + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if domain.is_bounded:
            lo, hi = domain.bounds_array()[-1]
            marks = np.clip(marks, lo, hi)
        out = np.concatenate([positions, marks[..., None]], axis=-1)
        _check_finite(out)
        return out

    def describe(self) -> dict:
        return {"kind": "growth_interaction", "family": self.family.describe(), "step": self.step}


def advance(m, x: Configuration, dt: float, rng) -> Configuration:
    """Move every point of x for duration dt; the count never changes."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    if isinstance(m, Constant) or len(x) == 0:
        return x
    pts = m.advance_points(x.domain, x.points, dt, as_stream(rng))
    return Configuration(x.domain, pts)


def permutation_equivariance_check(m, x: Configuration, seed: int) -> bool:
    """Advance two input orderings of x with coupled noise; compare results.

    Noise attaches to points in canonical order (configurations sort their
    points on construction), so the two runs must coincide exactly.
    """
    if len(x) < 2:
        raise ValueError("need at least two points")
    perm = np.random.default_rng(seed).permutation(len(x))
    y = Configuration(x.domain, x.points[perm])
    a = advance(m, x, 0.25, Stream(substream(seed, 0, STREAM_MOVE)))
    b = advance(m, y, 0.25, Stream(substream(seed, 0, STREAM_MOVE)))
    return a == b
