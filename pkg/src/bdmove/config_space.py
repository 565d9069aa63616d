"""State space of finite point configurations in a box W of R^d.

A state is an unordered finite multiset of points. The module provides the
normalized optimal-matching distance d1 (which keeps the point count a
continuous function of the state) and the Hausdorff distance (only a metric
on simple configurations, kept here for the discontinuity demonstration).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import (
    EmptyConfiguration,
    IndexOutOfRange,
    NonSimpleConfiguration,
    PointOutsideDomain,
)


@dataclass(frozen=True)
class Domain:
    """Box domain W = [a_1,b_1] x ... x [a_d,b_d], or all of R^d.

    Parameters
    ----------
    dim : int
        Space dimension d >= 1.
    bounds : array of shape (d, 2), or None
        Per-coordinate intervals; None means W = R^d.
    """

    dim: int
    bounds: tuple | None = None

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if self.bounds is not None:
            b = np.asarray(self.bounds, dtype=float)
            if b.shape != (self.dim, 2):
                raise ValueError("bounds must have shape (dim, 2)")
            if not np.all(b[:, 0] < b[:, 1]):
                raise ValueError("each bounded interval needs a_i < b_i")
            object.__setattr__(self, "bounds", tuple(map(tuple, b)))

    @property
    def is_bounded(self) -> bool:
        return self.bounds is not None

    def bounds_array(self) -> np.ndarray:
        if self.bounds is None:
            raise ValueError("unbounded domain has no bounds array")
        return np.asarray(self.bounds, dtype=float)

    @property
    def volume(self) -> float:
        b = self.bounds_array()
        return float(np.prod(b[:, 1] - b[:, 0]))

    def contains(self, points: np.ndarray) -> bool:
        """True iff every row of `points` lies in W."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[1] != self.dim:
            return False
        if not np.all(np.isfinite(pts)):
            return False
        if self.bounds is None:
            return True
        b = self.bounds_array()
        return bool(np.all(pts >= b[:, 0]) and np.all(pts <= b[:, 1]))


def canonical_order(points: np.ndarray) -> np.ndarray:
    """Lexicographic order on coordinate vectors (first coordinate major)."""
    if len(points) <= 1:
        return points
    keys = tuple(points[:, j] for j in reversed(range(points.shape[1])))
    return points[np.lexsort(keys)]


class Configuration:
    """Unordered finite multiset of points in W.

    Points are stored in canonical lexicographic order so that equality and
    hashing are order-free. Instances are immutable value types.
    """

    __slots__ = ("domain", "points")

    def __init__(self, domain: Domain, points=None):
        object.__setattr__(self, "domain", domain)
        if points is None:
            pts = np.empty((0, domain.dim), dtype=float)
        else:
            pts = np.array(points, dtype=float).reshape(-1, domain.dim)
        if len(pts) and not domain.contains(pts):
            raise PointOutsideDomain("a point lies outside W")
        pts = canonical_order(pts)
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    def __setattr__(self, name, value):
        raise AttributeError("Configuration is immutable")

    def __len__(self) -> int:
        return len(self.points)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Configuration):
            return NotImplemented
        return self.domain == other.domain and np.array_equal(self.points, other.points)

    def __hash__(self) -> int:
        return hash((self.domain, self.points.tobytes()))

    def __repr__(self) -> str:
        return f"Configuration(n={len(self)}, d={self.domain.dim})"

    @property
    def is_empty(self) -> bool:
        return len(self.points) == 0

    def is_simple(self) -> bool:
        """True iff no two points are bitwise equal."""
        n = len(self.points)
        return len(np.unique(self.points, axis=0)) == n if n else True


def empty(domain: Domain) -> Configuration:
    return Configuration(domain)


def count(x: Configuration) -> int:
    """Number of points n(x)."""
    return len(x)


def insert(x: Configuration, xi) -> Configuration:
    """Configuration x with the point xi added; xi must lie in W."""
    xi = np.asarray(xi, dtype=float).reshape(-1)
    if xi.shape != (x.domain.dim,) or not x.domain.contains(xi):
        raise PointOutsideDomain(f"point {xi!r} outside W")
    return Configuration(x.domain, np.vstack([x.points, xi[None, :]]))


def remove(x: Configuration, i: int) -> Configuration:
    """Configuration x with its i-th point (canonical order) removed."""
    if not 0 <= i < len(x):
        raise IndexOutOfRange(f"index {i} for configuration of size {len(x)}")
    return Configuration(x.domain, np.delete(x.points, i, axis=0))


def _truncated_cost(small: np.ndarray, large: np.ndarray) -> np.ndarray:
    diff = small[:, None, :] - large[None, :, :]
    return np.minimum(np.linalg.norm(diff, axis=2), 1.0)


def d1(x: Configuration, y: Configuration) -> float:
    """Normalized optimal-matching distance between configurations.

    With n(x) <= n(y): the cheapest assignment of every point of x to a
    distinct point of y under the truncated cost ||.|| ^ 1, plus a penalty
    of 1 per unmatched point of y, divided by n(y). The distance between
    two empty configurations is 0, and between empty and non-empty is 1.

    The assignment is solved exactly; unmatched points cost exactly 1, so
    solving the rectangular problem and adding the surplus term equals the
    square problem padded with unit-cost dummy rows.
    """
    a, b = (x, y) if len(x) <= len(y) else (y, x)
    na, nb = len(a), len(b)
    if nb == 0:
        return 0.0
    if na == 0:
        return 1.0
    cost = _truncated_cost(a.points, b.points)
    rows, cols = linear_sum_assignment(cost)
    matched = float(cost[rows, cols].sum())
    return (matched + (nb - na)) / nb


def hausdorff(x: Configuration, y: Configuration) -> float:
    """Hausdorff distance; defined only for non-empty simple configurations."""
    if x.is_empty or y.is_empty:
        raise EmptyConfiguration("hausdorff needs non-empty configurations")
    if not (x.is_simple() and y.is_simple()):
        raise NonSimpleConfiguration("hausdorff needs simple configurations")
    dist = np.linalg.norm(x.points[:, None, :] - y.points[None, :, :], axis=2)
    return float(max(dist.min(axis=1).max(), dist.min(axis=0).max()))
