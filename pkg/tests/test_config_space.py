"""Tests for the configuration state space and its metrics."""
import itertools

import numpy as np
import pytest

from bdmove.config_space import (
    Configuration,
    Domain,
    canonical_order,
    count,
    d1,
    empty,
    hausdorff,
    insert,
    remove,
)
from bdmove.errors import (
    EmptyConfiguration,
    IndexOutOfRange,
    NonSimpleConfiguration,
    PointOutsideDomain,
)

BOX1 = Domain(1, bounds=((-5.0, 5.0),))
BOX2 = Domain(2, bounds=((-5.0, 5.0), (-5.0, 5.0)))


def d1_bruteforce(a: np.ndarray, b: np.ndarray) -> float:
    # Independent oracle: enumerate all injective matchings of the smaller
    # configuration into the larger one. Exponential cost, so n <= 6 only.
    if len(a) > len(b):
        a, b = b, a
    na, nb = len(a), len(b)
    if nb == 0:
        return 0.0
    if na == 0:
        return 1.0
    best = np.inf
    for perm in itertools.permutations(range(nb), na):
        cost = sum(min(np.linalg.norm(a[i] - b[j]), 1.0) for i, j in enumerate(perm))
        best = min(best, cost)
    return (best + (nb - na)) / nb


def random_config(rng, domain, n):
    lo, hi = domain.bounds_array()[:, 0], domain.bounds_array()[:, 1]
    return Configuration(domain, rng.uniform(lo, hi, size=(n, domain.dim)))


# ---------------------------------------------------------------- domain

def test_domain_validation():
    d = Domain(2, bounds=((0.0, 1.0), (0.0, 2.0)))
    assert d.is_bounded and d.volume == pytest.approx(2.0)
    with pytest.raises(ValueError):
        Domain(2, bounds=((0.0, 1.0),))
    with pytest.raises(ValueError):
        Domain(1, bounds=((1.0, 0.0),))
    free = Domain(3)
    assert not free.is_bounded


def test_domain_contains():
    d = Domain(2, bounds=((0.0, 1.0), (0.0, 1.0)))
    assert d.contains(np.array([[0.5, 0.5], [0.0, 1.0]]))
    assert not d.contains(np.array([[1.5, 0.5]]))
    assert not d.contains(np.array([[np.nan, 0.5]]))


# --------------------------------------------- construction and identity

def test_canonical_order_lexicographic():
    pts = np.array([[2.0, 1.0], [0.0, 5.0], [2.0, 0.0]])
    out = canonical_order(pts)
    assert np.array_equal(out, [[0.0, 5.0], [2.0, 0.0], [2.0, 1.0]])


def test_configuration_identity_ignores_input_order():
    pts = np.array([[1.0, 2.0], [3.0, -1.0], [0.0, 0.0]])
    x = Configuration(BOX2, pts)
    y = Configuration(BOX2, pts[::-1])
    assert x == y
    assert hash(x) == hash(y)
    assert len(x) == 3


def test_configuration_immutable():
    x = Configuration(BOX2, [[1.0, 1.0]])
    with pytest.raises(AttributeError):
        x.points = np.zeros((1, 2))
    with pytest.raises(ValueError):
        x.points[0, 0] = 9.0


def test_configuration_rejects_outside_points():
    with pytest.raises(PointOutsideDomain):
        Configuration(BOX2, [[99.0, 0.0]])
    with pytest.raises(PointOutsideDomain):
        Configuration(BOX2, [[np.inf, 0.0]])


def test_empty_insert_remove_count():
    x = empty(BOX2)
    assert count(x) == 0 and x.is_empty
    y = insert(x, [1.0, 2.0])
    z_ = insert(y, [-1.0, 0.5])
    assert count(z_) == 2 and count(x) == 0
    back = remove(z_, 0)
    assert count(back) == 1
    with pytest.raises(IndexOutOfRange):
        remove(z_, 2)
    with pytest.raises(IndexOutOfRange):
        remove(x, 0)
    with pytest.raises(PointOutsideDomain):
        insert(x, [99.0, 0.0])


def test_insert_then_remove_roundtrip():
    rng = np.random.default_rng(7)
    x = random_config(rng, BOX2, 5)
    xi = np.array([0.25, -0.75])
    y = insert(x, xi)
    i = next(k for k in range(len(y)) if np.allclose(y.points[k], xi))
    assert remove(y, i) == x


# ----------------------------------------------------------------- d1

def test_d1_spec_examples():
    assert d1(Configuration(BOX2, [[3.0, 3.0]]), empty(BOX2)) == pytest.approx(1.0)
    x = Configuration(BOX1, [[0.0]])
    y = Configuration(BOX1, [[0.0], [2.0]])
    assert d1(x, y) == pytest.approx(0.5)
    assert d1(y, y) == 0.0
    assert d1(empty(BOX2), empty(BOX2)) == 0.0


def test_d1_matches_bruteforce():
    rng = np.random.default_rng(42)
    for _ in range(300):
        nx, ny = rng.integers(0, 7, size=2)
        x = random_config(rng, BOX2, int(nx))
        y = random_config(rng, BOX2, int(ny))
        assert d1(x, y) == pytest.approx(d1_bruteforce(x.points, y.points), abs=1e-12)


def test_d1_metric_axioms():
    rng = np.random.default_rng(3)
    configs = [random_config(rng, BOX2, int(rng.integers(0, 6))) for _ in range(40)]
    for _ in range(800):
        x, y, w = (configs[i] for i in rng.integers(0, len(configs), size=3))
        dxy, dyx = d1(x, y), d1(y, x)
        assert dxy == pytest.approx(dyx, abs=1e-12)
        assert 0.0 <= dxy <= 1.0 + 1e-12
        assert d1(x, y) <= d1(x, w) + d1(w, y) + 1e-9
    for c in configs:
        assert d1(c, c) == 0.0


def test_d1_positivity_on_distinct():
    x = Configuration(BOX2, [[0.0, 0.0], [1.0, 1.0]])
    y = Configuration(BOX2, [[0.0, 0.0], [1.0, 1.0 + 1e-9]])
    assert d1(x, y) > 0.0


def test_d1_count_gap_lower_bound():
    # |n(x) - n(y)| / max(n(x), n(y)) <= d1(x, y)
    rng = np.random.default_rng(11)
    for _ in range(300):
        nx, ny = rng.integers(0, 8, size=2)
        if max(nx, ny) == 0:
            continue
        x = random_config(rng, BOX2, int(nx))
        y = random_config(rng, BOX2, int(ny))
        assert d1(x, y) >= abs(int(nx) - int(ny)) / max(int(nx), int(ny)) - 1e-12


# ----------------------------------------------------------- hausdorff

def test_hausdorff_examples():
    x = Configuration(BOX1, [[0.0], [0.1]])
    y = Configuration(BOX1, [[0.0]])
    assert hausdorff(x, y) == pytest.approx(0.1)
    assert hausdorff(x, x) == 0.0


def test_hausdorff_guards():
    x = Configuration(BOX1, [[0.0]])
    with pytest.raises(EmptyConfiguration):
        hausdorff(x, empty(BOX1))
    dup = Configuration(BOX1, [[0.0], [0.0]])
    with pytest.raises(NonSimpleConfiguration):
        hausdorff(dup, x)


def test_hausdorff_blind_to_count_d1_is_not():
    # Two nearby points collapse toward one: hausdorff -> 0, d1 stays >= 1/2.
    for k in (2, 10, 100):
        x = Configuration(BOX1, [[0.0], [1.0 / k]])
        y = Configuration(BOX1, [[0.0]])
        assert hausdorff(x, y) == pytest.approx(1.0 / k)
        assert d1(x, y) == pytest.approx(0.5)


def test_duplicate_points_allowed_in_d1():
    dup = Configuration(BOX1, [[1.0], [1.0]])
    y = Configuration(BOX1, [[1.0]])
    assert not dup.is_simple()
    assert d1(dup, y) == pytest.approx(0.5)
