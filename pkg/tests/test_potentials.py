"""Tests for pair potentials, configuration energy and the z(x) integral."""
import math

import numpy as np
import pytest

from bdmove.config_space import Configuration, Domain, empty, insert
from bdmove.errors import SingularGradient, UnboundedDomain
from bdmove.potentials import (
    GibbsPotential,
    LennardJonesRepulsive,
    QuadratureSpec,
    Riesz,
    SoftCore,
    StraussRegularised,
    V,
    Zero,
    energy_delta,
    z,
)

UNIT2 = Domain(2, bounds=((0.0, 1.0), (0.0, 1.0)))


def fd_gradient(pot, xi, h=1e-6):
    xi = np.asarray(xi, dtype=float)
    out = np.zeros_like(xi)
    for k in range(len(xi)):
        e = np.zeros_like(xi)
        e[k] = h
        out[k] = (pot.phi(xi + e) - pot.phi(xi - e)) / (2 * h)
    return out


ALL_POTENTIALS = [
    Zero(),
    LennardJonesRepulsive(c=0.8),
    Riesz(c=1.2, alpha=1.0, dim=2),
    SoftCore(c=2.0),
    StraussRegularised(gamma=2.0, range_r=0.5, eps=0.1),
]


@pytest.mark.parametrize("pot", ALL_POTENTIALS, ids=lambda p: type(p).__name__)
def test_gradient_matches_finite_differences(pot):
    rng = np.random.default_rng(5)
    for _ in range(40):
        xi = rng.uniform(-1.2, 1.2, size=2)
        r = np.linalg.norm(xi)
        if r < 0.15:
            continue
        g = pot.grad(xi)
        assert np.allclose(g, fd_gradient(pot, xi), rtol=2e-4, atol=2e-6)


@pytest.mark.parametrize("pot", ALL_POTENTIALS, ids=lambda p: type(p).__name__)
def test_potential_even_and_nonnegative(pot):
    rng = np.random.default_rng(6)
    for _ in range(60):
        xi = rng.uniform(-2.0, 2.0, size=2)
        v = pot.phi(xi)
        assert v >= 0.0
        assert v == pytest.approx(pot.phi(-xi))


def test_singular_values_and_gradients():
    lj = LennardJonesRepulsive(c=1.0)
    rz = Riesz(c=1.0, alpha=1.5, dim=2)
    origin = np.zeros(2)
    assert lj.phi(origin) == np.inf
    assert rz.phi(origin) == np.inf
    for pot in (lj, rz, SoftCore(c=1.0)):
        with pytest.raises(SingularGradient):
            pot.grad(origin)
    # non-singular kinds return a zero gradient at the origin
    assert np.all(StraussRegularised(2.0, 0.5, 0.1).grad(origin) == 0.0)
    assert np.all(Zero().grad(origin) == 0.0)


def test_strauss_shape_and_smoothness():
    pot = StraussRegularised(gamma=2.0, range_r=0.5, eps=0.1)
    assert pot.phi([0.3, 0.0]) == pytest.approx(2.0)   # r = 0.3 <= R - eps
    assert pot.phi([0.7, 0.0]) == 0.0                  # r = 0.7 >= R + eps
    assert pot.phi([0.5, 0.0]) == pytest.approx(1.0)   # midpoint of the ramp
    # one-sided slopes agree at both joins, so phi is C^1
    for r0 in (0.4, 0.6):
        h = 1e-8
        left = (pot.phi([r0, 0.0]) - pot.phi([r0 - h, 0.0])) / h
        right = (pot.phi([r0 + h, 0.0]) - pot.phi([r0, 0.0])) / h
        assert left == pytest.approx(right, abs=1e-5)
        assert left == pytest.approx(0.0, abs=1e-5)


def test_parameter_validation():
    with pytest.raises(ValueError):
        LennardJonesRepulsive(c=-1.0)
    with pytest.raises(ValueError):
        Riesz(c=1.0, alpha=2.5, dim=2)
    with pytest.raises(ValueError):
        SoftCore(c=0.0)
    with pytest.raises(ValueError):
        StraussRegularised(gamma=1.0, range_r=0.1, eps=0.2)
    with pytest.raises(ValueError):
        QuadratureSpec(cells_per_axis=1)


# ------------------------------------------------------------- energy

def test_energy_base_cases():
    g = GibbsPotential(activity=0.7, pair=SoftCore(c=1.0))
    assert V(g, empty(UNIT2)) == 0.0
    assert V(g, Configuration(UNIT2, [[0.5, 0.5]])) == pytest.approx(0.7)


def test_energy_counts_ordered_pairs():
    # V(x) = a n + sum_{i != j} phi(x_i - x_j): each unordered pair twice.
    pair = SoftCore(c=1.0)
    g = GibbsPotential(activity=0.0, pair=pair)
    x = Configuration(UNIT2, [[0.2, 0.2], [0.8, 0.4], [0.4, 0.9]])
    pts = x.points
    direct = sum(
        pair.phi(pts[i] - pts[j]) for i in range(3) for j in range(3) if i != j
    )
    assert V(g, x) == pytest.approx(direct, rel=1e-12)


def test_energy_delta_consistent_with_v():
    # keep points well separated: a near-collision inside x makes V huge and
    # the difference V(x u xi) - V(x) catastrophically cancel
    rng = np.random.default_rng(9)
    base = np.stack(np.meshgrid([0.2, 0.5, 0.8], [0.2, 0.8]), axis=-1).reshape(-1, 2)
    for pair in ALL_POTENTIALS:
        g = GibbsPotential(activity=1.3, pair=pair)
        x = Configuration(UNIT2, base + rng.uniform(-0.05, 0.05, size=base.shape))
        xi = np.array([0.5, 0.5]) + rng.uniform(-0.04, 0.04, size=2)
        expected = V(g, insert(x, xi)) - V(g, x)
        assert energy_delta(g, x, xi) == pytest.approx(expected, rel=1e-9, abs=1e-9)


def test_energy_delta_from_empty_is_activity():
    g = GibbsPotential(activity=-0.4, pair=LennardJonesRepulsive(c=1.0))
    assert energy_delta(g, empty(UNIT2), [0.5, 0.5]) == pytest.approx(-0.4)


# ------------------------------------------------------------------ z

def test_z_exact_when_no_interaction():
    dom = Domain(2, bounds=((0.0, 2.0), (0.0, 3.0)))
    g = GibbsPotential(activity=0.5, pair=Zero())
    x = Configuration(dom, [[1.0, 1.0]])
    expected = math.exp(-0.5) * 6.0
    assert z(g, x, dom) == pytest.approx(expected, rel=1e-12)
    g2 = GibbsPotential(activity=0.5, pair=SoftCore(c=1.0))
    assert z(g2, empty(dom), dom) == pytest.approx(expected, rel=1e-12)


def test_z_local_stability_envelope():
    # nonnegative pair potentials give z(x) <= exp(-a) |W|
    rng = np.random.default_rng(21)
    for pair in ALL_POTENTIALS:
        g = GibbsPotential(activity=0.2, pair=pair)
        x = Configuration(UNIT2, rng.uniform(0, 1, size=(4, 2)))
        val = z(g, x, UNIT2, QuadratureSpec(64))
        assert 0.0 < val <= math.exp(-0.2) * 1.0 + 1e-9


def test_z_strauss_against_geometry():
    # gamma -> inf turns Strauss into a hard core; z approaches
    # exp(-a) * |W minus the union of R-balls|, computed here by Monte Carlo.
    dom = UNIT2
    pot = StraussRegularised(gamma=60.0, range_r=0.2, eps=0.02)
    g = GibbsPotential(activity=0.3, pair=pot)
    pts = np.array([[0.25, 0.25], [0.75, 0.75]])
    x = Configuration(dom, pts)
    rng = np.random.default_rng(123)
    u = rng.uniform(0, 1, size=(200_000, 2))
    rmin = np.min(np.linalg.norm(u[:, None, :] - pts[None, :, :], axis=2), axis=1)
    # the ramp occupies [R - eps, R + eps]; count clear points only
    frac_free = np.mean(rmin >= pot.range_r + pot.eps)
    lo = math.exp(-0.3) * frac_free
    hi = math.exp(-0.3) * 1.0
    val = z(g, x, dom, QuadratureSpec(256))
    assert lo - 0.02 <= val <= hi
    assert val == pytest.approx(lo, abs=0.03)


def test_z_quadrature_converges():
    g = GibbsPotential(activity=0.0, pair=SoftCore(c=3.0))
    x = Configuration(UNIT2, [[0.4, 0.6]])
    coarse = z(g, x, UNIT2, QuadratureSpec(32))
    fine = z(g, x, UNIT2, QuadratureSpec(256))
    assert coarse == pytest.approx(fine, rel=5e-3)


def test_z_unbounded_domain_rejected():
    free = Domain(2)
    g = GibbsPotential(activity=0.0, pair=Zero())
    with pytest.raises(UnboundedDomain):
        z(g, empty(free), free)


def test_z_deterministic():
    g = GibbsPotential(activity=0.1, pair=SoftCore(c=2.0))
    x = Configuration(UNIT2, [[0.3, 0.3], [0.6, 0.8]])
    assert z(g, x, UNIT2) == z(g, x, UNIT2)
