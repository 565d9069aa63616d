"""Tests for the simple birth-death chain module."""
import math

import numpy as np
import pytest
from scipy.stats import chisquare, poisson

from bdmove.bd_chain import (
    ChainPath,
    ConstantRatesChain,
    ExplicitChain,
    HarmonicBirthChain,
    MMInfinityChain,
    SeriesEvidence,
    SimpleChain,
    chain_from_intensities,
    ergodicity_check,
    expected_return_time,
    occupancy,
    rate_condition_check,
    sample_return_times,
    simulate_chain,
    stationary_distribution,
)
from bdmove.config_space import Domain
from bdmove.errors import NotErgodic
from bdmove.jump_kernels import GibbsBirthIntensity, IntensitySpec, UnitDeath
from bdmove.potentials import GibbsPotential, Zero

TWO_STATE = ExplicitChain([1.0, 0.0], [0.0, 1.0], tail="zero-birth")


def test_first_event_from_zero_is_birth():
    path = simulate_chain(MMInfinityChain(2.0, 1.0), 0, 50.0, seed=1)
    assert path.states[0] == 1


def test_pure_death_has_exactly_n0_events():
    chain = ConstantRatesChain(0.0, 1.0)
    path = simulate_chain(chain, 5, 1e9, seed=2)
    assert len(path.times) == 5
    assert list(path.states) == [4, 3, 2, 1, 0]
    assert path.absorbed
    assert path.final_state == 0


def test_mm_infinity_time_average_occupancy():
    # the 2% window is about one Monte-Carlo sd at this horizon, so the
    # seed is pinned; the chi-square test below checks the law properly
    path = simulate_chain(MMInfinityChain(2.0, 1.0), 0, 1000.0, seed=1)
    occ = occupancy(path, 60)
    mean = float(np.dot(np.arange(61), occ))
    assert abs(mean - 2.0) < 0.04  # stationary mean is 2, tolerance 2%


def test_stationary_poisson_two():
    pi = stationary_distribution(MMInfinityChain(2.0, 1.0), tol=1e-14)
    assert pi[0] == pytest.approx(math.exp(-2.0), rel=1e-10)
    ref = poisson.pmf(np.arange(len(pi)), 2.0)
    assert np.allclose(pi, ref, atol=1e-12)


def test_stationary_poisson_one_from_harmonic_births():
    pi = stationary_distribution(HarmonicBirthChain(1.0), tol=1e-14)
    ref = poisson.pmf(np.arange(len(pi)), 1.0)
    assert np.allclose(pi, ref, atol=1e-12)


def test_stationary_two_state():
    pi = stationary_distribution(TWO_STATE)
    assert pi == pytest.approx([0.5, 0.5])


def test_detailed_balance_to_machine_precision():
    for chain in (MMInfinityChain(2.0, 1.0), HarmonicBirthChain(1.0),
                  ConstantRatesChain(1.0, 3.0)):
        pi = stationary_distribution(chain, tol=1e-14)
        for n in range(len(pi) - 1):
            flow_up = pi[n] * chain.beta(n)
            flow_down = pi[n + 1] * chain.delta(n + 1)
            assert abs(flow_up - flow_down) <= 1e-12 * max(flow_up, flow_down)


def test_ergodicity_verdicts():
    assert ergodicity_check(ExplicitChain([1, 1, 1, 0], [0, 1, 1, 1],
                                          tail="zero-birth"))["verdict"] == "Eq30"
    assert ergodicity_check(ConstantRatesChain(2.0, 1.0, cutoff=4))["verdict"] == "Eq30"
    assert ergodicity_check(MMInfinityChain(1.0, 1.0))["verdict"] == "Eq31"
    assert ergodicity_check(HarmonicBirthChain(1.0))["verdict"] == "Eq31"
    assert ergodicity_check(ConstantRatesChain(2.0, 1.0))["verdict"] == "Fails"
    assert ergodicity_check(ConstantRatesChain(1.0, 1.0))["verdict"] == "Fails"
    twenty = ExplicitChain(np.ones(20), np.r_[0.0, np.ones(19)], tail=None)
    assert ergodicity_check(twenty)["verdict"] == "Inconclusive"
    rep = ExplicitChain([2.0, 1.0], [0.0, 4.0], tail="repeat-last")
    assert ergodicity_check(rep)["verdict"] == "Eq31"


def test_ergodicity_rejects_zero_death_rates():
    with pytest.raises(ValueError):
        ergodicity_check(ExplicitChain([1, 1], [0, 0], tail="repeat-last"))


def test_rate_condition_verdicts():
    finite = ExplicitChain([1, 1, 1, 0], [0, 1, 1, 1], tail="zero-birth")
    gamma2 = np.array([0.0, 0.0, 1.0])
    assert rate_condition_check(finite, gamma2)["verdict"] == "Eq32"
    # start mass above the cutoff level loses the finite-support certificate
    gamma5 = np.array([0, 0, 0, 0, 0, 1.0])
    assert rate_condition_check(finite, gamma5)["verdict"] == "Inconclusive"
    at0 = np.array([1.0])
    assert rate_condition_check(MMInfinityChain(1.0, 1.0), at0)["verdict"] == "Corollary"
    twenty = ExplicitChain(np.ones(20), np.r_[0.0, np.ones(19)], tail=None)
    assert rate_condition_check(twenty, at0)["verdict"] == "Inconclusive"

    class SlowTail(SimpleChain):
        # certified ergodic, but births are not eventually dominated
        def beta(self, n):
            return float(n + 1)

        def delta(self, n):
            return float(n * n) if n >= 1 else 0.0

        def series_evidence(self):
            return SeriesEvidence(None, True, False, False, False)

    assert rate_condition_check(SlowTail(), at0)["verdict"] == "Eq33"


def test_rate_condition_validates_gamma():
    with pytest.raises(ValueError):
        rate_condition_check(MMInfinityChain(1.0, 1.0), [0.5, 0.4])


def test_expected_return_times_closed_form():
    assert expected_return_time(TWO_STATE) == pytest.approx(2.0, rel=1e-12)
    assert expected_return_time(HarmonicBirthChain(1.0)) == pytest.approx(math.e, rel=1e-9)
    assert expected_return_time(MMInfinityChain(2.0, 1.0)) == pytest.approx(
        math.exp(2.0) / 2.0, rel=1e-9)


def test_expected_return_time_matches_simulation():
    n_cycles = 20_000
    for chain, seed in ((TWO_STATE, 5), (HarmonicBirthChain(1.0), 6),
                        (MMInfinityChain(2.0, 1.0), 7)):
        target = expected_return_time(chain)
        times = sample_return_times(chain, n_cycles, seed=seed)
        se = times.std(ddof=1) / math.sqrt(n_cycles)
        assert abs(times.mean() - target) < 3.5 * se


def test_occupancy_chi_square_against_stationary():
    chain = MMInfinityChain(2.0, 1.0)
    path = simulate_chain(chain, 0, 10_000.0, seed=9)
    # sample at widely spaced times: the chain mixes in O(1) time units
    probe_t = np.arange(5.0, 10_000.0, 5.0)
    idx = np.searchsorted(path.times, probe_t, side="right") - 1
    all_states = np.concatenate(([path.n0], path.states))
    draws = all_states[idx + 1]
    pi = stationary_distribution(chain)
    k = 8  # pool the tail so expected counts stay above 5
    expected = np.concatenate((pi[:k], [pi[k:].sum()])) * len(draws)
    got = np.bincount(np.minimum(draws, k), minlength=k + 1)
    assert chisquare(got, expected).pvalue > 0.01


def test_absorption_recorded_not_raised():
    chain = ConstantRatesChain(0.0, 2.0)
    path = simulate_chain(chain, 2, 100.0, seed=11)
    assert path.absorbed and path.final_state == 0


def test_not_ergodic_errors():
    with pytest.raises(NotErgodic):
        stationary_distribution(ConstantRatesChain(2.0, 1.0))
    with pytest.raises(NotErgodic):
        expected_return_time(ConstantRatesChain(0.0, 1.0))
    with pytest.raises(NotErgodic):
        stationary_distribution(ExplicitChain(np.ones(5), np.r_[0.0, np.ones(4)],
                                              tail=None))


def test_explicit_chain_validation_and_tail():
    with pytest.raises(ValueError):
        ExplicitChain([1.0], [1.0])            # death at level 0 must be 0
    with pytest.raises(ValueError):
        ExplicitChain([1.0, -1.0], [0.0, 1.0])
    with pytest.raises(ValueError):
        ExplicitChain([1.0], [0.0], tail="bogus")
    c = ExplicitChain([1.0, 2.0], [0.0, 3.0], tail="repeat-last")
    assert c.beta(10) == 2.0 and c.delta(10) == 3.0
    z = ExplicitChain([1.0, 2.0], [0.0, 3.0], tail="zero-birth")
    assert z.beta(10) == 0.0 and z.delta(10) == 3.0
    undef = ExplicitChain([1.0, 2.0], [0.0, 3.0])
    with pytest.raises(ValueError):
        undef.beta(2)


def test_simulation_is_deterministic_per_seed():
    a = simulate_chain(MMInfinityChain(2.0, 1.0), 0, 100.0, seed=13)
    b = simulate_chain(MMInfinityChain(2.0, 1.0), 0, 100.0, seed=13)
    assert np.array_equal(a.times, b.times) and np.array_equal(a.states, b.states)


def test_chain_from_intensities_matches_envelopes():
    unit = Domain(2, bounds=((0.0, 1.0), (0.0, 1.0)))
    g = GibbsPotential(0.0, Zero())
    intens = IntensitySpec(GibbsBirthIntensity(g), UnitDeath(), alpha_star=2.0)
    chain = chain_from_intensities(intens, unit, n_max=6)
    # free-gas envelope: births 1/(n+1), unit deaths
    assert chain.beta(0) == pytest.approx(1.0)
    assert chain.beta(3) == pytest.approx(0.25)
    assert chain.delta(0) == 0.0 and chain.delta(4) == 1.0
    assert ergodicity_check(chain)["verdict"] == "Inconclusive"
