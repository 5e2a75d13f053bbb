import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from scipy import stats as sps

from photonfilter.dynamics import (DetunedDrive, analytic_zero_detuning,
                                   filter_function)
from photonfilter.field import (ImpossibleOutcome, MeasurementOutcome,
                                PhotonDistribution, TruncationTooSmall,
                                apply_measurement, apply_sequence,
                                default_n_max, poisson_distribution,
                                read_distribution, write_distribution)
from photonfilter.pulses import make_microwave

LOWER = MeasurementOutcome.LOWER
UPPER = MeasurementOutcome.UPPER


def test_distribution_normalizes_on_construction():
    dist = PhotonDistribution(np.array([2.0, 2.0]))
    assert np.array_equal(dist.probs, [0.5, 0.5])
    assert dist.n_max == 1


@pytest.mark.parametrize("bad", [[], [0.0, 0.0], [0.5, -0.1], [1.0, np.inf]])
def test_distribution_rejects_bad_probabilities(bad):
    with pytest.raises(ValueError):
        PhotonDistribution(np.array(bad, dtype=float))


def test_distribution_is_read_only():
    dist = PhotonDistribution(np.array([0.5, 0.5]))
    with pytest.raises(ValueError):
        dist.probs[0] = 1.0


def test_default_n_max_rule():
    assert default_n_max(16.0) == 56
    assert default_n_max(20.0) == 65
    assert default_n_max(0.0) == 0


def test_poisson_mean_sixteen_has_flat_top():
    # nbar = 16 makes P_16 = P_15 * 16/16, identical to the last bit.
    dist = poisson_distribution(16.0, 56)
    assert dist.probs[15] == dist.probs[16]
    assert dist.probs.sum() == pytest.approx(1.0, abs=1e-12)


def test_poisson_agrees_with_scipy():
    nbar, n_max = 7.3, default_n_max(7.3)
    dist = poisson_distribution(nbar, n_max)
    expected = sps.poisson.pmf(np.arange(n_max + 1), nbar)
    assert np.max(np.abs(dist.probs - expected / expected.sum())) < 1e-12


def test_poisson_zero_mean_is_vacuum():
    dist = poisson_distribution(0.0, 4)
    assert np.array_equal(dist.probs, [1.0, 0.0, 0.0, 0.0, 0.0])


def test_poisson_rejects_tight_truncation():
    with pytest.raises(TruncationTooSmall):
        poisson_distribution(16.0, 20)


def test_lower_detection_reweights_in_place():
    dist = PhotonDistribution(np.array([0.5, 0.5]))
    filt = _manual_filter(p_minus=[1.0, 0.5])
    post, prob = apply_measurement(dist, filt, LOWER)
    assert prob == pytest.approx(0.75)
    assert np.allclose(post.probs, [2.0 / 3.0, 1.0 / 3.0])


def test_upper_detection_consumes_a_photon():
    dist = PhotonDistribution(np.array([0.5, 0.5]))
    filt = _manual_filter(p_minus=[1.0, 0.2])
    post, prob = apply_measurement(dist, filt, UPPER)
    assert prob == pytest.approx(0.4)
    assert np.array_equal(post.probs, [1.0, 0.0])


def test_outcome_probabilities_sum_to_one():
    """With p_plus[0] = 0 the two detector readings exhaust all cases."""
    filt = filter_function(
        DetunedDrive(make_microwave(5.0, 2.0 / (math.pi * 0.1), 1), 0.5), 56)
    dist = poisson_distribution(16.0, 56)
    _, p_lower = apply_measurement(dist, filt, LOWER)
    _, p_upper = apply_measurement(dist, filt, UPPER)
    # Exhaustive only up to the integrator's unitarity budget per entry.
    assert p_lower + p_upper == pytest.approx(1.0, abs=1e-8)


def test_impossible_outcome_raises():
    dist = PhotonDistribution(np.array([1.0, 0.0]))
    filt = _manual_filter(p_minus=[1.0, 1.0])
    with pytest.raises(ImpossibleOutcome):
        apply_measurement(dist, filt, UPPER)


def test_size_mismatch_raises():
    dist = PhotonDistribution(np.array([0.5, 0.5, 0.0]))
    filt = _manual_filter(p_minus=[1.0, 0.5])
    with pytest.raises(ValueError):
        apply_measurement(dist, filt, LOWER)


def test_all_lower_record_matches_power_law():
    """m lower detections in a row weight each P_n by p_minus[n]^m."""
    m = 5
    filt = analytic_zero_detuning(math.pi * 0.5, 56)
    start = poisson_distribution(16.0, 56)
    folded, steps = apply_sequence(start, filt, [LOWER] * m)
    direct = PhotonDistribution(filt.p_minus ** m * start.probs)
    assert np.max(np.abs(folded.probs - direct.probs)) < 1e-12
    assert len(steps) == m
    # The per-step probabilities chain into the survival of the whole record.
    survival = float(np.sum(filt.p_minus ** m * start.probs))
    assert np.prod(steps) == pytest.approx(survival, rel=1e-12)


def test_lower_updates_commute():
    f1 = analytic_zero_detuning(1.0, 35)
    f2 = analytic_zero_detuning(0.7, 35)
    start = poisson_distribution(9.0, 35)
    a, _ = apply_measurement(start, f1, LOWER)
    a, _ = apply_measurement(a, f2, LOWER)
    b, _ = apply_measurement(start, f2, LOWER)
    b, _ = apply_measurement(b, f1, LOWER)
    assert np.max(np.abs(a.probs - b.probs)) < 1e-12


@given(st.lists(st.floats(0.0, 1.0), min_size=2, max_size=12),
       st.lists(st.floats(0.0, 1.0), min_size=2, max_size=12))
@settings(max_examples=60, deadline=None)
def test_lower_update_keeps_support_and_norm(probs, p_minus):
    size = min(len(probs), len(p_minus))
    probs, p_minus = np.array(probs[:size]), np.array(p_minus[:size])
    assume(probs.sum() > 0.0)
    assume(float(p_minus @ probs) > 0.0)
    dist = PhotonDistribution(probs)
    filt = _manual_filter(p_minus=p_minus)
    post, prob = apply_measurement(dist, filt, LOWER)
    assert post.probs.sum() == pytest.approx(1.0, abs=1e-9)
    assert 0.0 < prob <= 1.0 + 1e-12
    assert np.all(post.probs[dist.probs == 0.0] == 0.0)


def test_distribution_round_trip(tmp_path):
    dist = poisson_distribution(4.2, 25)
    path = tmp_path / "dist.dat"
    write_distribution(dist, path)
    # The written cells are exact reprs; construction renormalizes, which
    # can move the smallest entries by one ulp.
    back = read_distribution(path)
    assert np.allclose(back.probs, dist.probs, rtol=1e-13, atol=0.0)


def _manual_filter(p_minus):
    from photonfilter.dynamics import FilterFunction, FilterSource

    p_minus = np.asarray(p_minus, dtype=float)
    return FilterFunction(1.0 - p_minus, p_minus, FilterSource.NUMERIC, {})
