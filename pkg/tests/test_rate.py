"""Tests for data-phase rate/power selection and the frame-rate objective."""

import math

import numpy as np
import pytest

from beamalign.channel import LinkBudget, path_loss
from beamalign.config import db_to_linear, dbm_to_watt
from beamalign.rate import (
    DataPhaseParams,
    expected_frame_rate,
    non_outage_probability,
    optimize_rate_power,
)

G_MAIN = db_to_linear(14.0)


def section_link() -> LinkBudget:
    return LinkBudget(
        carrier_frequency_fc=30e9,
        distance_d=10.0,
        path_loss_exponent=2.0,
        noise_psd_N0=dbm_to_watt(-174.0),
        bandwidth_Wtot=2e8,
        ba_power_Pba=dbm_to_watt(22.0),
        max_data_power_Pmax=dbm_to_watt(22.0),
    )


def test_data_phase_params_validation():
    DataPhaseParams(rate_Rd=1e9, power_Pd=0.1, expected_rate_Rhat=5e8)
    with pytest.raises(ValueError):
        DataPhaseParams(rate_Rd=-1.0, power_Pd=0.1, expected_rate_Rhat=0.0)
    with pytest.raises(ValueError):
        DataPhaseParams(rate_Rd=1e9, power_Pd=-0.1, expected_rate_Rhat=5e8)
    with pytest.raises(ValueError):
        DataPhaseParams(rate_Rd=1e9, power_Pd=0.1, expected_rate_Rhat=2e9)


def test_non_outage_zero_rate():
    link = section_link()
    assert non_outage_probability(0.0, 0.1, link, G_MAIN) == pytest.approx(1.0, rel=1e-12)


def test_non_outage_unit_threshold():
    # Rate chosen so the SNR threshold equals the mean channel gain.
    link = section_link()
    pd = 0.1
    ell = path_loss(link)
    w = link.bandwidth_Wtot
    rd = w * math.log2(1.0 + pd * G_MAIN / (ell * link.noise_psd_N0 * w))
    assert non_outage_probability(rd, pd, link, G_MAIN) == pytest.approx(math.exp(-1.0), rel=1e-12)


def test_non_outage_rejects_bad_inputs():
    link = section_link()
    with pytest.raises(ValueError):
        non_outage_probability(1e9, 0.0, link, G_MAIN)
    with pytest.raises(ValueError):
        non_outage_probability(-1.0, 0.1, link, G_MAIN)


def test_non_outage_monotonicity():
    link = section_link()
    rds = np.linspace(0.0, 3e9, 20)
    probs = [non_outage_probability(float(r), 0.1, link, G_MAIN) for r in rds]
    assert all(a > b for a, b in zip(probs, probs[1:]))
    pds = np.linspace(0.01, 0.3, 20)
    probs = [non_outage_probability(1e9, float(p), link, G_MAIN) for p in pds]
    assert all(a < b for a, b in zip(probs, probs[1:]))
    gains = np.linspace(1.0, 50.0, 20)
    probs = [non_outage_probability(1e9, 0.1, link, float(g)) for g in gains]
    assert all(a < b for a, b in zip(probs, probs[1:]))


def test_non_outage_matches_rayleigh_monte_carlo():
    link = section_link()
    ell = path_loss(link)
    rng = np.random.default_rng(6006)
    h2 = rng.exponential(1.0 / ell, size=1_000_000)
    for rd, pd in ((1.0e9, dbm_to_watt(22.0)), (2.4e9, dbm_to_watt(22.0)), (3.0e9, 0.05)):
        threshold = (2.0 ** (rd / link.bandwidth_Wtot) - 1.0) * link.noise_psd_N0 * \
            link.bandwidth_Wtot / (pd * G_MAIN)
        mc = float((h2 >= threshold).mean())
        closed = non_outage_probability(rd, pd, link, G_MAIN)
        assert abs(closed - mc) < 2e-3


def test_optimize_rate_power_reference_point():
    link = section_link()
    params = optimize_rate_power(link, G_MAIN)
    assert params.power_Pd == pytest.approx(link.max_data_power_Pmax, rel=1e-12)
    assert params.rate_Rd / link.bandwidth_Wtot == pytest.approx(11.903910251565252, rel=1e-9)
    assert params.expected_rate_Rhat / link.bandwidth_Wtot == pytest.approx(
        10.545545214129193, rel=1e-9
    )
    assert params.expected_rate_Rhat == pytest.approx(
        params.rate_Rd * non_outage_probability(params.rate_Rd, params.power_Pd, link, G_MAIN),
        rel=1e-12,
    )


def test_optimize_rate_power_matches_grid_search():
    link = section_link()
    params = optimize_rate_power(link, G_MAIN)
    ell = path_loss(link)
    c = ell * link.noise_psd_N0 * link.bandwidth_Wtot / (link.max_data_power_Pmax * G_MAIN)
    hi = link.bandwidth_Wtot * math.log2(1.0 + 50.0 / c)
    grid = np.linspace(0.0, hi, 1_000_001)
    objective = grid * np.exp(-c * (2.0 ** (grid / link.bandwidth_Wtot) - 1.0))
    best = int(np.argmax(objective))
    spacing = grid[1] - grid[0]
    assert abs(params.rate_Rd - grid[best]) <= 2.0 * spacing
    assert params.expected_rate_Rhat >= objective[best] * (1.0 - 1e-6)
    # Grid pre-scan confirms a unimodal objective: rising then falling.
    diffs = np.sign(np.diff(objective[:: 1000]))
    switch = np.where(diffs < 0)[0]
    assert switch.size > 0
    first_fall = switch[0]
    assert (diffs[:first_fall] > 0).all()
    assert (diffs[first_fall:] < 0).all()


def test_optimize_rate_power_beats_random_probes():
    link = section_link()
    params = optimize_rate_power(link, G_MAIN)

    def objective(rd: float) -> float:
        return rd * non_outage_probability(rd, link.max_data_power_Pmax, link, G_MAIN)

    rng = np.random.default_rng(808)
    for _ in range(1000):
        probe = float(rng.uniform(0.0, 3.0 * params.rate_Rd))
        assert objective(probe) <= params.expected_rate_Rhat * (1.0 + 1e-9)


def test_optimize_rate_power_gain_dominance():
    link = section_link()
    base = optimize_rate_power(link, G_MAIN)
    better = optimize_rate_power(link, 2.0 * G_MAIN)
    assert better.expected_rate_Rhat > base.expected_rate_Rhat


def test_expected_frame_rate_reference_points():
    data = DataPhaseParams(rate_Rd=1e9, power_Pd=0.1, expected_rate_Rhat=8e8)
    # 32 of 200 slots spent scanning: factor 0.84.
    value = expected_frame_rate(0.5, 32, 200, 1e-4, 2e-2, data)
    assert value == pytest.approx(0.84 * 0.5 * 8e8, rel=1e-12)
    assert expected_frame_rate(0.0, 32, 200, 1e-4, 2e-2, data) == 0.0
    # No scanning overhead: full frame factor.
    assert expected_frame_rate(0.5, 0, 200, 1e-4, 2e-2, data) == pytest.approx(
        0.5 * 8e8, rel=1e-12
    )
    with pytest.raises(ValueError):
        expected_frame_rate(0.5, 200, 200, 1e-4, 2e-2, data)


def test_expected_frame_rate_linear_and_decreasing():
    data = DataPhaseParams(rate_Rd=1e9, power_Pd=0.1, expected_rate_Rhat=8e8)
    r1 = expected_frame_rate(0.25, 32, 200, 1e-4, 2e-2, data)
    r2 = expected_frame_rate(0.50, 32, 200, 1e-4, 2e-2, data)
    assert r2 == pytest.approx(2.0 * r1, rel=1e-12)
    values = [expected_frame_rate(0.5, L, 200, 1e-4, 2e-2, data) for L in (0, 16, 64, 128)]
    assert all(a > b for a, b in zip(values, values[1:]))
