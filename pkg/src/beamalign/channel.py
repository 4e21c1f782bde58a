"""Sectored channel environment: lobe-gain model, path loss, and stochastic feedback.

The continuous mm-wave channel is abstracted to a discrete hidden sector X.
Scanning the correct sector yields exponential feedback with mean 1/nu,
scanning any other sector yields unit-mean exponential feedback, where
nu = (1 + g*Lambda) / (1 + G*Lambda) collapses the main/side lobe gains and
the pre-beamforming SNR into a single shape parameter in (0, 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SPEED_OF_LIGHT = 299792458.0  # m/s


@dataclass(frozen=True)
class GainModel:
    """Main/side lobe power gains and pre-beamforming SNR, all linear scale."""

    main_lobe_gain_G: float
    side_lobe_gain_g: float
    prebeamforming_snr_Lambda: float

    def __post_init__(self) -> None:
        if not self.side_lobe_gain_g > 0.0:
            raise ValueError("side lobe gain must be positive")
        if not self.main_lobe_gain_G > self.side_lobe_gain_g:
            # G <= g makes nu >= 1 and breaks every downstream formula
            raise ValueError("main lobe gain must strictly exceed side lobe gain")
        if not self.prebeamforming_snr_Lambda > 0.0:
            raise ValueError("pre-beamforming SNR must be positive")


@dataclass(frozen=True)
class LinkBudget:
    """Link-level constants for the data phase, in natural units (Hz, m, W)."""

    carrier_frequency_fc: float
    distance_d: float
    path_loss_exponent: float
    noise_psd_N0: float
    bandwidth_Wtot: float
    ba_power_Pba: float
    max_data_power_Pmax: float

    def __post_init__(self) -> None:
        for name in (
            "carrier_frequency_fc",
            "distance_d",
            "noise_psd_N0",
            "bandwidth_Wtot",
            "ba_power_Pba",
            "max_data_power_Pmax",
        ):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive")
        if not self.path_loss_exponent >= 1.0:
            raise ValueError("path_loss_exponent must be >= 1")


@dataclass(eq=False)
class SectoredEnvironment:
    """Hidden true sector plus the feedback model and a private random stream."""

    num_arms: int
    true_sector_X: int
    gain_model: GainModel
    rng_stream: np.random.Generator

    def __post_init__(self) -> None:
        if self.num_arms < 2:
            raise ValueError("environment needs at least 2 arms")
        if not 0 <= self.true_sector_X < self.num_arms:
            raise ValueError("true sector out of range")
        self.nu = compute_nu(self.gain_model)


def compute_nu(gain_model: GainModel) -> float:
    """Feedback shape parameter: reciprocal of the mean feedback under alignment.

    Strictly inside (0, 1) because the main lobe gain exceeds the side lobe gain.
    """
    G = gain_model.main_lobe_gain_G
    g = gain_model.side_lobe_gain_g
    lam = gain_model.prebeamforming_snr_Lambda
    return (1.0 + g * lam) / (1.0 + G * lam)


def path_loss(link: LinkBudget) -> float:
    """Free-space attenuation (4*pi*d*fc/c)^eta, linear scale."""
    arg = 4.0 * math.pi * link.distance_d * link.carrier_frequency_fc / SPEED_OF_LIGHT
    return arg**link.path_loss_exponent


def sample_feedback(env: SectoredEnvironment, scanned_arm: int) -> float:
    """Draw one normalized-power feedback sample for the scanned arm.

    Exponential with mean 1/nu when the scanned arm is the true sector,
    unit-mean exponential otherwise. Consumes exactly one uniform draw from
    the environment's stream (inverse CDF), so trajectories are reproducible
    and tests can inject deterministic uniforms.
    """
    if not 0 <= scanned_arm < env.num_arms:
        raise ValueError("scanned arm out of range")
    rate = env.nu if scanned_arm == env.true_sector_X else 1.0
    u = env.rng_stream.random()
    return -math.log1p(-u) / rate


def feedback_log_likelihood(y: float, aligned: bool, nu: float) -> float:
    """Log-density of a feedback sample under the aligned or misaligned law."""
    if y < 0.0:
        raise ValueError("feedback must be nonnegative")
    if aligned:
        return math.log(nu) - nu * y
    return -y
