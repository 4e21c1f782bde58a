"""Data-phase rate selection and the normalized expected-rate objective.

Misalignment yields outage with probability one, so the expected frame rate is
(frame fraction left for data) * (alignment probability) * (rate times
non-outage probability under Rayleigh fading at the aligned gain).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .channel import LinkBudget, path_loss

GOLDEN_RATIO_CONJUGATE = (math.sqrt(5.0) - 1.0) / 2.0
RATE_SEARCH_REL_TOL = 1e-9
# exp(-50) at the upper bracket edge guarantees an interior maximizer
BRACKET_EXPONENT_MARGIN = 50.0


@dataclass(frozen=True)
class DataPhaseParams:
    """Chosen data rate and power, plus the resulting expected rate."""

    rate_Rd: float
    power_Pd: float
    expected_rate_Rhat: float

    def __post_init__(self) -> None:
        if self.rate_Rd < 0.0 or self.power_Pd < 0.0:
            raise ValueError("rate and power must be nonnegative")
        if self.expected_rate_Rhat > self.rate_Rd * (1.0 + 1e-12):
            raise ValueError("expected rate cannot exceed the transmit rate")


def non_outage_probability(Rd: float, Pd: float, link: LinkBudget, G: float) -> float:
    """Probability the fading realization supports rate Rd at power Pd.

    The squared channel magnitude is exponential with mean 1/path_loss, so the
    tail probability is exp(-path_loss * N0 * W * (2^(Rd/W) - 1) / (Pd * G)).
    """
    if Pd <= 0.0:
        raise ValueError("data power must be positive")
    if Rd < 0.0:
        raise ValueError("rate must be nonnegative")
    snr_gap = 2.0 ** (Rd / link.bandwidth_Wtot) - 1.0
    scale = path_loss(link) * link.noise_psd_N0 * link.bandwidth_Wtot / (Pd * G)
    return math.exp(-scale * snr_gap)


def optimize_rate_power(link: LinkBudget, G: float) -> DataPhaseParams:
    """Maximize rate * non-outage over Rd at the power cap.

    The objective is strictly increasing in Pd for fixed Rd, so the power box
    constraint binds at max_data_power_Pmax. Rd is found by golden-section
    search on [0, W*log2(1 + 50/c)] with c = path_loss*N0*W/(Pmax*G); at the
    upper edge the non-outage factor is exp(-50), so the maximizer is interior.
    """
    p = link.max_data_power_Pmax
    w = link.bandwidth_Wtot
    c = path_loss(link) * link.noise_psd_N0 * w / (p * G)
    hi = w * math.log2(1.0 + BRACKET_EXPONENT_MARGIN / c)

    def objective(rd: float) -> float:
        return rd * math.exp(-c * (2.0 ** (rd / w) - 1.0))

    rd = _golden_section_max(objective, 0.0, hi, RATE_SEARCH_REL_TOL)
    return DataPhaseParams(
        rate_Rd=rd,
        power_Pd=p,
        expected_rate_Rhat=rd * non_outage_probability(rd, p, link, G),
    )


def expected_frame_rate(
    p_align: float, L: int, N: int, Ts: float, Tfr: float, data: DataPhaseParams
) -> float:
    """Expected frame rate: data-fraction of the frame times p_align times Rhat."""
    if L >= N:
        raise ValueError("alignment slots must leave room for the data phase")
    frame_factor = (Tfr - L * Ts) / Tfr
    return frame_factor * p_align * data.expected_rate_Rhat


def _golden_section_max(f, lo: float, hi: float, rel_tol: float) -> float:
    """Golden-section search for the maximizer of a unimodal f on [lo, hi]."""
    span = hi - lo
    x1 = hi - GOLDEN_RATIO_CONJUGATE * span
    x2 = lo + GOLDEN_RATIO_CONJUGATE * span
    f1, f2 = f(x1), f(x2)
    while hi - lo > rel_tol * max(1.0, abs(lo) + abs(hi)):
        if f1 >= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - GOLDEN_RATIO_CONJUGATE * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + GOLDEN_RATIO_CONJUGATE * (hi - lo)
            f2 = f(x2)
    return 0.5 * (lo + hi)
