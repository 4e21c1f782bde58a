"""Per-arm preference statistic: additive update, induced belief, mixture density.

A preference vector m holds one real number per arm, equal to the log posterior
probability of that arm up to a common additive constant. It starts at
log(prior) and each feedback sample moves only the scanned arm's entry, which
makes it a compact sufficient statistic for the full scan history.
"""

from __future__ import annotations

import math

import numpy as np


def j_transform(y: float, nu: float) -> float:
    """Log-likelihood ratio of aligned vs misaligned feedback: (1-nu)*y + log(nu).

    This is the additive preference increment for the scanned arm. Positive
    feedback evidence (y above -log(nu)/(1-nu)) raises the arm's belief.
    """
    return (1.0 - nu) * y + math.log(nu)


def update_preference(m: np.ndarray, scanned_arm: int, y: float, nu: float) -> np.ndarray:
    """Return a copy of m with the scanned arm's entry moved by j_transform(y, nu).

    All other entries are bit-identical to the input.
    """
    if not 0 <= scanned_arm < len(m):
        raise ValueError("scanned arm out of range")
    out = np.array(m, dtype=float, copy=True)
    out[scanned_arm] += j_transform(y, nu)
    return out


def belief_from_preference(m: np.ndarray) -> np.ndarray:
    """Posterior probability vector exp(m) / sum(exp(m)), max-subtracted.

    Max subtraction keeps the softmax finite for entries spanning [-700, 700];
    the output is invariant to adding a common constant to m.
    """
    m = np.asarray(m, dtype=float)
    shifted = m - m.max()
    w = np.exp(shifted)
    return w / w.sum()


def marginal_feedback_density(m: np.ndarray, scanned_arm: int, y: float, nu: float) -> float:
    """Predictive feedback density: belief-weighted mixture of the two laws."""
    if y < 0.0:
        raise ValueError("feedback must be nonnegative")
    b = belief_from_preference(m)[scanned_arm]
    return b * nu * math.exp(-nu * y) + (1.0 - b) * math.exp(-y)


def sum_exp_identity_check(m: np.ndarray, scanned_arm: int, y: float, nu: float) -> float:
    """Absolute residual of the update identity used by the bound derivations.

    After one preference update, sum(exp(m')) equals
    exp(y) * marginal_feedback_density(m, a, y) * sum(exp(m)); this returns the
    absolute difference of the two sides (test-support operation; callers
    normalize by sum(exp(m')) for a relative residual).
    """
    m = np.asarray(m, dtype=float)
    updated = update_preference(m, scanned_arm, y, nu)
    lhs = np.exp(updated).sum()
    rhs = math.exp(y) * marginal_feedback_density(m, scanned_arm, y, nu) * np.exp(m).sum()
    return abs(lhs - rhs)


def alignment_reward(m: np.ndarray, data_arm: int) -> float:
    """Probability that the chosen data arm is the true sector: belief[data_arm]."""
    if not 0 <= data_arm < len(m):
        raise ValueError("data arm out of range")
    return float(belief_from_preference(m)[data_arm])
