"""Beam-selection policies: second-best preference (proposed), first-best,
linear Thompson sampling, UCB, and a uniform-random control.

All selectors are deterministic functions of their inputs and (where needed)
the provided random stream; ties are always broken by lowest arm index so a
fixed seed replays arm choices exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .preference import belief_from_preference

# (scanned_arm, feedback) pairs in scan order
History = Sequence[tuple[int, float]]

DEFAULT_UCB_C = 1.0


class PolicyKind(str, Enum):
    SECOND_BEST = "second-best"
    FIRST_BEST = "first-best"
    LTS = "lts"
    UCB = "ucb"
    UNIFORM_RANDOM = "random"


@dataclass(frozen=True)
class PolicySpec:
    """One policy choice plus its parameters (exploration constant for UCB)."""

    kind: PolicyKind
    ucb_exploration_c: float | None = None

    def __post_init__(self) -> None:
        if self.kind is PolicyKind.UCB:
            if self.ucb_exploration_c is None or self.ucb_exploration_c < 0.0:
                raise ValueError("UCB policy needs a nonnegative exploration constant")
        elif self.ucb_exploration_c is not None:
            raise ValueError("exploration constant only applies to the UCB policy")

    def label(self) -> str:
        if self.kind is PolicyKind.UCB:
            return f"ucb:c={self.ucb_exploration_c:g}"
        return self.kind.value


def parse_policy_spec(text: str) -> PolicySpec:
    """Parse a config string: second-best | first-best | lts | ucb:c=<float> | random."""
    text = text.strip()
    if text.startswith("ucb"):
        c = DEFAULT_UCB_C
        if ":" in text:
            _, _, param = text.partition(":")
            key, _, value = param.partition("=")
            if key.strip() != "c":
                raise ValueError(f"unknown UCB parameter {key!r}")
            try:
                c = float(value)
            except ValueError:
                raise ValueError(f"bad UCB exploration constant {value!r}") from None
        return PolicySpec(PolicyKind.UCB, ucb_exploration_c=c)
    try:
        kind = PolicyKind(text)
    except ValueError:
        raise ValueError(f"unknown policy {text!r}") from None
    return PolicySpec(kind)


def rank_arms(m: np.ndarray) -> np.ndarray:
    """Permutation of arm indices by descending preference, ties by ascending index."""
    m = np.asarray(m, dtype=float)
    return np.argsort(-m, kind="stable")


def select_first_best(m: np.ndarray) -> int:
    """Top-ranked arm."""
    return int(rank_arms(m)[0])


def select_second_best(m: np.ndarray) -> int:
    """Runner-up arm: the proposed scanning rule."""
    if len(m) < 2:
        raise ValueError("second-best needs at least 2 arms")
    return int(rank_arms(m)[1])


def select_lts(m: np.ndarray, rng: np.random.Generator) -> int:
    """Arm sampled from the current belief (one uniform draw, inverse CDF)."""
    b = belief_from_preference(m)
    u = rng.random()
    cum = np.cumsum(b)
    return min(int(np.searchsorted(cum, u, side="right")), len(b) - 1)


def select_ucb(history: History, k: int, num_arms: int, c: float) -> int:
    """Index rule on raw feedback means with an exploration bonus.

    Any never-scanned arm is selected first (lowest index among them);
    otherwise returns argmax of mean(y) + c*sqrt(2*log(k+1)/n_a), ties by
    lowest index.
    """
    counts = np.zeros(num_arms)
    sums = np.zeros(num_arms)
    for arm, y in history:
        counts[arm] += 1.0
        sums[arm] += y
    unscanned = counts == 0.0
    if unscanned.any():
        return int(np.argmax(unscanned))
    index = sums / counts + c * np.sqrt(2.0 * math.log(k + 1.0) / counts)
    return int(np.argmax(index))


def select_uniform_random(num_arms: int, rng: np.random.Generator) -> int:
    """Uniform arm choice (one draw consumed)."""
    u = rng.random()
    return min(int(u * num_arms), num_arms - 1)


def select_data_beam(m: np.ndarray) -> int:
    """Data-phase beam: always the top-ranked arm, for every scanning policy."""
    return int(rank_arms(m)[0])
