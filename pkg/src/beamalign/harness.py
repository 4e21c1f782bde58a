"""Monte-Carlo experiment orchestration: frames, sweeps, and result emission.

run_frame is a scalar reference implementation of one beam-alignment frame.
run_sweep executes many frames through a vectorized engine that consumes the
per-frame random streams in exactly the same order as run_frame (selection
draw for lts/random, then feedback draw, per slot), so both paths produce
identical outcomes and sweeps are byte-reproducible for any worker count.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Union

import numpy as np

from .channel import GainModel, SectoredEnvironment, compute_nu, sample_feedback
from .config import SWEEP_OVERHEAD, SWEEP_SNR, ExperimentConfig, db_to_linear
from .policies import (
    PolicyKind,
    PolicySpec,
    select_data_beam,
    select_first_best,
    select_lts,
    select_second_best,
    select_ucb,
    select_uniform_random,
)
from .preference import update_preference
from .rate import DataPhaseParams, expected_frame_rate, optimize_rate_power
from .rngstream import DEFAULT_BASE_SEED, frame_generator

CHUNK_FRAMES = 2048
CSV_COLUMNS = (
    "policy",
    "sweep_var",
    "sweep_value",
    "p_align",
    "ci95",
    "spectral_eff_bps_hz",
    "iterations",
    "seed",
)


@dataclass(frozen=True)
class FrameOutcome:
    """Record of one frame: scans, feedback, chosen data beam, alignment flag."""

    true_sector: int
    scanned_arms: tuple[int, ...]
    feedbacks: tuple[float, ...]
    data_beam: int
    aligned: bool

    def __post_init__(self) -> None:
        if self.aligned != (self.data_beam == self.true_sector):
            raise ValueError("aligned flag inconsistent with data beam")


@dataclass(frozen=True)
class SweepPointResult:
    """Aggregated estimate for one (policy, sweep value) pair."""

    policy: str
    sweep_var: str
    sweep_value: float
    p_align: float
    p_align_ci95: float
    spectral_efficiency: float
    iterations_used: int
    seed: int


def _gain_model(config: ExperimentConfig, lambda_db: float) -> GainModel:
    return GainModel(
        main_lobe_gain_G=config.main_lobe_gain(),
        side_lobe_gain_g=config.side_lobe_gain(),
        prebeamforming_snr_Lambda=db_to_linear(lambda_db),
    )


def _draw_sector(prior_cum: np.ndarray, u: float, num_arms: int) -> int:
    return min(int(np.searchsorted(prior_cum, u, side="right")), num_arms - 1)


def run_frame(
    config: ExperimentConfig,
    policy: PolicySpec,
    frame_seed,
    lambda_db: Union[float, None] = None,
    slots_L: Union[int, None] = None,
) -> FrameOutcome:
    """Simulate one frame: draw the true sector, scan L slots, pick the data beam.

    frame_seed is anything np.random.SeedSequence accepts, or a Generator to
    consume directly. Deterministic given the seed and config.
    """
    outcome, _ = run_frame_trace(config, policy, frame_seed, lambda_db, slots_L)
    return outcome


def run_frame_trace(
    config: ExperimentConfig,
    policy: PolicySpec,
    frame_seed,
    lambda_db: Union[float, None] = None,
    slots_L: Union[int, None] = None,
) -> tuple[FrameOutcome, list[np.ndarray]]:
    """run_frame plus the preference vector after every slot (for trace dumps)."""
    if isinstance(frame_seed, np.random.Generator):
        rng = frame_seed
    elif isinstance(frame_seed, np.random.SeedSequence):
        rng = np.random.Generator(np.random.Philox(frame_seed))
    else:
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(frame_seed)))
    if lambda_db is None:
        lambda_db = (
            config.lambda_db_fixed
            if config.sweep_kind == SWEEP_OVERHEAD
            else config.lambda_db_values[0]
        )
    L = config.slots_L if slots_L is None else slots_L

    gain_model = _gain_model(config, lambda_db)
    nu = compute_nu(gain_model)
    prior = np.array(config.prior_vector())
    prior_cum = np.cumsum(prior)

    true_sector = _draw_sector(prior_cum, rng.random(), config.num_arms)
    env = SectoredEnvironment(config.num_arms, true_sector, gain_model, rng)
    m = np.log(prior)
    history: list[tuple[int, float]] = []
    scanned: list[int] = []
    feedbacks: list[float] = []
    trajectory: list[np.ndarray] = []

    for k in range(L):
        arm = _select_arm(policy, m, history, k, config.num_arms, rng)
        y = sample_feedback(env, arm)
        m = update_preference(m, arm, y, nu)
        history.append((arm, y))
        scanned.append(arm)
        feedbacks.append(y)
        trajectory.append(m)

    data_beam = select_data_beam(m)
    outcome = FrameOutcome(
        true_sector=true_sector,
        scanned_arms=tuple(scanned),
        feedbacks=tuple(feedbacks),
        data_beam=data_beam,
        aligned=data_beam == true_sector,
    )
    return outcome, trajectory


def _select_arm(
    policy: PolicySpec,
    m: np.ndarray,
    history: list[tuple[int, float]],
    k: int,
    num_arms: int,
    rng: np.random.Generator,
) -> int:
    if policy.kind is PolicyKind.SECOND_BEST:
        return select_second_best(m)
    if policy.kind is PolicyKind.FIRST_BEST:
        return select_first_best(m)
    if policy.kind is PolicyKind.LTS:
        return select_lts(m, rng)
    if policy.kind is PolicyKind.UCB:
        return select_ucb(history, k, num_arms, policy.ucb_exploration_c)
    if policy.kind is PolicyKind.UNIFORM_RANDOM:
        return select_uniform_random(num_arms, rng)
    raise ValueError(f"unknown policy kind {policy.kind!r}")


def _simulate_chunk(
    num_arms: int,
    L: int,
    nu: float,
    prior: tuple[float, ...],
    policy: PolicySpec,
    base_seed: int,
    policy_index: int,
    point_index: int,
    start: int,
    stop: int,
) -> np.ndarray:
    """Vectorized simulation of frames [start, stop); returns per-frame aligned flags.

    Consumes each frame's stream in the same order as run_frame: one draw for
    the true sector, then per slot an optional selection draw (lts/random)
    followed by one feedback draw.
    """
    batch = stop - start
    needs_policy_draw = policy.kind in (PolicyKind.LTS, PolicyKind.UNIFORM_RANDOM)
    draws = 1 + L * (2 if needs_policy_draw else 1)
    uniforms = np.empty((batch, draws))
    for row, iteration in enumerate(range(start, stop)):
        rng = frame_generator(base_seed, policy_index, point_index, iteration)
        uniforms[row] = rng.random(draws)

    prior_arr = np.array(prior)
    prior_cum = np.cumsum(prior_arr)
    rows = np.arange(batch)
    sectors = np.minimum(
        np.searchsorted(prior_cum, uniforms[:, 0], side="right"), num_arms - 1
    )
    m = np.tile(np.log(prior_arr), (batch, 1))
    log_nu = math.log(nu)

    is_ucb = policy.kind is PolicyKind.UCB
    if is_ucb:
        counts = np.zeros((batch, num_arms))
        sums = np.zeros((batch, num_arms))

    col = 1
    for k in range(L):
        if policy.kind is PolicyKind.FIRST_BEST:
            arms = np.argmax(m, axis=1)
        elif policy.kind is PolicyKind.SECOND_BEST:
            arms = np.argsort(-m, axis=1, kind="stable")[:, 1]
        elif policy.kind is PolicyKind.LTS:
            shifted = m - m.max(axis=1)[:, None]
            weights = np.exp(shifted)
            belief_cum = np.cumsum(weights / weights.sum(axis=1)[:, None], axis=1)
            u = uniforms[:, col]
            col += 1
            arms = np.minimum((belief_cum <= u[:, None]).sum(axis=1), num_arms - 1)
        elif policy.kind is PolicyKind.UNIFORM_RANDOM:
            u = uniforms[:, col]
            col += 1
            arms = np.minimum((u * num_arms).astype(int), num_arms - 1)
        elif is_ucb:
            unscanned = counts == 0.0
            first_unscanned = np.argmax(unscanned, axis=1)
            safe_counts = np.maximum(counts, 1.0)
            index = sums / safe_counts + policy.ucb_exploration_c * np.sqrt(
                2.0 * math.log(k + 1.0) / safe_counts
            )
            arms = np.where(unscanned.any(axis=1), first_unscanned, np.argmax(index, axis=1))
        else:
            raise ValueError(f"unknown policy kind {policy.kind!r}")

        u_feedback = uniforms[:, col]
        col += 1
        rate = np.where(arms == sectors, nu, 1.0)
        y = -np.log1p(-u_feedback) / rate
        m[rows, arms] += (1.0 - nu) * y + log_nu
        if is_ucb:
            counts[rows, arms] += 1.0
            sums[rows, arms] += y

    data_beams = np.argmax(m, axis=1)
    return data_beams == sectors


def _chunk_task(args) -> tuple[int, int, int]:
    policy_index, point_index, chunk_args = args
    aligned = _simulate_chunk(*chunk_args)
    return policy_index, point_index, int(aligned.sum())


def run_sweep(config: ExperimentConfig, workers: int = 1) -> list[SweepPointResult]:
    """Run the configured sweep; identical output for any worker count.

    Frames are processed in fixed-size chunks whose integer alignment counts
    are summed, so aggregation is exactly order-insensitive.
    """
    seed = config.base_seed if config.base_seed is not None else DEFAULT_BASE_SEED
    points = _sweep_points(config)
    data_params = _data_phase_params(config)
    prior = config.prior_vector()

    tasks = []
    for policy_index, policy in enumerate(config.policies):
        for point_index, (lambda_db, L) in enumerate(points):
            nu = compute_nu(_gain_model(config, lambda_db))
            for start in range(0, config.iterations, CHUNK_FRAMES):
                stop = min(start + CHUNK_FRAMES, config.iterations)
                chunk_args = (
                    config.num_arms,
                    L,
                    nu,
                    prior,
                    policy,
                    seed,
                    policy_index,
                    point_index,
                    start,
                    stop,
                )
                tasks.append((policy_index, point_index, chunk_args))

    hits: dict[tuple[int, int], int] = {}
    if workers <= 1:
        for policy_index, point_index, chunk_hits in map(_chunk_task, tasks):
            key = (policy_index, point_index)
            hits[key] = hits.get(key, 0) + chunk_hits
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for policy_index, point_index, chunk_hits in pool.map(_chunk_task, tasks):
                key = (policy_index, point_index)
                hits[key] = hits.get(key, 0) + chunk_hits

    results = []
    sweep_var = "lambda_db" if config.sweep_kind == SWEEP_SNR else "slots_L"
    for policy_index, policy in enumerate(config.policies):
        for point_index, (lambda_db, L) in enumerate(points):
            n = config.iterations
            p = hits[(policy_index, point_index)] / n
            ci = 1.96 * math.sqrt(p * (1.0 - p) / n)
            rate_bps = expected_frame_rate(
                p,
                L,
                config.slots_per_frame_N,
                config.slot_duration_Ts,
                config.frame_duration_Tfr,
                data_params,
            )
            results.append(
                SweepPointResult(
                    policy=policy.label(),
                    sweep_var=sweep_var,
                    sweep_value=float(lambda_db if sweep_var == "lambda_db" else L),
                    p_align=p,
                    p_align_ci95=ci,
                    spectral_efficiency=rate_bps / config.link.bandwidth_Wtot,
                    iterations_used=n,
                    seed=seed,
                )
            )
    return results


def _sweep_points(config: ExperimentConfig) -> list[tuple[float, int]]:
    """(lambda_db, L) pairs in sweep order."""
    if config.sweep_kind == SWEEP_SNR:
        return [(lam, config.slots_L) for lam in config.lambda_db_values]
    return [(config.lambda_db_fixed, L) for L in config.slots_L_values]


def _data_phase_params(config: ExperimentConfig) -> DataPhaseParams:
    """Rate selection is sweep-invariant, so it is optimized once per config."""
    link = replace(config.link, max_data_power_Pmax=config.effective_data_power_W())
    return optimize_rate_power(link, config.main_lobe_gain())


def format_csv(results: list[SweepPointResult]) -> str:
    """CSV text with float fields at 9 significant digits."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in results:
        writer.writerow(
            [
                r.policy,
                r.sweep_var,
                f"{r.sweep_value:.9g}",
                f"{r.p_align:.9g}",
                f"{r.p_align_ci95:.9g}",
                f"{r.spectral_efficiency:.9g}",
                r.iterations_used,
                r.seed,
            ]
        )
    return buf.getvalue()


def emit_results(
    results: list[SweepPointResult],
    format: str,
    path: Union[str, Path],
    config: Union[ExperimentConfig, None] = None,
) -> Path:
    """Persist results as CSV or JSON (JSON embeds the resolved config)."""
    if not results:
        raise ValueError("no results to emit")
    path = Path(path)
    if format == "csv":
        path.write_text(format_csv(results))
    elif format == "json":
        doc = {
            "config": config.to_dict() if config is not None else None,
            "results": [
                {
                    "policy": r.policy,
                    "sweep_var": r.sweep_var,
                    "sweep_value": r.sweep_value,
                    "p_align": r.p_align,
                    "ci95": r.p_align_ci95,
                    "spectral_eff_bps_hz": r.spectral_efficiency,
                    "iterations": r.iterations_used,
                    "seed": r.seed,
                }
                for r in results
            ],
        }
        path.write_text(json.dumps(doc, indent=2) + "\n")
    else:
        raise ValueError(f"unknown output format {format!r}")
    return path
