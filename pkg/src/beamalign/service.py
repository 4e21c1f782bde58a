"""HTTP service exposing the simulator: sweeps, bound inspection, frame traces.

All endpoints are stateless computations over the request payload; the CLI
drives this app in-process by default and `beamalign serve` runs it under
uvicorn.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, HTTPException

from . import __version__
from .bounds import (
    DP_MAX_ARMS,
    DP_MAX_STEPS,
    HorizonContext,
    QuadratureSettings,
    dp_exact_q,
    dp_guard_ok,
    value_bounds,
)
from .channel import GainModel, compute_nu
from .config import ConfigError, db_to_linear
from .harness import run_frame_trace, run_sweep
from .policies import parse_policy_spec, rank_arms
from .rngstream import DEFAULT_BASE_SEED, frame_seed_sequence
from .schemas import (
    BoundsRequest,
    BoundsResponse,
    FrameTraceRequest,
    FrameTraceResponse,
    HealthResponse,
    SlotTrace,
    SweepPointModel,
    SweepRequest,
    SweepResponse,
)


def create_app() -> FastAPI:
    app = FastAPI(title="beamalign", version=__version__)

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.post("/sweep/snr", response_model=SweepResponse)
    def sweep_snr(request: SweepRequest) -> SweepResponse:
        return _run_sweep_endpoint(request, expected_kind="snr")

    @app.post("/sweep/overhead", response_model=SweepResponse)
    def sweep_overhead(request: SweepRequest) -> SweepResponse:
        return _run_sweep_endpoint(request, expected_kind="overhead")

    @app.post("/bounds", response_model=BoundsResponse)
    def bounds_endpoint(request: BoundsRequest) -> BoundsResponse:
        m = np.array(request.m, dtype=float)
        try:
            ctx = HorizonContext(L=request.L, k=request.k, nu=request.nu)
            pair = value_bounds(m, ctx)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        arm = int(rank_arms(m)[1]) if len(m) >= 2 and ctx.k < ctx.L else None

        exact = None
        note = None
        if request.exact and ctx.k < ctx.L and arm is not None:
            if dp_guard_ok(len(m), ctx):
                quad = QuadratureSettings(
                    nodes_per_panel=request.nodes_per_panel, growth=request.growth
                )
                exact = dp_exact_q(m, arm, ctx, quad)
            else:
                note = (
                    f"exact evaluation skipped: instance exceeds the oracle guard "
                    f"(num_arms <= {DP_MAX_ARMS}, L - k <= {DP_MAX_STEPS})"
                )
        return BoundsResponse(
            m=list(map(float, m)),
            nu=request.nu,
            L=request.L,
            k=request.k,
            arm=arm,
            lower=pair.lower,
            upper=pair.upper,
            exact=exact,
            note=note,
        )

    @app.post("/frame-trace", response_model=FrameTraceResponse)
    def frame_trace(request: FrameTraceRequest) -> FrameTraceResponse:
        try:
            config = request.config.to_experiment_config()
            policy = parse_policy_spec(request.policy)
        except (ConfigError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None

        seed = (
            request.seed
            if request.seed is not None
            else config.base_seed if config.base_seed is not None else DEFAULT_BASE_SEED
        )
        policy_index = next(
            (i for i, p in enumerate(config.policies) if p == policy), 0
        )
        lambda_db = (
            request.lambda_db
            if request.lambda_db is not None
            else (
                config.lambda_db_fixed
                if config.sweep_kind == "overhead"
                else config.lambda_db_values[0]
            )
        )
        nu = compute_nu(
            GainModel(
                config.main_lobe_gain(),
                config.side_lobe_gain(),
                db_to_linear(lambda_db),
            )
        )
        frame_seed = frame_seed_sequence(seed, policy_index, 0, request.frame_index)
        outcome, trajectory = run_frame_trace(
            config, policy, frame_seed, lambda_db=lambda_db, slots_L=request.slots_L
        )
        slots = [
            SlotTrace(
                slot=k,
                scanned_arm=outcome.scanned_arms[k],
                feedback=outcome.feedbacks[k],
                preferences=list(map(float, trajectory[k])),
            )
            for k in range(len(outcome.scanned_arms))
        ]
        return FrameTraceResponse(
            policy=policy.label(),
            lambda_db=lambda_db,
            nu=nu,
            seed=seed,
            frame_index=request.frame_index,
            true_sector=outcome.true_sector,
            slots=slots,
            data_beam=outcome.data_beam,
            aligned=outcome.aligned,
        )

    return app


def _run_sweep_endpoint(request: SweepRequest, expected_kind: str) -> SweepResponse:
    try:
        config = request.config.to_experiment_config()
    except ConfigError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from None
    if config.sweep_kind != expected_kind:
        raise HTTPException(
            status_code=400,
            detail=f"endpoint expects a {expected_kind!r} sweep, config says "
            f"{config.sweep_kind!r}",
        )
    results = run_sweep(config, workers=max(1, request.workers))
    return SweepResponse(
        config=config.to_dict(),
        results=[
            SweepPointModel(
                policy=r.policy,
                sweep_var=r.sweep_var,
                sweep_value=r.sweep_value,
                p_align=r.p_align,
                ci95=r.p_align_ci95,
                spectral_eff_bps_hz=r.spectral_efficiency,
                iterations=r.iterations_used,
                seed=r.seed,
            )
            for r in results
        ],
    )
