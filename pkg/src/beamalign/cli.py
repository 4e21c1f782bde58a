"""Command-line interface: a thin client over the HTTP service.

Subcommands map 1:1 onto service endpoints; by default the app is driven
in-process (no socket), and --server switches to a remote instance. `serve`
runs the service under uvicorn.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from importlib import resources
from pathlib import Path
from typing import Union

from .config import ConfigError, ExperimentConfig, load_config, override_config
from .harness import SweepPointResult, emit_results
from .policies import parse_policy_spec
from .rngstream import DEFAULT_BASE_SEED, SEED_ENV_VAR
from .schemas import ConfigModel

PRESET_NAMES = ("fig2", "fig3")


def main(argv: Union[list[str], None] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except _ServiceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="beamalign",
        description="Bandit-based beam-alignment simulator (sweeps, bounds, traces)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sweep_snr = sub.add_parser(
        "sweep-snr", help="alignment probability and spectral efficiency vs SNR"
    )
    _add_sweep_args(sweep_snr)
    sweep_snr.set_defaults(handler=_cmd_sweep_snr)

    sweep_overhead = sub.add_parser(
        "sweep-overhead", help="spectral efficiency vs number of alignment slots"
    )
    _add_sweep_args(sweep_overhead)
    sweep_overhead.set_defaults(handler=_cmd_sweep_overhead)

    bounds = sub.add_parser(
        "bounds", help="lower/upper/exact scan-value for a preference vector"
    )
    bounds.add_argument("--m", required=True, help="comma-separated preferences, e.g. 0,0")
    bounds.add_argument("--nu", type=float, required=True)
    bounds.add_argument("--L", type=int, required=True)
    bounds.add_argument("--k", type=int, required=True)
    bounds.add_argument(
        "--no-exact", action="store_true", help="skip the quadrature oracle"
    )
    bounds.add_argument("--nodes-per-panel", type=int, default=6)
    bounds.add_argument("--growth", type=float, default=2.0)
    bounds.add_argument("--server", default=None, help="base URL of a running service")
    bounds.set_defaults(handler=_cmd_bounds)

    trace = sub.add_parser("frame-trace", help="verbose single-frame trajectory dump")
    trace.add_argument("--config", required=True, help="config file path or preset name")
    trace.add_argument("--policy", default="second-best")
    trace.add_argument("--lambda-db", type=float, default=None)
    trace.add_argument("--slots", type=int, default=None, help="override slots_L")
    trace.add_argument("--seed", type=int, default=None)
    trace.add_argument("--frame-index", type=int, default=0)
    trace.add_argument("--server", default=None, help="base URL of a running service")
    trace.set_defaults(handler=_cmd_frame_trace)

    serve = sub.add_parser("serve", help="run the HTTP service under uvicorn")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.set_defaults(handler=_cmd_serve)

    return parser


def _add_sweep_args(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", required=True, help="config file path or preset name")
    sub.add_argument("--seed", type=int, default=None, help="base seed override")
    sub.add_argument("--iterations", type=int, default=None)
    sub.add_argument(
        "--policies",
        default=None,
        help="comma-separated list, e.g. second-best,lts,ucb:c=1",
    )
    sub.add_argument("--output", default=None, help="output file path")
    sub.add_argument("--format", choices=("csv", "json"), default=None)
    sub.add_argument("--workers", type=int, default=1, help="parallel worker processes")
    sub.add_argument("--server", default=None, help="base URL of a running service")


class _ServiceError(RuntimeError):
    pass


def _client(server: Union[str, None]):
    if server:
        import httpx

        return httpx.Client(base_url=server)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    from .service import create_app

    return TestClient(create_app())


def _post(client, path: str, payload: dict) -> dict:
    response = client.post(path, json=payload)
    if response.status_code != 200:
        try:
            detail = response.json().get("detail", response.text)
        except ValueError:
            detail = response.text
        raise _ServiceError(f"{path} failed ({response.status_code}): {detail}")
    return response.json()


def resolve_config_path(spec: str) -> Path:
    """Interpret --config as an existing file path or a bundled preset name."""
    path = Path(spec)
    if path.is_file():
        return path
    name = spec[: -len(".toml")] if spec.endswith(".toml") else spec
    if name in PRESET_NAMES:
        return Path(str(resources.files("beamalign").joinpath(f"presets/{name}.toml")))
    raise ConfigError(f"config file not found: {spec}")


def _load_config_with_overrides(args) -> ExperimentConfig:
    config = load_config(resolve_config_path(args.config))
    policies = None
    if args.policies is not None:
        try:
            policies = tuple(
                parse_policy_spec(p) for p in args.policies.split(",") if p.strip()
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if not policies:
            raise ConfigError("empty --policies list")
    seed = _resolve_seed(args.seed, config.base_seed)
    return override_config(
        config,
        base_seed=seed,
        iterations=args.iterations,
        policies=policies,
        output_path=args.output,
        output_format=args.format,
    )


def _resolve_seed(cli_seed: Union[int, None], config_seed: Union[int, None]) -> int:
    """Precedence: --seed, then config base_seed, then $BEAMALIGN_SEED, then 42."""
    if cli_seed is not None:
        return cli_seed
    if config_seed is not None:
        return config_seed
    env = os.environ.get(SEED_ENV_VAR)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"{SEED_ENV_VAR} must be an integer, got {env!r}") from None
    return DEFAULT_BASE_SEED


def _run_sweep_command(args, endpoint: str, expected_kind: str) -> int:
    config = _load_config_with_overrides(args)
    if config.sweep_kind != expected_kind:
        raise ConfigError(
            f"this subcommand needs a {expected_kind!r} sweep config, got "
            f"{config.sweep_kind!r}"
        )
    payload = {
        "config": ConfigModel.from_experiment_config(config).model_dump(),
        "workers": max(1, args.workers),
    }
    with _client(args.server) as client:
        doc = _post(client, endpoint, payload)
    results = [
        SweepPointResult(
            policy=r["policy"],
            sweep_var=r["sweep_var"],
            sweep_value=r["sweep_value"],
            p_align=r["p_align"],
            p_align_ci95=r["ci95"],
            spectral_efficiency=r["spectral_eff_bps_hz"],
            iterations_used=r["iterations"],
            seed=r["seed"],
        )
        for r in doc["results"]
    ]
    out_path = emit_results(results, config.output_format, config.output_path, config)
    print(f"wrote {out_path} ({len(results)} rows)")
    return 0


def _cmd_sweep_snr(args) -> int:
    return _run_sweep_command(args, "/sweep/snr", "snr")


def _cmd_sweep_overhead(args) -> int:
    return _run_sweep_command(args, "/sweep/overhead", "overhead")


def _cmd_bounds(args) -> int:
    try:
        m = [float(x) for x in args.m.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"bad preference list {args.m!r}") from None
    payload = {
        "m": m,
        "nu": args.nu,
        "L": args.L,
        "k": args.k,
        "exact": not args.no_exact,
        "nodes_per_panel": args.nodes_per_panel,
        "growth": args.growth,
    }
    with _client(args.server) as client:
        doc = _post(client, "/bounds", payload)
    print(json.dumps(doc, indent=2))
    return 0


def _cmd_frame_trace(args) -> int:
    config = load_config(resolve_config_path(args.config))
    payload = {
        "config": ConfigModel.from_experiment_config(config).model_dump(),
        "policy": args.policy,
        "lambda_db": args.lambda_db,
        "slots_L": args.slots,
        "seed": _resolve_seed(args.seed, config.base_seed),
        "frame_index": args.frame_index,
    }
    with _client(args.server) as client:
        doc = _post(client, "/frame-trace", payload)
    print(json.dumps(doc, indent=2))
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return 0


if __name__ == "__main__":
    sys.exit(main())
