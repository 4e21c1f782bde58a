"""Experiment configuration: TOML schema, validation, and unit conversions.

Config files use typed sections [experiment], [sweep], [gains], [link],
[output]. Gains and powers are given in dB / dBm and converted to linear scale
on load; see the README for the full schema and the bundled presets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Union

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .channel import LinkBudget
from .policies import PolicySpec, parse_policy_spec

SWEEP_SNR = "snr"
SWEEP_OVERHEAD = "overhead"
POWER_MODE_FIXED = "fixed"
POWER_MODE_OPTIMIZE = "optimize"


class ConfigError(ValueError):
    """Raised for malformed or inconsistent experiment configuration."""


def db_to_linear(value_db: float) -> float:
    return 10.0 ** (value_db / 10.0)


def dbm_to_watt(value_dbm: float) -> float:
    return 10.0 ** ((value_dbm - 30.0) / 10.0)


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully resolved parameterization of one sweep experiment."""

    num_arms: int
    slots_L: int
    slots_per_frame_N: int
    slot_duration_Ts: float
    frame_duration_Tfr: float
    iterations: int
    policies: tuple[PolicySpec, ...]
    prior: Union[str, tuple[float, ...]]
    sweep_kind: str
    lambda_db_values: tuple[float, ...]
    slots_L_values: tuple[int, ...]
    lambda_db_fixed: float
    main_lobe_db: float
    side_lobe_db: float
    link: LinkBudget
    data_power_mode: str
    data_power_W: float
    base_seed: Union[int, None] = None
    output_path: str = "results.csv"
    output_format: str = "csv"
    raw: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.num_arms < 2:
            raise ConfigError("num_arms must be at least 2")
        if self.iterations < 1:
            raise ConfigError("iterations must be at least 1")
        if not 0 <= self.slots_L < self.slots_per_frame_N:
            raise ConfigError("slots_L must satisfy 0 <= L < N")
        expected_tfr = self.slots_per_frame_N * self.slot_duration_Ts
        if abs(self.frame_duration_Tfr - expected_tfr) > 1e-9 * expected_tfr:
            raise ConfigError("frame_duration must equal N * slot_duration")
        if not self.policies:
            raise ConfigError("at least one policy is required")
        if self.main_lobe_db <= self.side_lobe_db:
            raise ConfigError("main lobe gain must exceed side lobe gain")
        if self.sweep_kind not in (SWEEP_SNR, SWEEP_OVERHEAD):
            raise ConfigError(f"unknown sweep kind {self.sweep_kind!r}")
        if self.sweep_kind == SWEEP_SNR and not self.lambda_db_values:
            raise ConfigError("snr sweep needs a nonempty lambda_db list")
        if self.sweep_kind == SWEEP_OVERHEAD:
            if not self.slots_L_values:
                raise ConfigError("overhead sweep needs a nonempty slots_L_values list")
            for L in self.slots_L_values:
                if not 0 <= L < self.slots_per_frame_N:
                    raise ConfigError("every swept L must satisfy 0 <= L < N")
        if self.data_power_mode not in (POWER_MODE_FIXED, POWER_MODE_OPTIMIZE):
            raise ConfigError(f"unknown data power mode {self.data_power_mode!r}")
        if self.data_power_W <= 0.0:
            raise ConfigError("data power must be positive")
        if self.output_format not in ("csv", "json"):
            raise ConfigError(f"unknown output format {self.output_format!r}")
        _ = self.prior_vector()  # validates the prior

    def prior_vector(self) -> tuple[float, ...]:
        """Prior belief over arms as a validated probability tuple."""
        if isinstance(self.prior, str):
            if self.prior != "uniform":
                raise ConfigError(f"unknown prior {self.prior!r}")
            return tuple([1.0 / self.num_arms] * self.num_arms)
        values = tuple(float(p) for p in self.prior)
        if len(values) != self.num_arms:
            raise ConfigError("prior length must equal num_arms")
        if any(p <= 0.0 for p in values):
            raise ConfigError("prior entries must be positive")
        if abs(sum(values) - 1.0) > 1e-9:
            raise ConfigError("prior must sum to 1")
        return values

    def effective_data_power_W(self) -> float:
        """Power used by the data phase: fixed value, or the optimizer cap."""
        if self.data_power_mode == POWER_MODE_FIXED:
            return self.data_power_W
        return self.link.max_data_power_Pmax

    def main_lobe_gain(self) -> float:
        return db_to_linear(self.main_lobe_db)

    def side_lobe_gain(self) -> float:
        return db_to_linear(self.side_lobe_db)

    def to_dict(self) -> dict:
        """Resolved config for provenance embedding in JSON outputs."""
        return {
            "experiment": {
                "num_arms": self.num_arms,
                "slots_L": self.slots_L,
                "slots_per_frame_N": self.slots_per_frame_N,
                "slot_duration_s": self.slot_duration_Ts,
                "frame_duration_s": self.frame_duration_Tfr,
                "iterations": self.iterations,
                "base_seed": self.base_seed,
                "prior": self.prior if isinstance(self.prior, str) else list(self.prior),
                "policies": [p.label() for p in self.policies],
            },
            "sweep": {
                "kind": self.sweep_kind,
                "lambda_db": list(self.lambda_db_values),
                "lambda_db_fixed": self.lambda_db_fixed,
                "slots_L_values": list(self.slots_L_values),
            },
            "gains": {
                "main_lobe_db": self.main_lobe_db,
                "side_lobe_db": self.side_lobe_db,
            },
            "link": {
                "carrier_frequency_hz": self.link.carrier_frequency_fc,
                "distance_m": self.link.distance_d,
                "path_loss_exponent": self.link.path_loss_exponent,
                "noise_psd_W_hz": self.link.noise_psd_N0,
                "bandwidth_hz": self.link.bandwidth_Wtot,
                "ba_power_W": self.link.ba_power_Pba,
                "max_data_power_W": self.link.max_data_power_Pmax,
                "data_power_mode": self.data_power_mode,
                "data_power_W": self.data_power_W,
            },
            "output": {"path": self.output_path, "format": self.output_format},
        }


def config_from_dict(doc: dict[str, Any]) -> ExperimentConfig:
    """Build a validated ExperimentConfig from parsed TOML/JSON sections."""
    try:
        exp = dict(doc["experiment"])
        sweep = dict(doc.get("sweep", {}))
        gains = dict(doc["gains"])
        link_doc = dict(doc["link"])
    except KeyError as exc:
        raise ConfigError(f"missing config section {exc.args[0]!r}") from None
    output = dict(doc.get("output", {}))

    try:
        policies = tuple(parse_policy_spec(p) for p in exp.get("policies", []))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    link = LinkBudget(
        carrier_frequency_fc=float(link_doc["carrier_frequency_hz"]),
        distance_d=float(link_doc["distance_m"]),
        path_loss_exponent=float(link_doc["path_loss_exponent"]),
        noise_psd_N0=dbm_to_watt(float(link_doc["noise_psd_dbm_hz"])),
        bandwidth_Wtot=float(link_doc["bandwidth_hz"]),
        ba_power_Pba=dbm_to_watt(float(link_doc.get("ba_power_dbm", 22.0))),
        max_data_power_Pmax=dbm_to_watt(float(link_doc.get("max_data_power_dbm", 22.0))),
    )

    prior_raw = exp.get("prior", "uniform")
    prior = prior_raw if isinstance(prior_raw, str) else tuple(float(p) for p in prior_raw)

    base_seed = exp.get("base_seed")
    kind = sweep.get("kind", SWEEP_SNR)
    try:
        return ExperimentConfig(
            num_arms=int(exp["num_arms"]),
            slots_L=int(exp["slots_L"]),
            slots_per_frame_N=int(exp["slots_per_frame_N"]),
            slot_duration_Ts=float(exp["slot_duration_s"]),
            frame_duration_Tfr=float(exp["frame_duration_s"]),
            iterations=int(exp["iterations"]),
            policies=policies,
            prior=prior,
            sweep_kind=str(kind),
            lambda_db_values=tuple(float(x) for x in sweep.get("lambda_db", [])),
            slots_L_values=tuple(int(x) for x in sweep.get("slots_L_values", [])),
            lambda_db_fixed=float(sweep.get("lambda_db_fixed", 0.0)),
            main_lobe_db=float(gains["main_lobe_db"]),
            side_lobe_db=float(gains["side_lobe_db"]),
            link=link,
            data_power_mode=str(link_doc.get("data_power_mode", POWER_MODE_FIXED)),
            data_power_W=dbm_to_watt(float(link_doc.get("data_power_dbm", 22.0))),
            base_seed=None if base_seed is None else int(base_seed),
            output_path=str(output.get("path", "results.csv")),
            output_format=str(output.get("format", "csv")),
            raw=doc,
        )
    except KeyError as exc:
        raise ConfigError(f"missing config key {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    """Parse and validate a TOML config file."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid TOML: {exc}") from None
    return config_from_dict(doc)


def override_config(
    config: ExperimentConfig,
    *,
    base_seed: Union[int, None] = None,
    iterations: Union[int, None] = None,
    policies: Union[tuple[PolicySpec, ...], None] = None,
    output_path: Union[str, None] = None,
    output_format: Union[str, None] = None,
) -> ExperimentConfig:
    """Copy with selected fields replaced (CLI flag overrides)."""
    doc = config.to_dict()
    kwargs = dict(
        num_arms=config.num_arms,
        slots_L=config.slots_L,
        slots_per_frame_N=config.slots_per_frame_N,
        slot_duration_Ts=config.slot_duration_Ts,
        frame_duration_Tfr=config.frame_duration_Tfr,
        iterations=config.iterations if iterations is None else iterations,
        policies=config.policies if policies is None else policies,
        prior=config.prior,
        sweep_kind=config.sweep_kind,
        lambda_db_values=config.lambda_db_values,
        slots_L_values=config.slots_L_values,
        lambda_db_fixed=config.lambda_db_fixed,
        main_lobe_db=config.main_lobe_db,
        side_lobe_db=config.side_lobe_db,
        link=config.link,
        data_power_mode=config.data_power_mode,
        data_power_W=config.data_power_W,
        base_seed=config.base_seed if base_seed is None else base_seed,
        output_path=config.output_path if output_path is None else output_path,
        output_format=config.output_format if output_format is None else output_format,
        raw=doc,
    )
    return ExperimentConfig(**kwargs)
