"""Request/response models for the HTTP service (mirrors the TOML config schema)."""

from __future__ import annotations

import math
from typing import Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field

from .config import ConfigError, ExperimentConfig, config_from_dict


class ExperimentSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    num_arms: int
    slots_L: int
    slots_per_frame_N: int
    slot_duration_s: float
    frame_duration_s: float
    iterations: int = 100_000
    base_seed: Optional[int] = None
    prior: Union[str, list[float]] = "uniform"
    policies: list[str]


class SweepSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["snr", "overhead"] = "snr"
    lambda_db: list[float] = Field(default_factory=list)
    lambda_db_fixed: float = 0.0
    slots_L_values: list[int] = Field(default_factory=list)


class GainsSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    main_lobe_db: float
    side_lobe_db: float


class LinkSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    carrier_frequency_hz: float
    distance_m: float
    path_loss_exponent: float
    noise_psd_dbm_hz: float
    bandwidth_hz: float
    ba_power_dbm: float = 22.0
    max_data_power_dbm: float = 22.0
    data_power_mode: Literal["fixed", "optimize"] = "fixed"
    data_power_dbm: float = 22.0


class ConfigModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    experiment: ExperimentSection
    sweep: SweepSection = Field(default_factory=SweepSection)
    gains: GainsSection
    link: LinkSection

    def to_experiment_config(self) -> ExperimentConfig:
        """Validate into the core config type (raises ConfigError on bad values)."""
        return config_from_dict(self.model_dump())

    @classmethod
    def from_experiment_config(cls, config: ExperimentConfig) -> "ConfigModel":
        doc = config.to_dict()
        link = doc["link"]
        return cls.model_validate(
            {
                "experiment": doc["experiment"],
                "sweep": doc["sweep"],
                "gains": doc["gains"],
                "link": {
                    "carrier_frequency_hz": link["carrier_frequency_hz"],
                    "distance_m": link["distance_m"],
                    "path_loss_exponent": link["path_loss_exponent"],
                    "noise_psd_dbm_hz": _watt_to_dbm(link["noise_psd_W_hz"]),
                    "bandwidth_hz": link["bandwidth_hz"],
                    "ba_power_dbm": _watt_to_dbm(link["ba_power_W"]),
                    "max_data_power_dbm": _watt_to_dbm(link["max_data_power_W"]),
                    "data_power_mode": link["data_power_mode"],
                    "data_power_dbm": _watt_to_dbm(link["data_power_W"]),
                },
            }
        )


class SweepRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    config: ConfigModel
    workers: int = 1


class SweepPointModel(BaseModel):
    policy: str
    sweep_var: str
    sweep_value: float
    p_align: float
    ci95: float
    spectral_eff_bps_hz: float
    iterations: int
    seed: int


class SweepResponse(BaseModel):
    config: dict
    results: list[SweepPointModel]


class BoundsRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    m: list[float]
    nu: float
    L: int
    k: int
    exact: bool = True
    nodes_per_panel: int = 6
    growth: float = 2.0


class BoundsResponse(BaseModel):
    m: list[float]
    nu: float
    L: int
    k: int
    arm: Optional[int]
    lower: float
    upper: float
    exact: Optional[float]
    note: Optional[str] = None


class FrameTraceRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    config: ConfigModel
    policy: str
    lambda_db: Optional[float] = None
    slots_L: Optional[int] = None
    seed: Optional[int] = None
    frame_index: int = 0


class SlotTrace(BaseModel):
    slot: int
    scanned_arm: int
    feedback: float
    preferences: list[float]


class FrameTraceResponse(BaseModel):
    policy: str
    lambda_db: float
    nu: float
    seed: int
    frame_index: int
    true_sector: int
    slots: list[SlotTrace]
    data_beam: int
    aligned: bool


class HealthResponse(BaseModel):
    status: str
    version: str


def _watt_to_dbm(watts: float) -> float:
    return 10.0 * math.log10(watts) + 30.0


__all__ = [
    "BoundsRequest",
    "BoundsResponse",
    "ConfigError",
    "ConfigModel",
    "ExperimentSection",
    "FrameTraceRequest",
    "FrameTraceResponse",
    "GainsSection",
    "HealthResponse",
    "LinkSection",
    "SlotTrace",
    "SweepPointModel",
    "SweepRequest",
    "SweepResponse",
    "SweepSection",
]
