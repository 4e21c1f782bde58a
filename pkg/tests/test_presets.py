"""Tests for the bundled experiment presets and their repo-level copies."""

from importlib import resources
from pathlib import Path

from beamalign.cli import resolve_config_path
from beamalign.config import load_config

REPO_CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def packaged_preset(name: str) -> Path:
    return Path(str(resources.files("beamalign").joinpath(f"presets/{name}.toml")))


def test_fig2_preset_parameters():
    cfg = load_config(resolve_config_path("fig2"))
    assert cfg.num_arms == 32
    assert cfg.slots_L == 32
    assert cfg.slots_per_frame_N == 200
    assert cfg.slot_duration_Ts == 1e-4
    assert cfg.frame_duration_Tfr == 2e-2
    assert cfg.iterations == 100_000
    assert cfg.prior == "uniform"
    assert [p.label() for p in cfg.policies] == [
        "second-best", "first-best", "lts", "ucb:c=1", "random",
    ]
    assert cfg.sweep_kind == "snr"
    assert cfg.lambda_db_values[0] == -10.0
    assert cfg.lambda_db_values[-1] == 15.0
    assert len(cfg.lambda_db_values) == 11
    steps = [b - a for a, b in zip(cfg.lambda_db_values, cfg.lambda_db_values[1:])]
    assert all(abs(s - 2.5) < 1e-12 for s in steps)
    assert cfg.main_lobe_db == 14.0
    assert cfg.side_lobe_db == -11.0
    assert cfg.link.carrier_frequency_fc == 30e9
    assert cfg.link.distance_d == 10.0
    assert cfg.link.path_loss_exponent == 2.0
    assert cfg.link.bandwidth_Wtot == 2e8
    assert cfg.data_power_mode == "fixed"
    assert cfg.base_seed is None  # resolved by the CLI seed chain
    assert cfg.output_path == "fig2_results.csv"


def test_fig3_preset_parameters():
    cfg = load_config(resolve_config_path("fig3"))
    assert cfg.sweep_kind == "overhead"
    assert cfg.lambda_db_fixed == 0.0
    assert cfg.slots_L_values == (4, 8, 16, 32, 64, 96)
    assert [p.label() for p in cfg.policies] == ["second-best"]
    assert cfg.num_arms == 32
    assert cfg.iterations == 100_000
    assert cfg.data_power_mode == "fixed"
    assert cfg.output_path == "fig3_results.csv"


def test_repo_configs_match_packaged_presets():
    # The copies under configs/ exist for discoverability; they must never
    # drift from the packaged presets the CLI resolves by name.
    for name in ("fig2", "fig3"):
        repo = (REPO_CONFIGS / f"{name}.toml").read_bytes()
        packaged = packaged_preset(name).read_bytes()
        assert repo == packaged
