"""Config resolution: defaults, file layer, override layer."""

import json

import pytest

from vibecheck.config import ENV_CONFIG, RunConfig, resolve_config
from vibecheck.errors import ValidationError


def test_defaults():
    config = resolve_config(None, {})
    assert config == RunConfig()
    assert config.k == 1.5
    assert config.delta == 1.0
    assert config.correction == "half-count"
    assert config.idle_gap == 120.0
    assert config.velocity_unit == "volume"
    assert config.allow_uncalibrated is False
    assert config.epsilon == 1e-9
    assert config.w1 == config.w2 == config.w3 == pytest.approx(1.0 / 3.0)
    assert config.gamma == 0.0
    assert config.trap_fraction == 0.5
    assert config.replicates == 20_000
    assert config.seed == 0


def test_file_layer_overrides_defaults(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"k": 2.0, "seed": 99}))
    config = resolve_config(str(path), {})
    assert config.k == 2.0
    assert config.seed == 99
    assert config.delta == 1.0  # untouched default


def test_explicit_overrides_beat_file(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"k": 2.0, "seed": 99}))
    config = resolve_config(str(path), {"k": 3.5})
    assert config.k == 3.5
    assert config.seed == 99


def test_none_overrides_are_skipped(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"seed": 99}))
    config = resolve_config(str(path), {"seed": None, "k": None})
    assert config.seed == 99
    assert config.k == 1.5


def test_env_var_names_fallback_file(tmp_path, monkeypatch):
    path = tmp_path / "env.json"
    path.write_text(json.dumps({"gamma": 0.25}))
    monkeypatch.setenv(ENV_CONFIG, str(path))
    assert resolve_config(None, {}).gamma == 0.25


def test_explicit_path_beats_env_var(tmp_path, monkeypatch):
    env_file = tmp_path / "env.json"
    env_file.write_text(json.dumps({"gamma": 0.25}))
    cli_file = tmp_path / "cli.json"
    cli_file.write_text(json.dumps({"gamma": 0.5}))
    monkeypatch.setenv(ENV_CONFIG, str(env_file))
    assert resolve_config(str(cli_file), {}).gamma == 0.5


def test_unknown_file_key_rejected_listing_known_keys(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"kk": 2.0}))
    with pytest.raises(ValidationError, match="unknown config keys: kk") as err:
        resolve_config(str(path), {})
    assert "known keys" in str(err.value)
    assert "trap_fraction" in str(err.value)


def test_unknown_override_rejected():
    with pytest.raises(ValidationError, match="unknown config override"):
        resolve_config(None, {"granularity": 3})


def test_file_values_are_cast(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"replicates": 30000.0, "k": 2}))
    config = resolve_config(str(path), {})
    assert config.replicates == 30000 and isinstance(config.replicates, int)
    assert config.k == 2.0 and isinstance(config.k, float)


def test_uncastable_value_rejected(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"k": "fast"}))
    with pytest.raises(ValidationError, match="bad value for 'k'"):
        resolve_config(str(path), {})


def test_non_object_config_rejected(tmp_path):
    path = tmp_path / "run.json"
    path.write_text("[1, 2, 3]")
    with pytest.raises(ValidationError, match="JSON object"):
        resolve_config(str(path), {})


def test_malformed_json_rejected(tmp_path):
    path = tmp_path / "run.json"
    path.write_text("{nope")
    with pytest.raises(ValidationError, match="not valid JSON"):
        resolve_config(str(path), {})


def test_missing_file_rejected(tmp_path):
    with pytest.raises(ValidationError, match="cannot read config file"):
        resolve_config(str(tmp_path / "absent.json"), {})


@pytest.mark.parametrize(
    "overrides, message",
    [
        ({"correction": "winsor"}, "unknown correction"),
        ({"velocity_unit": "tokens"}, "unknown velocity unit"),
        ({"idle_gap": 0.0}, "idle_gap"),
        ({"epsilon": -1e-9}, "epsilon"),
        ({"trap_fraction": 1.5}, "trap_fraction"),
    ],
)
def test_resolved_config_is_validated(overrides, message):
    with pytest.raises(ValidationError, match=message):
        resolve_config(None, overrides)


def test_to_dict_round_trips_every_field(tmp_path):
    config = resolve_config(None, {"seed": 7, "gamma": 0.1})
    path = tmp_path / "echo.json"
    path.write_text(json.dumps(config.to_dict()))
    assert resolve_config(str(path), {}) == config
