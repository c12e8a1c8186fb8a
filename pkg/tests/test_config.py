import importlib.resources
import json

import pytest

from nextpm.config import (ConfigError, config_from_dict, load_config)

from conftest import turbine_config_dict


def fixture_path(name):
    return str(importlib.resources.files("nextpm") / "fixtures" / name)


@pytest.mark.parametrize("name", [
    "table1_d1.json", "table1_d5.json", "table1_d10.json",
    "table1_winter5.json", "table1_summer5.json",
    "table1_winter10.json", "table1_summer10.json", "service_fast.json",
])
def test_bundled_fixtures_load(name):
    config = load_config(fixture_path(name))
    assert config.horizon == 240
    assert config.lam == 3.0
    assert config.window == 80
    assert config.component_ids == (1, 2, 3, 4)
    assert len(config.calendar.values) == 240


def test_round_trip_and_hash():
    raw = turbine_config_dict({"pattern": list(range(1, 13))})
    config = config_from_dict(raw)
    again = config_from_dict(config.to_dict())
    assert again.hash() == config.hash()
    other = config_from_dict(turbine_config_dict({"constant": 5}))
    assert other.hash() != config.hash()


def test_validation_collects_all_problems():
    raw = turbine_config_dict({"constant": 5})
    raw["horizon"] = 0
    raw["lambda"] = -1
    raw["components"][0]["beta"] = 0
    with pytest.raises(ConfigError) as exc:
        config_from_dict(raw)
    msg = str(exc.value)
    assert "horizon" in msg
    assert "lambda" in msg
    assert "beta" in msg or "components[0]" in msg


def test_calendar_length_mismatch():
    raw = turbine_config_dict({"values": [5.0] * 239})
    with pytest.raises(ConfigError):
        config_from_dict(raw)


def test_missing_fields_reported():
    with pytest.raises(ConfigError) as exc:
        config_from_dict({"horizon": 10})
    msg = str(exc.value)
    assert "window" in msg
    assert "components" in msg
    assert "calendar" in msg


def test_parse_error_has_location(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"horizon": 10,\n  "lambda": }\n')
    with pytest.raises(ConfigError) as exc:
        load_config(bad)
    assert "line 2" in str(exc.value)


def test_duplicate_component_ids():
    raw = turbine_config_dict({"constant": 5})
    raw["components"][1]["id"] = 1
    with pytest.raises(ConfigError) as exc:
        config_from_dict(raw)
    assert "unique" in str(exc.value)
