import json

import pytest

from core.config import AnalysisConfig, ColumnMapping, load_column_mapping, load_config
from core.errors import ConfigError


def test_defaults_are_valid():
    config = AnalysisConfig().validate()
    assert config.jsd_log_base == 2.0
    assert config.epsilon == 1e-9
    assert config.cr_k_list == (3, 5)
    assert config.base_year is None
    assert config.p_value_exact_threshold == 9
    assert (config.year_min, config.year_max) == (2019, 2022)


@pytest.mark.parametrize("overrides", [
    {"epsilon": 0.0},
    {"epsilon": -1e-9},
    {"jsd_log_base": 1.0},
    {"cr_k_list": (5, 3)},
    {"cr_k_list": (0, 3)},
    {"cr_k_list": (3, 3)},
    {"year_min": 2023, "year_max": 2019},
    {"output_format": "xlsx"},
    {"histogram_bins": 0},
])
def test_invalid_values_are_rejected(overrides):
    with pytest.raises(ConfigError):
        AnalysisConfig().with_overrides(**overrides)


def test_none_overrides_leave_values_alone():
    config = AnalysisConfig().with_overrides(epsilon=None, year_min=2020)
    assert config.epsilon == 1e-9
    assert config.year_min == 2020


def test_to_dict_echoes_effective_config():
    data = AnalysisConfig().to_dict()
    assert data["cr_k_list"] == [3, 5]
    assert data["entropy_log"] == "natural"
    assert data["column_mapping"]["import_loading"] == "Port_of_Loading"
    json.dumps(data)


def test_load_config_file_then_flags_win(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"epsilon": 1e-6, "cr_k_list": [1, 4], "year_min": 2020}), encoding="utf-8")
    config = load_config(path, year_min=2021)
    assert config.epsilon == 1e-6
    assert config.cr_k_list == (1, 4)
    assert config.year_min == 2021


def test_load_config_reads_env_path(tmp_path, monkeypatch):
    path = tmp_path / "env_config.json"
    path.write_text(json.dumps({"top_n": 3}), encoding="utf-8")
    monkeypatch.setenv("FLOWSTRUCT_CONFIG", str(path))
    assert load_config().top_n == 3


def test_load_config_rejects_unknown_keys(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"espilon": 1e-6}), encoding="utf-8")
    with pytest.raises(ConfigError, match="espilon"):
        load_config(path)


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.json")


def test_column_mapping_file_overrides_names(tmp_path):
    path = tmp_path / "mapping.json"
    path.write_text(json.dumps({"ffe": "TEU_40", "route": "Service"}), encoding="utf-8")
    mapping = load_column_mapping(path)
    assert mapping.ffe == "TEU_40"
    assert mapping.route == "Service"
    assert mapping.year == "Year"


def test_column_mapping_rejects_unknown_and_empty():
    with pytest.raises(ConfigError):
        ColumnMapping.from_dict({"tonnage": "T"})
    with pytest.raises(ConfigError):
        ColumnMapping.from_dict({"ffe": "  "})


def test_bundled_mapping_matches_defaults():
    assert load_column_mapping() == ColumnMapping()
