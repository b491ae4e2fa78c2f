"""
Configuration settings for flowstruct
"""

# --- Environment ---
import json
import logging
import os
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple

from dotenv import load_dotenv

from core import __version__
from core.errors import ConfigError

# Load environment variables
load_dotenv()

logger = logging.getLogger(__name__)

TOOL_NAME = "flowstruct"
TOOL_VERSION = __version__

PROJECT_ROOT = Path(__file__).resolve().parent.parent
DATA_DIR = PROJECT_ROOT / "data"
DEFAULT_TAXONOMY_PATH = DATA_DIR / "route_taxonomy.csv"
DEFAULT_MAPPING_PATH = DATA_DIR / "column_mapping.json"
REPORT_SCHEMA_PATH = PROJECT_ROOT / "schemas" / "report.schema.json"


def get_env(key_name, fallback=""):
    """Read a setting from the environment, stripped, with a fallback"""
    value = os.environ.get(key_name)
    if value is not None and value.strip():
        return value.strip()
    return fallback


CONFIG_PATH_ENV = "FLOWSTRUCT_CONFIG"
LOG_LEVEL = get_env("FLOWSTRUCT_LOG_LEVEL", "INFO")
LOG_DIR = get_env("FLOWSTRUCT_LOG_DIR", "logs")

# --- Analysis defaults ---
DEFAULT_JSD_LOG_BASE = 2.0
DEFAULT_EPSILON = 1e-9
DEFAULT_CR_KS = (3, 5)
DEFAULT_EXACT_P_THRESHOLD = 9
DEFAULT_YEAR_RANGE = (2019, 2022)
DEFAULT_TOP_N = 10
DEFAULT_HISTOGRAM_BINS = 30
DEFAULT_CHUNK_SIZE = 50000
OUTPUT_FORMATS = ("json", "csv", "markdown")


@dataclass(frozen=True)
class ColumnMapping:
    """Source column names for the canonical and the direction-specific layouts"""
    year: str = "Year"
    direction: str = "Direction"
    route: str = "Route"
    origin_node: str = "Origin_Node"
    destination_node: str = "Destination_Node"
    industry: str = "Industry"
    commodity: str = "Commodity"
    ffe: str = "FFE"
    # imports: port of loading -> origin, port of discharge -> destination
    import_loading: str = "Port_of_Loading"
    import_discharge: str = "Port_of_Discharge"
    # exports: export loading port -> origin, place of delivery -> destination
    export_loading: str = "Export_Loading_Port"
    export_delivery: str = "Place_of_Delivery"

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ColumnMapping":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"Unknown column mapping keys: {', '.join(unknown)}")
        for key, value in data.items():
            if not isinstance(value, str) or not value.strip():
                raise ConfigError(f"Column mapping '{key}' must be a non-empty string")
        return cls(**{k: v.strip() for k, v in data.items()})


def load_column_mapping(path: Optional[Path] = None) -> ColumnMapping:
    """Load a column mapping file; the bundled default matches the canonical names"""
    path = Path(path) if path else DEFAULT_MAPPING_PATH
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except FileNotFoundError:
        raise ConfigError(f"Column mapping file not found: {path}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"Column mapping file {path} is not valid JSON: {e}")
    if not isinstance(data, dict):
        raise ConfigError(f"Column mapping file {path} must hold a JSON object")
    return ColumnMapping.from_dict(data)


@dataclass(frozen=True)
class AnalysisConfig:
    jsd_log_base: float = DEFAULT_JSD_LOG_BASE
    epsilon: float = DEFAULT_EPSILON
    cr_k_list: Tuple[int, ...] = DEFAULT_CR_KS
    base_year: Optional[int] = None
    p_value_exact_threshold: int = DEFAULT_EXACT_P_THRESHOLD
    year_min: int = DEFAULT_YEAR_RANGE[0]
    year_max: int = DEFAULT_YEAR_RANGE[1]
    column_mapping: ColumnMapping = field(default_factory=ColumnMapping)
    output_format: str = "markdown"
    delimiter: str = ","
    chunk_size: Optional[int] = DEFAULT_CHUNK_SIZE
    top_n: int = DEFAULT_TOP_N
    histogram_bins: int = DEFAULT_HISTOGRAM_BINS
    taxonomy_path: Optional[str] = None

    def validate(self) -> "AnalysisConfig":
        if not self.epsilon > 0:
            raise ConfigError(f"epsilon must be > 0, got {self.epsilon}")
        if not self.jsd_log_base > 1:
            raise ConfigError(f"jsd_log_base must be > 1, got {self.jsd_log_base}")
        ks = list(self.cr_k_list)
        if not ks or any(int(k) != k or k < 1 for k in ks):
            raise ConfigError(f"cr_k_list entries must be integers >= 1, got {ks}")
        if any(b <= a for a, b in zip(ks, ks[1:])):
            raise ConfigError(f"cr_k_list must be strictly increasing, got {ks}")
        if self.year_min > self.year_max:
            raise ConfigError(f"year_min {self.year_min} is after year_max {self.year_max}")
        if self.p_value_exact_threshold < 0:
            raise ConfigError("p_value_exact_threshold must be >= 0")
        if self.output_format not in OUTPUT_FORMATS:
            raise ConfigError(f"output_format must be one of {', '.join(OUTPUT_FORMATS)}")
        if len(self.delimiter) != 1:
            raise ConfigError(f"delimiter must be a single character, got {self.delimiter!r}")
        if self.chunk_size is not None and self.chunk_size < 1:
            raise ConfigError("chunk_size must be >= 1 or null")
        if self.top_n < 1:
            raise ConfigError("top_n must be >= 1")
        if self.histogram_bins < 1:
            raise ConfigError("histogram_bins must be >= 1")
        return self

    def with_overrides(self, **overrides: Any) -> "AnalysisConfig":
        """Apply flag values on top of this config; None means "not given"."""
        given = {k: v for k, v in overrides.items() if v is not None}
        if "cr_k_list" in given:
            given["cr_k_list"] = tuple(given["cr_k_list"])
        return replace(self, **given).validate()

    def to_dict(self) -> Dict[str, Any]:
        """Effective configuration, echoed into report metadata"""
        data = asdict(self)
        data["cr_k_list"] = list(self.cr_k_list)
        data["entropy_log"] = "natural"
        return data


def _config_from_dict(data: Mapping[str, Any]) -> AnalysisConfig:
    data = dict(data)
    mapping = data.pop("column_mapping", None)
    mapping_file = data.pop("column_mapping_file", None)
    known = {f.name for f in fields(AnalysisConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"Unknown configuration keys: {', '.join(unknown)}")
    if "cr_k_list" in data:
        data["cr_k_list"] = tuple(data["cr_k_list"])
    if mapping_file:
        data["column_mapping"] = load_column_mapping(Path(mapping_file))
    elif mapping:
        data["column_mapping"] = ColumnMapping.from_dict(mapping)
    try:
        return AnalysisConfig(**data)
    except TypeError as e:
        raise ConfigError(f"Invalid configuration: {e}")


def load_config(path: Optional[Path] = None, **overrides: Any) -> AnalysisConfig:
    """
    Build the effective configuration: defaults, then the JSON config file
    (explicit path, else $FLOWSTRUCT_CONFIG), then flag overrides.
    """
    if path is None:
        env_path = get_env(CONFIG_PATH_ENV)
        path = Path(env_path) if env_path else None

    config = AnalysisConfig()
    if path is not None:
        logger.info(f"Loading configuration from {path}")
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except FileNotFoundError:
            raise ConfigError(f"Configuration file not found: {path}")
        except json.JSONDecodeError as e:
            raise ConfigError(f"Configuration file {path} is not valid JSON: {e}")
        if not isinstance(data, dict):
            raise ConfigError(f"Configuration file {path} must hold a JSON object")
        config = _config_from_dict(data)

    return config.with_overrides(**overrides)
