"""
Maritime service route taxonomy (route code -> service description)
"""

from dataclasses import dataclass
from pathlib import Path
from types import MappingProxyType
from typing import Mapping, Optional

import pandas as pd

from core.config import DEFAULT_TAXONOMY_PATH
from core.errors import ConfigError
from utils.logging_config import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class RouteTaxonomy:
    entries: Mapping[str, str]

    def __post_init__(self):
        object.__setattr__(self, "entries", MappingProxyType(dict(self.entries)))

    def __contains__(self, code: str) -> bool:
        return code in self.entries

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class RouteClass:
    code: str
    description: str
    classified: bool


def classify_route(code: str, taxonomy: RouteTaxonomy) -> RouteClass:
    """Service description for a route code; unlisted codes come back as themselves, unclassified"""
    description = taxonomy.entries.get(code)
    if description is None:
        return RouteClass(code=code, description=code, classified=False)
    return RouteClass(code=code, description=description, classified=True)


def load_taxonomy(path: Optional[Path] = None) -> RouteTaxonomy:
    """Read a code,description CSV; the bundled default is the six W1-W5/X6 service classes"""
    path = Path(path) if path else DEFAULT_TAXONOMY_PATH
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8-sig")
    except FileNotFoundError:
        raise ConfigError(f"Taxonomy file not found: {path}")
    except pd.errors.EmptyDataError:
        raise ConfigError(f"Taxonomy {path} is empty")
    except (pd.errors.ParserError, UnicodeDecodeError) as e:
        raise ConfigError(f"Taxonomy {path} could not be parsed: {e}")

    frame.columns = [str(c).strip() for c in frame.columns]
    if not {"code", "description"} <= set(frame.columns):
        raise ConfigError(f"Taxonomy {path} needs 'code' and 'description' columns")
    entries = {}
    for code, description in zip(frame["code"], frame["description"]):
        code = code.strip().upper()
        if not code:
            continue
        if code in entries:
            raise ConfigError(f"Taxonomy {path} lists route code {code} twice")
        entries[code] = description.strip()

    logger.debug(f"Loaded {len(entries)} route classes from {path}")
    return RouteTaxonomy(entries)
