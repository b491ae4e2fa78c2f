"""
Reading and writing shipment CSV files
"""

import io
from dataclasses import dataclass
from itertools import chain
from pathlib import Path
from typing import Iterator, List, Optional, Sequence, Tuple

import pandas as pd

from core.config import AnalysisConfig
from core.errors import DataError, SchemaError
from core.records import CANONICAL_COLUMNS, CandidateRecord, Direction, ShipmentRecord
from ingest.normalize import IngestReport, check_header, harmonize, validate_and_filter
from ingest.taxonomy import RouteTaxonomy
from utils.file_utils import atomic_write_text
from utils.logging_config import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class SourceFile:
    """A CSV file plus the direction of its raw layout (None for the canonical layout)"""
    path: Path
    direction: Optional[Direction] = None


class ShipmentReader:
    def __init__(self, config: AnalysisConfig = AnalysisConfig()):
        self.config = config
        self.mapping = config.column_mapping

    def _frames(self, path: Path) -> Iterator[pd.DataFrame]:
        read_kwargs = dict(
            sep=self.config.delimiter,
            dtype=str,
            keep_default_na=False,
            na_filter=False,
            encoding="utf-8-sig",
        )
        try:
            if self.config.chunk_size is None:
                yield pd.read_csv(path, **read_kwargs)
            else:
                with pd.read_csv(path, chunksize=self.config.chunk_size, **read_kwargs) as reader:
                    for chunk in reader:
                        yield chunk
        except FileNotFoundError:
            raise DataError(f"Input file not found: {path}")
        except pd.errors.EmptyDataError:
            raise SchemaError(f"{path} is empty (no header row)")
        except (pd.errors.ParserError, UnicodeDecodeError) as e:
            raise SchemaError(f"{path} could not be parsed as CSV: {e}")
        except OSError as e:
            raise DataError(f"Cannot read {path}: {e}")

    def read_shipment_file(self, source: SourceFile) -> Iterator[CandidateRecord]:
        """Harmonized candidates of one file, in file order"""
        logger.info(f"Reading {source.path} ({source.direction.value if source.direction else 'canonical'} layout)")
        header_checked = False
        rows = 0
        for frame in self._frames(source.path):
            frame.columns = [str(c).strip() for c in frame.columns]
            if not header_checked:
                try:
                    check_header(frame.columns, self.mapping, source.direction)
                except SchemaError as e:
                    raise SchemaError(f"{source.path}: {e}")
                header_checked = True
            for raw_row in frame.to_dict(orient="records"):
                rows += 1
                yield harmonize(raw_row, source.direction, self.mapping)
        logger.debug(f"Read {rows} rows from {source.path}")

    def ingest_sources(self, sources: Sequence[SourceFile],
                       taxonomy: Optional[RouteTaxonomy] = None) -> Tuple[List[ShipmentRecord], IngestReport]:
        """All sources chained in order, filtered once so tallies span the whole input"""
        if not sources:
            raise DataError("No input files given")
        candidates = chain.from_iterable(self.read_shipment_file(s) for s in sources)
        return validate_and_filter(candidates, self.config, taxonomy)


def records_to_csv(records: Sequence[ShipmentRecord]) -> str:
    """Canonical-layout CSV text with the canonical headers"""
    frame = pd.DataFrame([r.canonical_row() for r in records], columns=list(CANONICAL_COLUMNS))
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, lineterminator="\n")
    return buffer.getvalue()


def write_records_csv(records: Sequence[ShipmentRecord], path: Path) -> Path:
    text = records_to_csv(records)
    logger.info(f"Writing {len(records)} records to {path}")
    return atomic_write_text(path, text)
