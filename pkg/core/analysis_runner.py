"""
Main analysis orchestrator for flowstruct

Wires ingestion, metrics and report building together for each
subcommand. Every run_* method returns a ReportBundle; rendering and exit
codes are left to the CLI.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from core.config import AnalysisConfig
from core.errors import DataError, NoRecordsError
from core.records import (
    STRUCTURAL_DIMENSIONS, DimensionKey, Direction, RecordFilter, Scope, ShipmentRecord, apply_filter,
)
from generators.report_generator import (
    ReportBundle, ReportMetadata, asymmetry_table, concentration_table, drift_tables, ingest_table,
    orientation_table, profile_tables, report_timestamp, route_table, share_table,
)
from generators.synthetic_generator import generate, load_synth_target
from ingest.normalize import IngestReport
from ingest.shipment_io import ShipmentReader, SourceFile, records_to_csv, write_records_csv
from ingest.taxonomy import RouteTaxonomy, load_taxonomy
from metrics.concentration import concentration_summary
from metrics.distribution import build_distribution, top_k
from metrics.divergence import asymmetry_report, orientation_index
from metrics.profile import annual_totals, direction_counts, ffe_summary, log_histogram
from metrics.temporal import drift_series, yearly_distributions
from utils.file_utils import digest_rows
from utils.logging_config import get_logger

logger = get_logger(__name__)


@dataclass
class InputFiles:
    """Canonical-layout files plus raw import and export files"""
    canonical: List[Path] = field(default_factory=list)
    imports: List[Path] = field(default_factory=list)
    exports: List[Path] = field(default_factory=list)

    def sources(self) -> List[SourceFile]:
        return (
            [SourceFile(Path(p)) for p in self.canonical]
            + [SourceFile(Path(p), Direction.IMPORT) for p in self.imports]
            + [SourceFile(Path(p), Direction.EXPORT) for p in self.exports]
        )


class AnalysisRunner:
    def __init__(self, config: AnalysisConfig = AnalysisConfig()):
        self.config = config.validate()
        self._taxonomy: Optional[RouteTaxonomy] = None

    @property
    def taxonomy(self) -> RouteTaxonomy:
        if self._taxonomy is None:
            self._taxonomy = load_taxonomy(self.config.taxonomy_path)
        return self._taxonomy

    def load(self, inputs: InputFiles) -> Tuple[List[ShipmentRecord], IngestReport]:
        reader = ShipmentReader(self.config)
        return reader.ingest_sources(inputs.sources(), self.taxonomy)

    def _bundle(self, command: str, records: Sequence[ShipmentRecord], report: IngestReport) -> ReportBundle:
        metadata = ReportMetadata(
            command=command,
            config=self.config.to_dict(),
            input_digest=digest_rows(r.canonical_row() for r in records) if records else None,
            record_count=len(records),
            timestamp=report_timestamp(),
        )
        return ReportBundle(metadata).add("ingest", ingest_table(report))

    def _scoped(self, records: Sequence[ShipmentRecord], scopes: Sequence[Scope],
                explicit: bool) -> List[Tuple[Scope, List[ShipmentRecord]]]:
        """Records per scope; empty scopes are an error when named, skipped otherwise"""
        selected = []
        for scope in scopes:
            subset = [r for r in records if scope.matches(r)]
            if subset:
                selected.append((scope, subset))
            elif explicit:
                raise DataError(f"Scope '{scope.value}' has no records")
            else:
                logger.warning(f"Scope '{scope.value}' has no records, skipped")
        return selected

    # --- Subcommands ---

    def run_validate(self, inputs: InputFiles) -> Tuple[ReportBundle, bool]:
        """Ingestion tallies, and whether any record was accepted"""
        try:
            records, report = self.load(inputs)
        except NoRecordsError as e:
            if e.report is None:
                raise
            logger.error(str(e))
            return self._bundle("validate", [], e.report), False
        return self._bundle("validate", records, report), True

    def run_analyze(self, inputs: InputFiles, dimension: DimensionKey = DimensionKey.ROUTE,
                    scopes: Sequence[Scope] = tuple(Scope), explicit_scopes: bool = False,
                    top_n: Optional[int] = None, years: Optional[Sequence[int]] = None) -> ReportBundle:
        records, report = self.load(inputs)
        bundle = self._bundle("analyze", records, report)
        top_n = top_n or self.config.top_n
        if years:
            records = apply_filter(records, RecordFilter(years=frozenset(years)))
            if not records:
                raise DataError(f"No records in year(s) {sorted(set(years))}")
            logger.info(f"Restricted to year(s) {sorted(set(years))}: {len(records)} records")

        summaries, share_tables = [], []
        for scope, subset in self._scoped(records, scopes, explicit_scopes):
            dist = build_distribution(subset, dimension)
            summaries.append(concentration_summary(dist, self.config.cr_k_list, scope))
            share_tables.append(share_table(dimension, scope, top_k(dist, top_n)))
            logger.info(f"{dimension.value} ({scope.label}): n={dist.n}, HHI={summaries[-1].hhi:.4f}")
        if not summaries:
            raise DataError("No scope left to analyze")

        bundle.add("concentration", concentration_table(summaries))
        bundle.add("top_shares", *share_tables)
        if dimension is DimensionKey.ROUTE:
            bundle.add("routes", route_table(build_distribution(records, dimension), self.taxonomy))
        return bundle

    def run_asymmetry(self, inputs: InputFiles,
                      dimensions: Sequence[DimensionKey] = STRUCTURAL_DIMENSIONS) -> ReportBundle:
        records, report = self.load(inputs)
        bundle = self._bundle("asymmetry", records, report)
        imports = [r for r in records if r.direction is Direction.IMPORT]
        exports = [r for r in records if r.direction is Direction.EXPORT]
        if not imports or not exports:
            empty = "import" if not imports else "export"
            raise DataError(f"Asymmetry needs both directions; the {empty} side has no records")

        reports = []
        for dimension in dimensions:
            p = build_distribution(imports, dimension)
            q = build_distribution(exports, dimension)
            reports.append(asymmetry_report(p, q, self.config.jsd_log_base, self.config.p_value_exact_threshold))
            if dimension is DimensionKey.INDUSTRY:
                table = orientation_index(q.share_map(), p.share_map(), self.config.epsilon)
                bundle.add("orientation", orientation_table(table))
                logger.info(f"Most export-oriented industry: {table.most_export_oriented()}")
        return bundle.add("asymmetry", asymmetry_table(reports))

    def run_drift(self, inputs: InputFiles, dimensions: Sequence[DimensionKey] = STRUCTURAL_DIMENSIONS,
                  scopes: Sequence[Scope] = (Scope.ALL,), explicit_scopes: bool = False,
                  base_year: Optional[int] = None) -> ReportBundle:
        records, report = self.load(inputs)
        bundle = self._bundle("drift", records, report)
        base_year = base_year if base_year is not None else self.config.base_year

        for scope, subset in self._scoped(records, scopes, explicit_scopes):
            years = {r.year for r in subset}
            if len(years) < 2:
                raise DataError(f"Drift needs at least two years; scope '{scope.value}' only has {sorted(years)}")
            for dimension in dimensions:
                yearly = yearly_distributions(subset, dimension, RecordFilter(scope))
                drift = drift_series(yearly, base_year, self.config.jsd_log_base, scope,
                                     self.config.p_value_exact_threshold)
                bundle.add("drift", *drift_tables(drift))
        return bundle

    def run_profile(self, inputs: InputFiles, bins: Optional[int] = None) -> ReportBundle:
        records, report = self.load(inputs)
        bundle = self._bundle("profile", records, report)
        histogram = log_histogram([r.ffe for r in records], bins or self.config.histogram_bins)
        totals = annual_totals(records)
        logger.info(f"Profiled {len(records)} records: {totals.grand_total:.1f} FFE "
                    f"({totals.by_direction(Direction.IMPORT):.1f} import, "
                    f"{totals.by_direction(Direction.EXPORT):.1f} export)")
        return bundle.add("profile", *profile_tables(
            ffe_summary(records), totals, direction_counts(records), histogram,
        ))


def run_synth(target_path: Path, mode: str = "exact", seed: Optional[int] = None,
              output: Optional[Path] = None) -> Tuple[List[ShipmentRecord], str]:
    """Generate records from a target file; writes the CSV to output, else returns its text"""
    target = load_synth_target(target_path, seed)
    records = generate(target, mode)
    if output is not None:
        write_records_csv(records, output)
        return records, ""
    return records, records_to_csv(records)
