"""
Report generation functionality for flowstruct

A ReportBundle holds run metadata plus named sections, each a set of
tables. JSON keeps every value at full precision (NaN becomes null); CSV
and Markdown present reals at 4 decimal places. Sections and tables are
always written in a fixed order so identical bundles render to identical
bytes.
"""

import io
import json
import math
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

import pandas as pd

from core.config import OUTPUT_FORMATS, TOOL_NAME, TOOL_VERSION
from core.errors import ConfigError, DataError
from core.records import DimensionKey, Scope
from ingest.normalize import REJECTION_REASONS, IngestReport
from ingest.taxonomy import RouteTaxonomy, classify_route
from metrics.concentration import ConcentrationSummary
from metrics.distribution import ShareRow, WeightedDistribution
from metrics.divergence import AsymmetryReport, OrientationTable, RankCorrelation
from metrics.profile import AnnualTotals, FfeSummary, HistogramSpec
from metrics.temporal import DriftReport
from utils.file_utils import atomic_write_text, ensure_directory
from utils.logging_config import get_logger

logger = get_logger(__name__)

SECTION_ORDER = (
    "ingest", "profile", "concentration", "top_shares", "routes", "asymmetry", "orientation", "drift",
)
HISTOGRAM_FILE = "ffe_histogram.csv"
ANNUAL_FILE = "annual_ffe.csv"
DECIMALS = 4


@dataclass(frozen=True)
class Column:
    key: str
    label: str
    numeric: bool = True


@dataclass
class ReportTable:
    name: str
    title: str
    columns: List[Column]
    rows: List[Dict[str, Any]] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "title": self.title,
            "columns": [{"key": c.key, "label": c.label} for c in self.columns],
            "rows": [{c.key: _json_value(row.get(c.key)) for c in self.columns} for row in self.rows],
        }


@dataclass
class ReportMetadata:
    command: str
    config: Dict[str, Any]
    input_digest: Optional[str] = None
    record_count: Optional[int] = None
    timestamp: str = ""
    tool: str = TOOL_NAME
    tool_version: str = TOOL_VERSION

    def to_dict(self) -> Dict[str, Any]:
        return {
            "tool": self.tool,
            "tool_version": self.tool_version,
            "command": self.command,
            "timestamp": self.timestamp,
            "input_digest": self.input_digest,
            "record_count": self.record_count,
            "config": self.config,
        }


def report_timestamp() -> str:
    """UTC timestamp, pinned by SOURCE_DATE_EPOCH when it is set"""
    epoch = os.environ.get("SOURCE_DATE_EPOCH", "").strip()
    if epoch:
        try:
            moment = datetime.fromtimestamp(int(epoch), tz=timezone.utc)
        except (ValueError, OverflowError, OSError):
            raise ConfigError(f"SOURCE_DATE_EPOCH must be an integer number of seconds, got {epoch!r}")
    else:
        moment = datetime.now(timezone.utc)
    return moment.strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass
class ReportBundle:
    metadata: ReportMetadata
    sections: Dict[str, List[ReportTable]] = field(default_factory=dict)

    def add(self, section: str, *tables: ReportTable) -> "ReportBundle":
        if section not in SECTION_ORDER:
            raise ValueError(f"Unknown report section '{section}'")
        self.sections.setdefault(section, []).extend(tables)
        return self

    def ordered_sections(self):
        for key in SECTION_ORDER:
            tables = self.sections.get(key)
            if tables:
                yield key, tables

    def table(self, section: str, name: str) -> Optional[ReportTable]:
        for t in self.sections.get(section, []):
            if t.name == name:
                return t
        return None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "metadata": self.metadata.to_dict(),
            "sections": {key: {t.name: t.to_dict() for t in tables} for key, tables in self.ordered_sections()},
        }


# --- Cell formatting ---

def _json_value(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def format_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "n/a"
        return f"{value:.{DECIMALS}f}"
    return str(value)


# --- Rendering ---

def _render_json(bundle: ReportBundle) -> str:
    return json.dumps(bundle.to_dict(), indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def _csv_block(columns: Sequence[str], rows: Iterable[Sequence[str]]) -> str:
    buffer = io.StringIO()
    pd.DataFrame(list(rows), columns=list(columns), dtype=str).to_csv(buffer, index=False, lineterminator="\n")
    return buffer.getvalue()


def _render_csv(bundle: ReportBundle) -> str:
    meta = bundle.metadata.to_dict()
    meta["config"] = json.dumps(meta["config"], sort_keys=True, separators=(",", ":"))
    parts = ["# metadata\n", _csv_block(["key", "value"], [[k, format_cell(v)] for k, v in meta.items()])]
    for key, tables in bundle.ordered_sections():
        for t in tables:
            parts.append(f"\n# {key}.{t.name}\n")
            parts.append(_csv_block(
                [c.label for c in t.columns],
                [[format_cell(row.get(c.key)) for c in t.columns] for row in t.rows],
            ))
    return "".join(parts)


def _md_cell(value: Any) -> str:
    return format_cell(value).replace("|", "\\|")


def _render_markdown(bundle: ReportBundle) -> str:
    meta = bundle.metadata
    lines = [
        f"# {meta.tool} {meta.command} report",
        "",
        f"- tool version: {meta.tool_version}",
        f"- timestamp: {meta.timestamp}",
        f"- input digest: {meta.input_digest or 'n/a'}",
        f"- records: {meta.record_count if meta.record_count is not None else 'n/a'}",
        f"- config: `{json.dumps(meta.config, sort_keys=True, separators=(',', ':'))}`",
    ]
    for _, tables in bundle.ordered_sections():
        for t in tables:
            lines += ["", f"## {t.title}", ""]
            lines.append("| " + " | ".join(_md_cell(c.label) for c in t.columns) + " |")
            lines.append("| " + " | ".join("---:" if c.numeric else "---" for c in t.columns) + " |")
            for row in t.rows:
                lines.append("| " + " | ".join(_md_cell(row.get(c.key)) for c in t.columns) + " |")
    return "\n".join(lines) + "\n"


_RENDERERS = {"json": _render_json, "csv": _render_csv, "markdown": _render_markdown}


def render(bundle: ReportBundle, fmt: str) -> bytes:
    """Serialize a bundle as json, csv or markdown (UTF-8)"""
    renderer = _RENDERERS.get(str(fmt).lower())
    if renderer is None:
        raise ConfigError(f"Unsupported report format '{fmt}' (expected one of {', '.join(OUTPUT_FORMATS)})")
    return renderer(bundle).encode("utf-8")


def emit_plot_data(bundle: ReportBundle, output_dir: Path) -> List[Path]:
    """Write the histogram and annual-series CSVs of the profile section at full precision"""
    histogram = bundle.table("profile", "histogram")
    annual = bundle.table("profile", "annual_totals")
    if histogram is None or annual is None:
        raise DataError("Plot data needs a report with a profile section")
    output_dir = ensure_directory(output_dir)

    written = []
    for table, filename in ((histogram, HISTOGRAM_FILE), (annual, ANNUAL_FILE)):
        frame = pd.DataFrame([[row[c.key] for c in table.columns] for row in table.rows],
                             columns=[c.key for c in table.columns])
        buffer = io.StringIO()
        frame.to_csv(buffer, index=False, lineterminator="\n")
        written.append(atomic_write_text(output_dir / filename, buffer.getvalue()))
    logger.info(f"Plot data written to {output_dir}")
    return written


# --- Section builders ---

def ingest_table(report: IngestReport) -> ReportTable:
    rows = [
        {"item": "raw_count", "value": report.raw_count},
        {"item": "accepted_count", "value": report.accepted_count},
    ]
    rows += [{"item": f"rejected.{reason}", "value": report.rejected.get(reason, 0)} for reason in REJECTION_REASONS]
    rows += [
        {"item": "rejected_count", "value": report.rejected_count},
        {"item": "duplicate_count", "value": report.duplicate_count},
        {"item": "unknown_route_count", "value": report.unknown_route_count},
        {"item": "unknown_route_ffe", "value": report.unknown_route_ffe},
        {"item": "unclassified_route_codes", "value": " ".join(report.unclassified_route_codes)},
    ]
    return ReportTable("tallies", "Ingestion tallies",
                       [Column("item", "Item", numeric=False), Column("value", "Value")], rows)


def concentration_table(summaries: Sequence[ConcentrationSummary]) -> ReportTable:
    """One row per scope: n, total, HHI, effective n, CR_k, H, H_norm, Gini"""
    if not summaries:
        raise DataError("Concentration table needs at least one summary")
    dimension = summaries[0].dimension
    ks = sorted(summaries[0].cr)
    columns = [Column("scope", "Scope", numeric=False), Column("n", f"n {dimension.plural}"),
               Column("total_ffe", "Total FFE"), Column("hhi", "HHI"), Column("effective_n", "Effective n")]
    columns += [Column(f"cr{k}", f"CR{k}") for k in ks]
    columns += [Column("entropy", "H"), Column("entropy_norm", "H_norm"), Column("gini", "Gini")]
    rows = []
    for s in summaries:
        row = {"scope": s.scope.label, "n": s.n, "total_ffe": s.total_ffe, "hhi": s.hhi,
               "effective_n": s.effective_n, "entropy": s.entropy, "entropy_norm": s.entropy_norm, "gini": s.gini}
        row.update({f"cr{k}": s.cr[k] for k in ks})
        rows.append(row)
    return ReportTable(dimension.value, f"{dimension.label} concentration metrics", columns, rows)


def share_table(dimension: DimensionKey, scope: Scope, rows: Sequence[ShareRow]) -> ReportTable:
    """Top-N shares in descending order"""
    columns = [Column("category", dimension.label, numeric=False), Column("total_ffe", "Total FFE"),
               Column("share", "Share")]
    return ReportTable(
        f"{dimension.value}_{scope.value}",
        f"{dimension.label} shares ({scope.label})",
        columns,
        [{"category": r.category, "total_ffe": r.mass, "share": r.share} for r in rows],
    )


def route_table(dist: WeightedDistribution, taxonomy: RouteTaxonomy) -> ReportTable:
    """Route classification with observed FFE: taxonomy codes first, then unlisted observed codes"""
    masses = dist.entries
    total = dist.total
    codes = list(taxonomy.entries) + sorted(c for c in masses if c not in taxonomy)
    rows = []
    for code in codes:
        route = classify_route(code, taxonomy)
        mass = masses.get(code, 0.0)
        rows.append({"route": code, "description": route.description, "classified": route.classified,
                     "total_ffe": mass, "share": mass / total})
    columns = [Column("route", "Route", numeric=False), Column("description", "Service description", numeric=False),
               Column("classified", "Classified", numeric=False), Column("total_ffe", "Total FFE"),
               Column("share", "Share")]
    return ReportTable("classification", "Maritime service routes", columns, rows)


def _rank_cells(prefix: str, rc: RankCorrelation) -> Dict[str, Any]:
    return {prefix: rc.statistic, f"{prefix}_p": rc.pvalue, f"{prefix}_method": rc.method}


def asymmetry_table(reports: Sequence[AsymmetryReport]) -> ReportTable:
    columns = [Column("dimension", "Dimension", numeric=False), Column("union_n", "n"),
               Column("jsd", "JSD (base 2)" if all(r.log_base == 2 for r in reports) else "JSD"),
               Column("spearman_rho", "Spearman rho"), Column("spearman_rho_p", "p"),
               Column("spearman_rho_method", "p method", numeric=False),
               Column("kendall_tau", "Kendall tau"), Column("kendall_tau_p", "p"),
               Column("kendall_tau_method", "p method", numeric=False)]
    rows = []
    for r in reports:
        row = {"dimension": r.dimension.label, "union_n": r.union_n, "jsd": r.jsd}
        row.update(_rank_cells("spearman_rho", r.spearman))
        row.update(_rank_cells("kendall_tau", r.kendall))
        rows.append(row)
    return ReportTable("imports_vs_exports", "Directional asymmetry (imports vs exports)", columns, rows)


def orientation_table(table: OrientationTable) -> ReportTable:
    """Industries by descending orientation index"""
    ordered = sorted(table.rows.values(), key=lambda r: (-r.index, r.industry))
    columns = [Column("industry", "Industry", numeric=False), Column("import_share", "Import share"),
               Column("export_share", "Export share"), Column("orientation", "R")]
    rows = [{"industry": r.industry, "import_share": r.import_share, "export_share": r.export_share,
             "orientation": r.index} for r in ordered]
    return ReportTable("industry", f"Industry orientation (epsilon={table.epsilon:g})", columns, rows)


def drift_tables(report: DriftReport) -> List[ReportTable]:
    name = f"{report.dimension.value}_{report.scope.value}"
    label = f"{report.dimension.label} ({report.scope.label})"
    series = ReportTable(
        name,
        f"{label} drift vs {report.base_year} (JSD base {report.log_base:g})",
        [Column("year", "Year"), Column("n", f"n {report.dimension.plural}"), Column("total_ffe", "Total FFE"),
         Column("hhi", "HHI"), Column("jsd_vs_base", "JSD vs base")],
        [{"year": r.year, "n": r.n, "total_ffe": r.total_ffe, "hhi": r.hhi, "jsd_vs_base": r.jsd_vs_base}
         for r in report.rows],
    )
    persistence = ReportTable(
        f"{name}_persistence",
        f"{label} adjacent-year rank persistence",
        [Column("years", "Years", numeric=False), Column("spearman_rho", "Spearman rho"),
         Column("spearman_rho_p", "p"), Column("spearman_rho_method", "p method", numeric=False)],
        [{"years": f"{a.year_from}-{a.year_to}", **_rank_cells("spearman_rho", a.spearman)} for a in report.adjacent],
    )
    return [series, persistence] if report.adjacent else [series]


def profile_tables(summary: FfeSummary, annual: AnnualTotals, counts: Dict[Any, int],
                   histogram: HistogramSpec) -> List[ReportTable]:
    ffe = ReportTable(
        "ffe_summary", "Shipment-level FFE distribution",
        [Column("count", "Count"), Column("mean", "Mean"), Column("std", "Std"), Column("min", "Min"),
         Column("median", "Median"), Column("p75", "75th pct"), Column("max", "Max")],
        [{"count": summary.count, "mean": summary.mean, "std": summary.std, "min": summary.min,
          "median": summary.median, "p75": summary.p75, "max": summary.max}],
    )
    annual_table = ReportTable(
        "annual_totals", "Annual total FFE by direction",
        [Column("year", "Year"), Column("direction", "Direction", numeric=False), Column("total_ffe", "Total FFE")],
        [{"year": r.year, "direction": r.direction.value, "total_ffe": r.total_ffe} for r in annual.rows],
    )
    count_table = ReportTable(
        "direction_counts", "Shipment records by direction",
        [Column("direction", "Direction", numeric=False), Column("records", "Records")],
        [{"direction": d.value, "records": n} for d, n in counts.items()],
    )
    histogram_table = ReportTable(
        "histogram", "FFE histogram (log10 bins)",
        [Column("bin_lo", "bin_lo"), Column("bin_hi", "bin_hi"), Column("count", "count")],
        [{"bin_lo": lo, "bin_hi": hi, "count": n} for lo, hi, n in histogram.bins],
    )
    return [ffe, annual_table, count_table, histogram_table]
