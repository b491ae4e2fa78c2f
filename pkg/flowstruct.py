#!/usr/bin/env python3
"""
flowstruct command line

Structural analytics of containerized trade flows: ingest shipment CSV
files, then report concentration, directional asymmetry, drift and a
descriptive profile. Reports go to stdout unless --output is given; logs go
to stderr and the rotating log file.

Exit codes: 0 success, 1 usage or configuration error, 2 data error.
"""

import os
import sys
from enum import Enum
from pathlib import Path
from typing import Annotated, List, Optional, Sequence, Tuple

# Add project root to Python path
project_root = os.path.dirname(os.path.abspath(__file__))
sys.path.insert(0, project_root)

import click  # noqa: E402
import typer  # noqa: E402

from core.analysis_runner import AnalysisRunner, InputFiles, run_synth  # noqa: E402
from core.config import LOG_DIR, LOG_LEVEL, AnalysisConfig, load_column_mapping, load_config  # noqa: E402
from core.errors import EXIT_DATA, EXIT_OK, EXIT_USAGE, ConfigError, FlowStructError  # noqa: E402
from core.records import DimensionKey, Scope  # noqa: E402
from generators.report_generator import ReportBundle, emit_plot_data, render  # noqa: E402
from utils.file_utils import atomic_write_bytes  # noqa: E402
from utils.logging_config import get_logger, setup_logging  # noqa: E402

logger = get_logger("flowstruct")

app = typer.Typer(
    help="Concentration, asymmetry and drift analytics for containerized shipment records.",
    no_args_is_help=True,
    add_completion=False,
)


class ReportFormat(str, Enum):
    json = "json"
    csv = "csv"
    markdown = "markdown"


class SynthMode(str, Enum):
    exact = "exact"
    sampled = "sampled"


# --- Shared options ---

FilesArg = Annotated[Optional[List[Path]], typer.Argument(
    help="Canonical-layout shipment CSV files.", show_default=False)]
ImportOpt = Annotated[Optional[List[Path]], typer.Option(
    "--import-file", "-I", help="Raw import-layout CSV (port of loading / port of discharge).")]
ExportOpt = Annotated[Optional[List[Path]], typer.Option(
    "--export-file", "-E", help="Raw export-layout CSV (export loading port / place of delivery).")]
ConfigOpt = Annotated[Optional[Path], typer.Option(
    "--config", help="JSON configuration file (default: $FLOWSTRUCT_CONFIG).")]
MappingOpt = Annotated[Optional[Path], typer.Option("--mapping", help="JSON column-mapping file.")]
TaxonomyOpt = Annotated[Optional[Path], typer.Option("--taxonomy", help="Route taxonomy CSV (code,description).")]
FormatOpt = Annotated[Optional[ReportFormat], typer.Option("--format", help="Report format.", case_sensitive=False)]
OutputOpt = Annotated[Optional[Path], typer.Option("--output", "-o", help="Write the report here instead of stdout.")]
YearMinOpt = Annotated[Optional[int], typer.Option("--year-min", help="First year kept.")]
YearMaxOpt = Annotated[Optional[int], typer.Option("--year-max", help="Last year kept.")]
DelimiterOpt = Annotated[Optional[str], typer.Option("--delimiter", help="CSV field delimiter.")]
VerboseOpt = Annotated[bool, typer.Option("--verbose", "-v", help="Debug logging.")]
DimensionsOpt = Annotated[Optional[List[DimensionKey]], typer.Option(
    "--dimension", "-d", help="Dimension to compare (repeatable; default route, origin, destination, industry).",
    case_sensitive=False)]


def _init_logging(verbose: bool):
    setup_logging("DEBUG" if verbose else LOG_LEVEL, LOG_DIR)


def _fail(error: FlowStructError) -> typer.Exit:
    logger.error(str(error))
    typer.secho(f"Error: {error}", fg=typer.colors.RED, err=True)
    return typer.Exit(code=error.exit_code)


def _prepare(files, import_file, export_file, config, mapping, taxonomy, fmt,
             year_min, year_max, delimiter, **overrides) -> Tuple[AnalysisRunner, InputFiles]:
    inputs = InputFiles(list(files or []), list(import_file or []), list(export_file or []))
    if not (inputs.canonical or inputs.imports or inputs.exports):
        raise ConfigError("No input files given (positional files, --import-file or --export-file)")
    effective = load_config(
        config,
        column_mapping=load_column_mapping(mapping) if mapping else None,
        taxonomy_path=str(taxonomy) if taxonomy else None,
        output_format=fmt.value if fmt else None,
        year_min=year_min,
        year_max=year_max,
        delimiter=delimiter,
        **overrides,
    )
    return AnalysisRunner(effective), inputs


def _emit(bundle: ReportBundle, config: AnalysisConfig, output: Optional[Path]):
    payload = render(bundle, config.output_format)
    if output is not None:
        atomic_write_bytes(output, payload)
    else:
        typer.echo(payload.decode("utf-8"), nl=False)


def _unique(values: Optional[Sequence]) -> List:
    return list(dict.fromkeys(values or []))


# --- Subcommands ---

@app.command()
def validate(
    files: FilesArg = None, import_file: ImportOpt = None, export_file: ExportOpt = None,
    config: ConfigOpt = None, mapping: MappingOpt = None, taxonomy: TaxonomyOpt = None,
    fmt: FormatOpt = None, output: OutputOpt = None, year_min: YearMinOpt = None,
    year_max: YearMaxOpt = None, delimiter: DelimiterOpt = None, verbose: VerboseOpt = False,
):
    """Ingest the inputs and report acceptance and rejection tallies."""
    _init_logging(verbose)
    try:
        runner, inputs = _prepare(files, import_file, export_file, config, mapping, taxonomy, fmt,
                                  year_min, year_max, delimiter)
        bundle, accepted = runner.run_validate(inputs)
        _emit(bundle, runner.config, output)
    except FlowStructError as e:
        raise _fail(e)
    if not accepted:
        raise typer.Exit(code=EXIT_DATA)


@app.command()
def analyze(
    files: FilesArg = None, import_file: ImportOpt = None, export_file: ExportOpt = None,
    dimension: Annotated[DimensionKey, typer.Option(
        "--dimension", "-d", help="Dimension to aggregate over.", case_sensitive=False)] = DimensionKey.ROUTE,
    scope: Annotated[Optional[List[Scope]], typer.Option(
        "--scope", "-s", help="Scope (repeatable; default all, import and export).", case_sensitive=False)] = None,
    top: Annotated[Optional[int], typer.Option("--top", "-n", min=1, help="Rows in the top-share tables.")] = None,
    year: Annotated[Optional[List[int]], typer.Option(
        "--year", "-y", help="Only records of this year (repeatable; default every ingested year).")] = None,
    config: ConfigOpt = None, mapping: MappingOpt = None, taxonomy: TaxonomyOpt = None,
    fmt: FormatOpt = None, output: OutputOpt = None, year_min: YearMinOpt = None,
    year_max: YearMaxOpt = None, delimiter: DelimiterOpt = None, verbose: VerboseOpt = False,
):
    """Concentration metrics (HHI, CR_k, entropy, Gini) and top-N shares per scope."""
    _init_logging(verbose)
    try:
        runner, inputs = _prepare(files, import_file, export_file, config, mapping, taxonomy, fmt,
                                  year_min, year_max, delimiter, top_n=top)
        scopes = _unique(scope) or list(Scope)
        bundle = runner.run_analyze(inputs, dimension, scopes, explicit_scopes=bool(scope), top_n=top,
                                    years=year)
        _emit(bundle, runner.config, output)
    except FlowStructError as e:
        raise _fail(e)


@app.command()
def asymmetry(
    files: FilesArg = None, import_file: ImportOpt = None, export_file: ExportOpt = None,
    dimension: DimensionsOpt = None,
    config: ConfigOpt = None, mapping: MappingOpt = None, taxonomy: TaxonomyOpt = None,
    fmt: FormatOpt = None, output: OutputOpt = None, year_min: YearMinOpt = None,
    year_max: YearMaxOpt = None, delimiter: DelimiterOpt = None, verbose: VerboseOpt = False,
):
    """Imports vs exports: JSD, Spearman and Kendall per dimension, industry orientation."""
    _init_logging(verbose)
    try:
        runner, inputs = _prepare(files, import_file, export_file, config, mapping, taxonomy, fmt,
                                  year_min, year_max, delimiter)
        dimensions = _unique(dimension)
        bundle = runner.run_asymmetry(inputs, dimensions) if dimensions else runner.run_asymmetry(inputs)
        _emit(bundle, runner.config, output)
    except FlowStructError as e:
        raise _fail(e)


@app.command()
def drift(
    files: FilesArg = None, import_file: ImportOpt = None, export_file: ExportOpt = None,
    dimension: DimensionsOpt = None,
    base_year: Annotated[Optional[int], typer.Option("--base-year", help="Base year (default: earliest).")] = None,
    scope: Annotated[Optional[List[Scope]], typer.Option(
        "--scope", "-s", help="Scope (repeatable; default all).", case_sensitive=False)] = None,
    config: ConfigOpt = None, mapping: MappingOpt = None, taxonomy: TaxonomyOpt = None,
    fmt: FormatOpt = None, output: OutputOpt = None, year_min: YearMinOpt = None,
    year_max: YearMaxOpt = None, delimiter: DelimiterOpt = None, verbose: VerboseOpt = False,
):
    """Year-by-year JSD against a base year, yearly HHI and adjacent-year rank persistence."""
    _init_logging(verbose)
    try:
        runner, inputs = _prepare(files, import_file, export_file, config, mapping, taxonomy, fmt,
                                  year_min, year_max, delimiter, base_year=base_year)
        dimensions = _unique(dimension)
        scopes = _unique(scope) or [Scope.ALL]
        kwargs = {"dimensions": dimensions} if dimensions else {}
        bundle = runner.run_drift(inputs, scopes=scopes, explicit_scopes=bool(scope), **kwargs)
        _emit(bundle, runner.config, output)
    except FlowStructError as e:
        raise _fail(e)


@app.command()
def profile(
    files: FilesArg = None, import_file: ImportOpt = None, export_file: ExportOpt = None,
    bins: Annotated[Optional[int], typer.Option("--bins", min=1, help="Histogram bins in log10(FFE).")] = None,
    plot_dir: Annotated[Optional[Path], typer.Option(
        "--plot-dir", help="Also write ffe_histogram.csv and annual_ffe.csv here.")] = None,
    config: ConfigOpt = None, mapping: MappingOpt = None, taxonomy: TaxonomyOpt = None,
    fmt: FormatOpt = None, output: OutputOpt = None, year_min: YearMinOpt = None,
    year_max: YearMaxOpt = None, delimiter: DelimiterOpt = None, verbose: VerboseOpt = False,
):
    """Shipment-size summary, annual totals by direction and log-scale histogram data."""
    _init_logging(verbose)
    try:
        runner, inputs = _prepare(files, import_file, export_file, config, mapping, taxonomy, fmt,
                                  year_min, year_max, delimiter, histogram_bins=bins)
        bundle = runner.run_profile(inputs, bins)
        _emit(bundle, runner.config, output)
        if plot_dir is not None:
            emit_plot_data(bundle, plot_dir)
    except FlowStructError as e:
        raise _fail(e)


@app.command()
def synth(
    target: Annotated[Path, typer.Argument(help="Synthetic target JSON file.")],
    seed: Annotated[Optional[int], typer.Option("--seed", help="Override the target's seed.")] = None,
    mode: Annotated[SynthMode, typer.Option("--mode", help="exact or sampled.", case_sensitive=False)] = SynthMode.exact,
    output: OutputOpt = None,
    verbose: VerboseOpt = False,
):
    """Generate canonical-layout shipment CSV from a synthetic target."""
    _init_logging(verbose)
    try:
        records, text = run_synth(target, mode.value, seed, output)
    except FlowStructError as e:
        raise _fail(e)
    if output is None:
        typer.echo(text, nl=False)
    logger.info(f"Synthesized {len(records)} records ({mode.value} mode)")


def main(argv: Optional[List[str]] = None) -> int:
    """Run the CLI and return its exit code; usage errors map to 1"""
    try:
        result = app(args=argv, prog_name="flowstruct", standalone_mode=False)
    except click.exceptions.UsageError as e:
        e.show()
        return EXIT_USAGE
    except click.exceptions.Abort:
        typer.echo("Aborted.", err=True)
        return EXIT_USAGE
    except click.exceptions.Exit as e:
        return e.exit_code
    return result if isinstance(result, int) else EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
