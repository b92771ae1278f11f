"""CLI entry point for cscc."""

import logging
import sys
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path
from typing import Any, NoReturn, TextIO

import click
from dotenv import load_dotenv
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from cscc.complex_builder import (
    ColoredComplex,
    build_cube,
    build_tetrahedral15,
    build_truncated_cube,
    complex_from_json,
    complex_to_dict,
    validate,
)
from cscc.css_code import (
    assemble,
    code_to_dict,
    logical_basis,
    match_geometric_basis,
    project_z,
)
from cscc.report import (
    crosscheck_to_dict,
    render_text_summary,
    report_to_json,
    summary_table,
    to_json,
    write_report,
)
from cscc.schemas import check_document
from cscc.verify import (
    FIXTURES,
    VerificationReport,
    oracle_crosscheck,
    run_fixture,
    verify_complex,
    verify_cs_protocol,
)

# Artifacts go to stdout, everything else to stderr.
console = Console()
err_console = Console(stderr=True)

logger = logging.getLogger(__name__)


def setup_logging(verbose: bool = False) -> None:
    """Configure logging with rich handler.

    Args:
        verbose: If True, set log level to DEBUG
    """
    level = logging.DEBUG if verbose else logging.INFO

    logging.basicConfig(
        level=level,
        format="%(message)s",
        handlers=[RichHandler(console=err_console, rich_tracebacks=True)],
    )


class ExtentType(click.ParamType):
    """Lattice extent written as X,Y,Z with positive integers."""

    name = "extent"

    def convert(self, value: Any, param: Any, ctx: Any) -> tuple[int, int, int]:
        if isinstance(value, tuple):
            return value
        try:
            parts = tuple(int(p) for p in str(value).split(","))
        except ValueError:
            self.fail(f"{value!r} is not of the form X,Y,Z", param, ctx)
        if len(parts) != 3 or min(parts) < 1:
            self.fail(f"{value!r} needs three positive integers", param, ctx)
        return parts  # type: ignore[return-value]


EXTENT = ExtentType()

format_option = click.option(
    "--format",
    "-f",
    "fmt",
    type=click.Choice(["json", "text"], case_sensitive=False),
    default="json",
    show_default=True,
    help="Output format",
)
output_option = click.option(
    "--output",
    "-o",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help="Output file path (default: stdout)",
)


def _fail(error: Exception) -> NoReturn:
    err_console.print(f"[bold red]Error:[/bold red] {error}")
    sys.exit(2 if isinstance(error, ValueError) else 1)


@contextmanager
def handle_errors() -> Iterator[None]:
    """Map library errors to exit codes: 2 for bad input, 1 otherwise."""
    try:
        yield
    except Exception as e:
        logger.debug("Command failed", exc_info=True)
        _fail(e)


def emit(text: str, output: Path | None) -> None:
    if output is None:
        click.echo(text, nl=False)
        return
    with open(output, "w") as f:
        f.write(text)
    err_console.print(f"Saved to: [cyan]{output}[/cyan]")


def emit_json(data: dict[str, Any], schema: str, output: Path | None) -> None:
    """Check a document against its schema, then emit it."""
    with handle_errors():
        text = to_json(check_document(data, schema))
    emit(text, output)


def _stats_table(title: str, stats: dict[str, Any]) -> Table:
    table = Table(title=title)
    table.add_column("Metric", style="cyan")
    table.add_column("Value", style="green")
    for key, value in stats.items():
        table.add_row(key, str(value))
    return table


def _emit_report(report: VerificationReport, fmt: str, output: Path | None) -> None:
    if output is not None:
        with handle_errors():
            write_report(report, output, format=fmt)
        err_console.print(f"Saved to: [cyan]{output}[/cyan]")
    elif fmt == "json":
        with handle_errors():
            text = report_to_json(report)
        emit(text, None)
    else:
        console.print(summary_table(report))
        console.print(render_text_summary(report), markup=False, highlight=False)


def _finish(passed: bool) -> None:
    if passed:
        err_console.print("\n[bold green]✓ Pass[/bold green]")
    else:
        err_console.print("\n[bold red]✗ Fail[/bold red]")
        sys.exit(1)


@click.group()
@click.option(
    "--threads",
    type=click.IntRange(min=1),
    default=1,
    show_default=True,
    envvar="CSCC_THREADS",
    help="Worker processes for the phase-polynomial engine",
)
@click.option("--verbose", "-v", is_flag=True, help="Enable verbose logging")
@click.version_option(package_name="cs-color-code")
@click.pass_context
def cli(ctx: click.Context, threads: int, verbose: bool) -> None:
    """cscc - build 3D color codes and verify the transversal control-S gate.

    Examples:

        \b
        # Serialize the truncated cube
        $ cscc build --variant truncated --extent 2,2,2 > cube.json

        \b
        # Check a complex from stdin
        $ cscc build --extent 2,2,2 | cscc validate -

        \b
        # Full control-S verification on the smallest truncated cube
        $ cscc verify --fixture truncated_cube_min --format text

        \b
        # Engine against the state-vector oracle
        $ cscc oracle-crosscheck --seed 1 --trials 100
    """
    setup_logging(verbose)
    ctx.obj = {"threads": threads}


def _build_variant(variant: str, extent: tuple[int, int, int]) -> ColoredComplex:
    if variant == "truncated":
        return build_truncated_cube(extent)
    if variant == "tetrahedral15":
        return build_tetrahedral15()
    return build_cube(extent)


@cli.command()
@click.option(
    "--variant",
    type=click.Choice(["cube", "truncated"]),
    default="cube",
    show_default=True,
    help="Lattice variant",
)
@click.option("--extent", type=EXTENT, default="2,2,2", show_default=True, help="X,Y,Z")
@format_option
@output_option
def build(variant: str, extent: tuple[int, int, int], fmt: str, output: Path | None) -> None:
    """Build a colored complex and print it."""
    err_console.print(f"[bold]Building {variant} {extent}...[/bold]")
    with handle_errors():
        complex_ = _build_variant(variant, extent)
    if fmt == "json":
        emit_json(complex_to_dict(complex_), "complex", output)
    else:
        console.print(_stats_table(f"{variant} {extent}", complex_.stats()))


@cli.command(name="validate")
@click.argument("source", type=click.File("r"), default="-")
@format_option
@output_option
def validate_cmd(source: TextIO, fmt: str, output: Path | None) -> None:
    """Validate a complex read from SOURCE (a path, or - for stdin)."""
    with handle_errors():
        complex_ = complex_from_json(source.read())
        report = validate(complex_)
    if fmt == "json":
        emit_json(report.to_dict(), "validation", output)
    else:
        table = Table(title="Validation")
        table.add_column("Check", style="cyan")
        table.add_column("Result")
        table.add_column("Witness", style="dim")
        for check in report.checks:
            result = "[green]pass[/green]" if check.passed else "[bold red]FAIL[/bold red]"
            table.add_row(check.name, result, check.witness or "")
        console.print(table)
    _finish(report.passed)


@cli.command()
@click.option(
    "--variant",
    type=click.Choice(["cube", "truncated", "tetrahedral15"]),
    default="truncated",
    show_default=True,
    help="Lattice variant",
)
@click.option("--extent", type=EXTENT, default="1,1,1", show_default=True, help="X,Y,Z")
@format_option
@output_option
def logicals(variant: str, extent: tuple[int, int, int], fmt: str, output: Path | None) -> None:
    """Print the geometrically matched logical basis of a code."""
    with handle_errors():
        complex_ = _build_variant(variant, extent)
        code = assemble(complex_)
        if complex_.truncation_region:
            code = project_z(code, complex_.truncation_region)
        basis = match_geometric_basis(complex_, code, logical_basis(code))
    data = {
        "code": code.stats(),
        "qubit_map": code_to_dict(code)["qubit_map"],
        **basis.to_dict(code.qubit_map),
    }
    if fmt == "json":
        emit_json(data, "logicals", output)
        return
    table = Table(title=f"Logical basis: {variant} {extent}")
    table.add_column("Label", style="cyan")
    table.add_column("|Xbar|")
    table.add_column("|Zbar|")
    table.add_column("Zbar support", style="dim")
    for pair in data["pairs"]:
        table.add_row(pair["label"], str(len(pair["x"])), str(len(pair["z"])), str(pair["z"]))
    console.print(_stats_table("Code", code.stats()))
    console.print(table)


@cli.command()
@click.option("--fixture", type=click.Choice(list(FIXTURES)), default=None, help="Built-in fixture")
@click.option(
    "--complex",
    "complex_path",
    type=click.File("r"),
    default=None,
    help="Complex JSON to verify (- for stdin)",
)
@click.option("--seed", type=int, default=0, show_default=True, help="Seed for sampled representatives")
@format_option
@output_option
@click.pass_context
def verify(
    ctx: click.Context,
    fixture: str | None,
    complex_path: TextIO | None,
    seed: int,
    fmt: str,
    output: Path | None,
) -> None:
    """Run the verification pipeline on a fixture or a complex file."""
    if (fixture is None) == (complex_path is None):
        raise click.UsageError("Give exactly one of --fixture or --complex")
    threads = ctx.obj["threads"]
    err_console.print(f"[bold]Verifying {fixture or complex_path.name}...[/bold]")  # type: ignore[union-attr]
    with handle_errors():
        if fixture is not None:
            report = run_fixture(fixture, threads=threads, seed=seed)
        else:
            complex_ = complex_from_json(complex_path.read())  # type: ignore[union-attr]
            report = verify_complex(
                complex_, subject=complex_path.name, threads=threads, seed=seed  # type: ignore[union-attr]
            )
    _emit_report(report, fmt, output)
    _finish(report.passed)


@cli.command(name="oracle-crosscheck")
@click.option("--seed", type=int, default=1, show_default=True, help="Random seed")
@click.option("--trials", type=click.IntRange(min=1), default=100, show_default=True, help="Random codes")
@format_option
@output_option
@click.pass_context
def oracle_crosscheck_cmd(
    ctx: click.Context, seed: int, trials: int, fmt: str, output: Path | None
) -> None:
    """Compare the phase-polynomial engine with the state-vector oracle."""
    with handle_errors():
        result = oracle_crosscheck(seed, trials, threads=ctx.obj["threads"])
    data = crosscheck_to_dict(result)
    if fmt == "json":
        emit_json(data, "crosscheck", output)
    else:
        lines = [f"{result.agreed}/{len(result.trials)} agree"]
        for mismatch in data["mismatches"]:
            lines.append(
                f"trial {mismatch['trial']}: engine {mismatch['engine_action']} "
                f"oracle {mismatch['oracle_action']}"
            )
        emit("\n".join(lines) + "\n", output)
    _finish(result.passed)


@cli.command()
@click.option("--extent", type=EXTENT, default="1,1,1", show_default=True, help="X,Y,Z")
@click.option("--seed", type=int, default=0, show_default=True, help="Seed for sampled representatives")
@format_option
@output_option
@click.pass_context
def commutators(
    ctx: click.Context, extent: tuple[int, int, int], seed: int, fmt: str, output: Path | None
) -> None:
    """Print theta, phi and eta on the truncated cube with coset evidence."""
    with handle_errors():
        report = verify_cs_protocol(extent, threads=ctx.obj["threads"], seed=seed)
    data = {
        "convention": report.convention,
        "theta_exp": report.theta_exp,
        "phi_exp": report.phi_exp,
        "eta_exp": report.eta_exp,
        "theta_values": report.annotations.get("theta_values", {}),
        "membership": report.membership,
        "passed": report.passed,
    }
    if fmt == "json":
        emit_json(data, "commutators", output)
    else:
        table = _stats_table(
            f"Commutators ({report.convention})",
            {k: data[k] for k in ("theta_exp", "phi_exp", "eta_exp")},
        )
        for item in report.membership:
            table.add_row(
                item["operator"],
                f"w^{item['phase_exp']} · " + "·".join(f"Zbar_{x}" for x in item["logicals"]),
            )
        console.print(table)
    _finish(report.passed)


def main() -> None:
    """Console-script entry point."""
    load_dotenv()
    cli(prog_name="cscc")


if __name__ == "__main__":
    main()
