"""Report generation for verification results: JSON documents and text summaries."""

import json
import logging
from dataclasses import asdict
from pathlib import Path
from typing import Any

from rich.table import Table

from cscc.schemas import check_document
from cscc.verify import CrosscheckResult, VerificationReport

logger = logging.getLogger(__name__)

SCHEMA = "csreport/1"


def report_to_dict(report: VerificationReport) -> dict[str, Any]:
    """Convert a verification report to its JSON form.

    Args:
        report: Report produced by cscc.verify

    Returns:
        Dictionary tagged with the report schema
    """
    data = asdict(report)
    return {"schema": SCHEMA, "passed": report.passed, **data}


def crosscheck_to_dict(result: CrosscheckResult) -> dict[str, Any]:
    return {
        "schema": SCHEMA,
        "seed": result.seed,
        "trials": len(result.trials),
        "agreed": result.agreed,
        "passed": result.passed,
        "mismatches": [asdict(t) for t in result.trials if not t.agree],
        "verdicts": [
            {
                "trial": t.trial,
                "n": t.n,
                "k": t.k,
                "preserved": t.engine_preserved,
                "agree": t.agree,
            }
            for t in result.trials
        ],
    }


def to_json(data: dict[str, Any]) -> str:
    """Byte-stable JSON text."""
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def report_to_json(report: VerificationReport) -> str:
    """Report JSON, checked against the csreport/1 schema."""
    return to_json(check_document(report_to_dict(report), "report"))


def render_text_summary(report: VerificationReport) -> str:
    """Render a plain-text summary of a report.

    Args:
        report: Report to summarize

    Returns:
        Multi-line summary ending with the overall verdict
    """
    lines = [f"# {report.subject}", "", f"Convention: {report.convention}"]
    if report.code:
        stats = ", ".join(f"{k}={v}" for k, v in report.code.items())
        lines.append(f"Code: {stats}")
    if report.bipartition:
        lines.append(
            f"Bipartition: {report.bipartition['even']} even, {report.bipartition['odd']} odd"
        )
    if report.classification:
        lines.append(f"Logical gate: {report.classification['text']}")
    for name in ("theta_exp", "phi_exp", "eta_exp"):
        value = getattr(report, name)
        if value is not None:
            lines.append(f"{name}: {value}")
    lines.append("")
    for check in report.checks:
        mark = "PASS" if check.passed else "FAIL"
        detail = f" ({check.detail})" if check.detail else ""
        info = "" if check.required else " [informational]"
        lines.append(f"[{mark}] {check.name}{detail}{info}")
    lines.extend(["", f"Overall: {'PASS' if report.passed else 'FAIL'}"])
    return "\n".join(lines) + "\n"


def summary_table(report: VerificationReport) -> Table:
    """Acceptance checks of a report as a rich table."""
    table = Table(title=f"Verification: {report.subject}")
    table.add_column("Check", style="cyan")
    table.add_column("Result")
    table.add_column("Detail", style="dim")
    for check in report.checks:
        result = "[green]pass[/green]" if check.passed else "[bold red]FAIL[/bold red]"
        name = check.name if check.required else f"{check.name} [dim](info)[/dim]"
        table.add_row(name, result, check.detail)
    return table


def write_report(report: VerificationReport, output_path: Path, format: str = "json") -> None:
    """Write a report to a file.

    Args:
        report: Report to write
        output_path: Destination file
        format: 'json' or 'text'

    Raises:
        ValueError: If format is invalid
    """
    if format not in {"json", "text"}:
        raise ValueError(f"Invalid format: {format}")

    text = report_to_json(report) if format == "json" else render_text_summary(report)
    with open(output_path, "w") as f:
        f.write(text)

    logger.info(f"Report written to: {output_path}")
