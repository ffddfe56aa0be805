"""Command-line interface.

    elens validate case.elens          parse + lint with positioned diagnostics
    elens fmt case.elens               canonical formatting
    elens trace case.elens R101.1      walk the chain back to losses (or forward)
    elens matrix case.elens            requirement traceability matrix (CSV/JSON)
    elens report case.elens -o out/    report.json + report.md + matrix.csv + figures
    elens metric faithfulness in.csv   run one assessor metric standalone
    elens serve --data-dir data/       run the HTTP service
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import __version__
from .assessors import evaluate_metric
from .dsl import Severity, lint, parse_case, serialize_case, try_parse
from .errors import IncompleteCaseError
from .figures import render_coverage_heatmap, render_goal_chart
from .model import AssuranceCase
from .reports import build_report, report_json_bytes, report_markdown
from .stpa import build_trace_matrix
from .store import CaseStore
from .vocab import DEFAULT_PRINCIPLES, METRIC_NAMES


def _load_case(source: str, data_dir: str | None) -> AssuranceCase:
    if data_dir is not None:
        case, _ = CaseStore(data_dir).load(source)
        return case
    return parse_case(Path(source).read_text(encoding="utf-8"))


@click.group()
@click.version_option(__version__)
def main():
    """Assurance-case toolkit for AI ethics."""


@main.command()
@click.argument("case_id")
@click.option("--title", default="", help="case title")
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None)
def new(case_id, title, output):
    """Scaffold a case with the four default principles."""
    from .model import AssuranceCase

    case = AssuranceCase(case_id, title or f"AI ethics assurance case: {case_id}")
    for principle in DEFAULT_PRINCIPLES:
        case.add_principle(principle, principle.capitalize())
        case.add_segment(principle, "general", "General")
    text = serialize_case(case)
    if output:
        Path(output).write_text(text, encoding="utf-8")
        click.echo(f"wrote {output}")
    else:
        click.echo(text, nl=False)


@main.command()
@click.argument("source", type=click.Path(exists=True, dir_okay=False))
def validate(source):
    """Parse a case file and lint it; exit 1 on any error diagnostic."""
    text = Path(source).read_text(encoding="utf-8")
    case, diagnostics = try_parse(text)
    if case is not None:
        diagnostics = diagnostics + lint(case)
    failed = False
    for diagnostic in diagnostics:
        click.echo(f"{source}:{diagnostic.render()}")
        failed = failed or diagnostic.severity is Severity.ERROR
    if failed:
        sys.exit(1)
    click.echo(f"{source}: ok ({len(case.elements)} elements, {len(case.links)} links)")


@main.command()
@click.argument("source", type=click.Path(exists=True, dir_okay=False))
@click.option("-w", "--write", is_flag=True, help="rewrite the file in place")
def fmt(source, write):
    """Print (or rewrite) the canonical form of a case file.

    Canonical form does not preserve comments.
    """
    case = parse_case(Path(source).read_text(encoding="utf-8"))
    canonical = serialize_case(case)
    if write:
        Path(source).write_text(canonical, encoding="utf-8")
        click.echo(f"formatted {source}")
    else:
        click.echo(canonical, nl=False)


@main.command()
@click.argument("source")
@click.argument("element")
@click.option("--direction", type=click.Choice(["back", "forward"]), default="back")
@click.option("--data-dir", default=None, help="load SOURCE as a stored case id")
def trace(source, element, direction, data_dir):
    """Trace an element upstream (back) or downstream (forward)."""
    case = _load_case(source, data_dir)
    hops = case.trace_backward(element) if direction == "back" else case.trace_forward(element)
    if not hops:
        click.echo(f"{element}: no {direction} trace (boundary element)")
        return
    chain = " -> ".join("{" + ", ".join(hop) + "}" for hop in hops)
    click.echo(f"{element} -> {chain}")


@main.command()
@click.argument("source")
@click.option("--format", "fmt_", type=click.Choice(["csv", "json"]), default="csv")
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None)
@click.option("--data-dir", default=None, help="load SOURCE as a stored case id")
def matrix(source, fmt_, output, data_dir):
    """Emit the requirement traceability matrix."""
    case = _load_case(source, data_dir)
    try:
        table = build_trace_matrix(case)
    except IncompleteCaseError as exc:
        for violation in exc.violations:
            click.echo(f"rule ({violation.rule_id}): {violation.message}", err=True)
        raise SystemExit(1)
    rendered = (
        table.to_csv() if fmt_ == "csv" else json.dumps(table.to_json_obj(), indent=2) + "\n"
    )
    if output:
        Path(output).write_text(rendered, encoding="utf-8")
        click.echo(f"wrote {output}")
    else:
        click.echo(rendered, nl=False)


@main.command()
@click.argument("source")
@click.option("--kind", type=click.Choice(["summary", "full"]), default="full")
@click.option("-o", "--out-dir", type=click.Path(file_okay=False), default="report-out")
@click.option("--data-dir", default=None, help="load SOURCE as a stored case id")
@click.option("--threshold", type=int, default=100)
def report(source, kind, out_dir, data_dir, threshold):
    """Write the report (JSON + Markdown), the trace matrix CSV, and the
    coverage / goal-satisfaction figures into a directory."""
    case = _load_case(source, data_dir)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    document = build_report(case, kind, threshold)
    (out / "report.json").write_bytes(report_json_bytes(document))
    (out / "report.md").write_text(report_markdown(document), encoding="utf-8")
    written = ["report.json", "report.md"]

    try:
        (out / "matrix.csv").write_text(build_trace_matrix(case).to_csv(), encoding="utf-8")
        written.append("matrix.csv")
    except IncompleteCaseError as exc:
        click.echo(f"matrix skipped: {len(exc.violations)} completeness violation(s)", err=True)

    render_coverage_heatmap(case, out / "coverage.png")
    render_goal_chart(case, out / "goals.png", threshold)
    written += ["coverage.png", "goals.png"]
    for name in written:
        click.echo(f"wrote {out / name}")


@main.command()
@click.argument("source")
@click.option("--data-dir", default=None, help="load SOURCE as a stored case id")
@click.option("--propagated/--raw", default=False, help="label nodes with propagated values")
def dot(source, data_dir, propagated):
    """Emit the goal graph as DOT text for external rendering."""
    case = _load_case(source, data_dir)
    values = None
    if propagated:
        from .goals import bound_leaf_overrides

        values = case.goal_graph.propagate(overrides=bound_leaf_overrides(case))
    click.echo(case.goal_graph.to_dot(values), nl=False)


@main.command()
@click.argument("name", type=click.Choice(list(METRIC_NAMES)))
@click.argument("input_file", type=click.Path(exists=True, dir_okay=False))
def metric(name, input_file):
    """Evaluate one assessor metric over an input CSV."""
    result = evaluate_metric(name, Path(input_file).read_bytes())
    if result.error is not None:
        click.echo(f"{name}: failed ({result.error}), sha256 {result.inputs_digest}")
        sys.exit(2)
    click.echo(f"{name}: {result.value:.9f}  sha256 {result.inputs_digest}")


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--host", default=None)
@click.option("--port", type=int, default=None)
@click.option("--data-dir", default=None)
@click.option("--token-file", default=None)
def serve(config_path, host, port, data_dir, token_file):
    """Run the HTTP service."""
    from .config import load_config
    from .server import run

    config = load_config(config_path)
    if host:
        config.host = host
    if port:
        config.port = port
    if data_dir:
        config.data_dir = Path(data_dir)
    if token_file:
        config.token_file = Path(token_file)
    run(config)


if __name__ == "__main__":
    main()
