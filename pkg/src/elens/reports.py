"""Assurance report generation.

Two kinds: the full report documents every question, answer, comment
history, metric results and the trace matrix; the summary report gives a
per-principle status table, the mitigation verdict, and coverage gaps.
Both renderings (canonical JSON bytes, Markdown) are deterministic for a
given case state.
"""

from __future__ import annotations

import json
from typing import TYPE_CHECKING

from .checklist import Choice, MetricResult, Text, coverage_report
from .dsl import Severity, lint
from .errors import ElensError, IncompleteCaseError
from .goals import case_verdict, gate_segments
from .stpa import build_trace_matrix
from .workflow import derive_status

if TYPE_CHECKING:
    from .model import AssuranceCase

FULL = "full"
SUMMARY = "summary"


def _verdict_section(case: "AssuranceCase", threshold: int) -> dict:
    try:
        verdict = case_verdict(case, threshold)
    except ElensError as exc:
        return {"available": False, "error": exc.code, "message": exc.message}
    return {
        "available": True,
        "mitigated": verdict.mitigated,
        "root_satisfaction": verdict.root_satisfaction,
        "unresolved": list(verdict.unresolved),
        "threshold": threshold,
    }


def _principle_rows(case: "AssuranceCase", threshold: int) -> list[dict]:
    rows = []
    for pid, principle in case.principles.items():
        try:
            gates = gate_segments(case, pid, threshold)
        except ElensError:
            gates = []
        evaluated = {segment: ok for segment, ok in gates}
        assured = len(gates) == len(principle.segments) and all(evaluated.values())
        rows.append(
            {
                "principle": pid,
                "title": principle.title,
                "segments": [
                    {"segment": sid, "status": _segment_status(evaluated, sid)}
                    for sid in principle.segments
                ],
                "status": "assured" if assured else "not assured",
            }
        )
    return rows


def _segment_status(evaluated: dict[str, bool], segment: str) -> str:
    if segment not in evaluated:
        return "not evaluated"
    return "assured" if evaluated[segment] else "failed"


def _content_doc(content) -> dict:
    if isinstance(content, Choice):
        return {"type": "choice", "index": content.index}
    if isinstance(content, Text):
        return {"type": "text", "body": content.body}
    if isinstance(content, MetricResult):
        return {
            "type": "metric",
            "metric": content.metric,
            "value": content.value,
            "inputs_digest": content.inputs_digest,
            "error": content.error,
        }
    return {"type": "unknown"}


def build_report(case: "AssuranceCase", kind: str = SUMMARY, threshold: int = 100) -> dict:
    if kind not in (FULL, SUMMARY):
        raise ElensError(f"unknown report kind {kind!r}")
    coverage = coverage_report(case)
    report: dict = {
        "kind": kind,
        "case": case.id,
        "title": case.title,
        "status": derive_status(case).value,
        "principles": _principle_rows(case, threshold),
        "verdict": _verdict_section(case, threshold),
        "coverage_gaps": [
            {"principle": p, "stage": s} for p, s in sorted(coverage.gaps)
        ],
    }
    if kind == SUMMARY:
        return report

    questions = []
    for question in sorted(case.checklist.questions.values(), key=lambda q: q.id):
        answer = case.answers.get(question.id)
        entry: dict = {
            "id": question.id,
            "principle": question.principle,
            "segment": question.segment,
            "stage": question.stage,
            "desideratum": question.desideratum,
            "type": question.qtype.kind,
            "text": question.text,
            "requirements": sorted(question.requirement_links),
            "retired": question.retired,
            "answer": None,
        }
        if answer is not None:
            entry["answer"] = {
                "status": answer.status.value,
                "version": answer.version,
                "content": _content_doc(answer.content),
                "comments": [
                    {
                        "author_role": c.author_role.value,
                        "verdict": c.verdict.value,
                        "text": c.text,
                        "timestamp": c.timestamp,
                        "answer_version": c.answer_version,
                    }
                    for c in answer.comments
                ],
            }
        questions.append(entry)
    report["questions"] = questions

    try:
        report["trace_matrix"] = build_trace_matrix(case).to_json_obj()
        report["completeness_violations"] = []
    except IncompleteCaseError as exc:
        report["trace_matrix"] = None
        report["completeness_violations"] = [
            {"element": v.element_id, "rule": v.rule_id, "message": v.message}
            for v in exc.violations
        ]
    report["notes"] = [
        {"severity": d.severity.value, "message": d.message, "code": d.code}
        for d in lint(case)
        if d.severity is Severity.WARNING
    ]
    return report


def report_json_bytes(report: dict) -> bytes:
    """Canonical JSON rendering; byte-identical for equal reports."""
    return (json.dumps(report, sort_keys=True, separators=(",", ":"), ensure_ascii=False) + "\n").encode(
        "utf-8"
    )


def report_markdown(report: dict) -> str:
    """Markdown rendering of a report document."""
    lines = [
        f"# Assurance report: {report['case']}",
        "",
        f"*{report['title']}*" if report["title"] else "",
        "",
        f"- Kind: {report['kind']}",
        f"- Case status: {report['status']}",
    ]
    verdict = report["verdict"]
    if verdict.get("available"):
        state = "all hazards mitigated" if verdict["mitigated"] else "unresolved hazards remain"
        lines.append(
            f"- Verdict: **{state}** (root satisfaction {verdict['root_satisfaction']}, "
            f"threshold {verdict['threshold']})"
        )
        if verdict["unresolved"]:
            lines.append(f"- Unresolved mitigation nodes: {', '.join(verdict['unresolved'])}")
    else:
        lines.append(f"- Verdict: unavailable ({verdict.get('error')})")
    lines += ["", "## Principles", "", "| Principle | Status | Segments |", "| --- | --- | --- |"]
    for row in report["principles"]:
        segments = ", ".join(f"{s['segment']}: {s['status']}" for s in row["segments"])
        lines.append(f"| {row['principle']} | {row['status']} | {segments} |")
    if report["coverage_gaps"]:
        lines += ["", "## Coverage gaps", ""]
        for gap in report["coverage_gaps"]:
            lines.append(f"- {gap['principle']} has no question at stage {gap['stage']}")
    else:
        lines += ["", "No lifecycle coverage gaps.", ""]

    if report["kind"] == FULL:
        lines += ["", "## Questions and answers", ""]
        for q in report["questions"]:
            lines.append(f"### {q['id']} ({q['principle']}/{q['segment']}, {q['stage']})")
            lines.append("")
            lines.append(q["text"])
            answer = q["answer"]
            if answer is None:
                lines.append("")
                lines.append("*Unanswered.*")
            else:
                lines.append("")
                lines.append(f"- Status: {answer['status']} (version {answer['version']})")
                content = answer["content"]
                if content["type"] == "text":
                    lines.append(f"- Answer: {content['body']}")
                elif content["type"] == "choice":
                    lines.append(f"- Answer: option {content['index']}")
                else:
                    value = content["value"]
                    shown = "failed: " + str(content["error"]) if value is None else f"{value:.6f}"
                    lines.append(
                        f"- Metric {content['metric']}: {shown} (input sha256 {content['inputs_digest'][:12]}...)"
                    )
                for comment in answer["comments"]:
                    lines.append(
                        f"  - [{comment['author_role']}] {comment['verdict']} "
                        f"(v{comment['answer_version']}, {comment['timestamp']}): {comment['text']}"
                    )
            lines.append("")
        if report.get("trace_matrix") is not None:
            lines += [
                "## Trace matrix",
                "",
                "| Requirement | Recommendation | Constraint | Hazard/Action | Losses |",
                "| --- | --- | --- | --- | --- |",
            ]
            for row in report["trace_matrix"]:
                lines.append(
                    f"| {row['requirement']} | {row['recommendation']} | {row['constraint']} "
                    f"| {row['uaia_or_hazard']} | {'; '.join(row['losses'])} |"
                )
        else:
            lines += ["## Trace matrix", "", "Unavailable: the case is incomplete."]
            for violation in report["completeness_violations"]:
                lines.append(f"- rule ({violation['rule']}): {violation['message']}")
        if report.get("notes"):
            lines += ["", "## Notes", ""]
            for note in report["notes"]:
                lines.append(f"- {note['message']} [{note['code']}]")
    return "\n".join(line for line in lines if line is not None) + "\n"
