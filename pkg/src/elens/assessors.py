"""Algorithmic assessment metrics over supplier-provided files.

No model is ever executed here: suppliers hand in precomputed predictions
or attributions as CSV, and the metrics score them. All metrics are pure --
the same input bytes always produce bit-identical results, recorded with a
SHA-256 digest of the input.

Input formats (UTF-8 CSV):
    fairness      header ``predicted,group``, predicted in {0,1}
    faithfulness  header ``attribution,performance_drop``
    monotonicity  single column ``prediction``, values in [0,1]
"""

from __future__ import annotations

import csv
import hashlib
import io
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

from .checklist import METRIC, MetricResult, answer_question
from .errors import (
    DegenerateVarianceError,
    EmptyGroupError,
    MetricError,
    MetricInputError,
    TooShortError,
    TypeMismatchError,
    UnknownGroupError,
    UnknownQuestionError,
)
from .vocab import StakeholderRole

if TYPE_CHECKING:
    from .model import AssuranceCase


@dataclass(frozen=True)
class LabeledPredictionSet:
    """Binary predictions labeled with the protected group of each record."""

    records: tuple[tuple[bool, str], ...]  # (predicted_positive, group)

    def __post_init__(self):
        if not self.records:
            raise MetricInputError("prediction set is empty")
        if len(self.groups()) < 2:
            raise MetricInputError("prediction set needs at least 2 distinct groups")

    def groups(self) -> tuple[str, ...]:
        return tuple(sorted({group for _, group in self.records}))

    def rate(self, group: str) -> float:
        members = [positive for positive, g in self.records if g == group]
        if group not in {g for _, g in self.records}:
            raise UnknownGroupError(f"group {group!r} not present")
        if not members:
            raise EmptyGroupError(f"group {group!r} has no records")
        return sum(members) / len(members)


@dataclass(frozen=True)
class AttributionSeries:
    """(attribution, performance drop) pairs for explanation faithfulness."""

    pairs: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if len(self.pairs) < 2:
            raise MetricInputError("attribution series needs at least 2 pairs")
        for a, d in self.pairs:
            if not (math.isfinite(a) and math.isfinite(d)):
                raise MetricInputError("attribution series must be finite")


@dataclass(frozen=True)
class EvidenceSequence:
    """Predicted probabilities under cumulative addition of positive evidence."""

    predictions: tuple[float, ...]

    def __post_init__(self):
        if len(self.predictions) < 2:
            raise TooShortError("evidence sequence needs at least 2 predictions")
        for p in self.predictions:
            if not 0.0 <= p <= 1.0:
                raise MetricInputError(f"prediction {p} outside [0, 1]")


# ---------------------------------------------------------------------------
# Metrics


def demographic_parity_difference(
    data: LabeledPredictionSet, group_a: str, group_b: str
) -> float:
    """Absolute gap between the groups' positive-prediction rates."""
    return abs(data.rate(group_a) - data.rate(group_b))


def disparate_impact_ratio(
    data: LabeledPredictionSet, group_a: str, group_b: str
) -> float | None:
    """Ratio of the smaller positive rate to the larger; None (undefined,
    never NaN) when both rates are zero."""
    rate_a, rate_b = data.rate(group_a), data.rate(group_b)
    low, high = min(rate_a, rate_b), max(rate_a, rate_b)
    if high == 0.0:
        return None
    return low / high


def faithfulness_score(series: AttributionSeries) -> float:
    """Pearson correlation between attributions and the performance drops
    observed when the attributed features are removed."""
    xs = [a for a, _ in series.pairs]
    ys = [d for _, d in series.pairs]
    n = len(xs)
    mean_x = sum(xs) / n
    mean_y = sum(ys) / n
    dx = [x - mean_x for x in xs]
    dy = [y - mean_y for y in ys]
    var_x = sum(d * d for d in dx)
    var_y = sum(d * d for d in dy)
    if var_x == 0.0 or var_y == 0.0:
        raise DegenerateVarianceError(
            "faithfulness is undefined when either coordinate is constant"
        )
    return sum(a * b for a, b in zip(dx, dy)) / math.sqrt(var_x * var_y)


def monotonicity_score(seq: EvidenceSequence) -> float:
    """Fraction of consecutive steps that do not decrease the prediction."""
    steps = list(zip(seq.predictions, seq.predictions[1:]))
    return sum(1 for prev, nxt in steps if nxt >= prev) / len(steps)


# ---------------------------------------------------------------------------
# CSV input parsing


def _rows(text: str, expected_header: list[str]) -> list[list[str]]:
    reader = csv.reader(io.StringIO(text))
    rows = [row for row in reader if row and any(cell.strip() for cell in row)]
    if not rows:
        raise MetricInputError("input file is empty")
    header = [cell.strip().lower() for cell in rows[0]]
    if header != expected_header:
        raise MetricInputError(
            f"expected header {','.join(expected_header)!r}, got {','.join(header)!r}"
        )
    return rows[1:]


def parse_prediction_set(text: str) -> LabeledPredictionSet:
    records = []
    for row in _rows(text, ["predicted", "group"]):
        if len(row) != 2:
            raise MetricInputError(f"malformed fairness row {row!r}")
        predicted, group = row[0].strip(), row[1].strip()
        if predicted not in ("0", "1"):
            raise MetricInputError(f"predicted must be 0 or 1, got {predicted!r}")
        if not group:
            raise MetricInputError("group label must be non-empty")
        records.append((predicted == "1", group))
    return LabeledPredictionSet(tuple(records))


def parse_attribution_series(text: str) -> AttributionSeries:
    pairs = []
    for row in _rows(text, ["attribution", "performance_drop"]):
        if len(row) != 2:
            raise MetricInputError(f"malformed attribution row {row!r}")
        try:
            pairs.append((float(row[0]), float(row[1])))
        except ValueError:
            raise MetricInputError(f"non-numeric attribution row {row!r}") from None
    return AttributionSeries(tuple(pairs))


def parse_evidence_sequence(text: str) -> EvidenceSequence:
    predictions = []
    for row in _rows(text, ["prediction"]):
        if len(row) != 1:
            raise MetricInputError(f"malformed prediction row {row!r}")
        try:
            predictions.append(float(row[0]))
        except ValueError:
            raise MetricInputError(f"non-numeric prediction {row[0]!r}") from None
    return EvidenceSequence(tuple(predictions))


def input_digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


# ---------------------------------------------------------------------------
# Metric runner


def _fairness_groups(data: LabeledPredictionSet) -> tuple[str, str]:
    groups = data.groups()
    if len(groups) != 2:
        raise MetricInputError(
            f"fairness input must contain exactly 2 groups, found {len(groups)}"
        )
    return groups[0], groups[1]


def evaluate_metric(metric_name: str, data: bytes) -> MetricResult:
    """Parse the input for a metric and score it.

    Domain failures (degenerate variance, undefined ratio) come back as a
    failure record with ``error`` set, so they can be stored as an answer
    and reviewed like any other evidence. Malformed files raise.
    """
    text = data.decode("utf-8")
    digest = input_digest(data)
    try:
        if metric_name == "demographic_parity":
            dataset = parse_prediction_set(text)
            value = demographic_parity_difference(dataset, *_fairness_groups(dataset))
        elif metric_name == "disparate_impact":
            dataset = parse_prediction_set(text)
            value = disparate_impact_ratio(dataset, *_fairness_groups(dataset))
            if value is None:
                return MetricResult(metric_name, None, digest, error="undefined")
        elif metric_name == "faithfulness":
            value = faithfulness_score(parse_attribution_series(text))
        elif metric_name == "monotonicity":
            value = monotonicity_score(parse_evidence_sequence(text))
        else:
            raise MetricInputError(f"unknown metric {metric_name!r}")
    except MetricError as exc:
        return MetricResult(metric_name, None, digest, error=exc.code)
    return MetricResult(metric_name, value, digest)


def run_metric(
    case: "AssuranceCase",
    question_id: str,
    data: bytes,
    actor: StakeholderRole = StakeholderRole.AI_SUPPLIER,
) -> MetricResult:
    """Evaluate an algorithmic question's metric over an input file and
    record the result as the supplier's answer."""
    question = case.checklist.questions.get(question_id)
    if question is None:
        raise UnknownQuestionError(f"unknown question {question_id}")
    if question.qtype.kind != METRIC:
        raise TypeMismatchError(f"question {question_id} is not an algorithmic question")
    result = evaluate_metric(question.qtype.metric, data)
    answer_question(case, question_id, result, actor)
    return result
