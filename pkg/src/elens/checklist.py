"""Hierarchical checklist instrument: principle -> segment -> question.

Questions are typed (multiple choice, extended response, or algorithmic),
tagged with a lifecycle stage and a quality desideratum, and linked to the
requirement elements they verify. Answers are written by suppliers and move
through the review state machine owned by the workflow module.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Union

from .errors import (
    DuplicateIdError,
    InvalidQuestionError,
    LockedAnswerError,
    ForbiddenError,
    QuestionPinnedError,
    TypeMismatchError,
    UnknownPrincipleError,
    UnknownQuestionError,
    UnknownRequirementError,
)
from .vocab import DESIDERATA, LIFECYCLE_STAGES, METRIC_NAMES, StakeholderRole

if TYPE_CHECKING:
    from .model import AssuranceCase


class AnswerStatus(str, Enum):
    DRAFT = "Draft"
    SUBMITTED = "Submitted"
    CHANGES_REQUESTED = "ChangesRequested"
    ACCEPTED = "Accepted"


class ReviewVerdict(str, Enum):
    ACCEPT = "Accept"
    REQUEST_CHANGES = "RequestChanges"


EXTENDED = "extended"
CHOICE = "choice"
METRIC = "metric"


@dataclass(frozen=True)
class QuestionType:
    """Question typing: extended response, multiple choice, or algorithmic."""

    kind: str
    options: tuple[str, ...] = ()
    metric: str | None = None

    def validate(self) -> None:
        if self.kind == CHOICE:
            if len(self.options) < 2 or len(set(self.options)) != len(self.options):
                raise InvalidQuestionError(
                    "multiple choice questions need at least 2 distinct options",
                    field="options",
                )
        elif self.kind == METRIC:
            if self.metric not in METRIC_NAMES:
                raise InvalidQuestionError(
                    f"unknown assessor metric {self.metric!r}", field="metric"
                )
        elif self.kind != EXTENDED:
            raise InvalidQuestionError(f"unknown question type {self.kind!r}", field="kind")


def extended() -> QuestionType:
    return QuestionType(EXTENDED)


def choice(*options: str) -> QuestionType:
    return QuestionType(CHOICE, options=tuple(options))


def metric(name: str) -> QuestionType:
    return QuestionType(METRIC, metric=name)


@dataclass
class Question:
    id: str
    principle: str
    segment: str
    stage: str
    qtype: QuestionType
    text: str
    desideratum: str = "Relevant"
    requirement_links: tuple[str, ...] = ()
    retired: bool = False


@dataclass(frozen=True)
class Choice:
    index: int


@dataclass(frozen=True)
class Text:
    body: str


@dataclass(frozen=True)
class MetricResult:
    """Outcome of an algorithmic evaluation over a supplier-provided file.

    A failed evaluation is still a recordable result: ``value`` is None and
    ``error`` names the failure.
    """

    metric: str
    value: float | None
    inputs_digest: str
    error: str | None = None


AnswerContent = Union[Choice, Text, MetricResult]


@dataclass
class ReviewComment:
    author_role: StakeholderRole
    verdict: ReviewVerdict
    text: str
    timestamp: str
    answer_version: int

    def __post_init__(self):
        if self.author_role not in (StakeholderRole.ETHICS_VALIDATOR, StakeholderRole.REGULATOR):
            raise ForbiddenError(
                f"review comments come from validators or regulators, not {self.author_role.value}"
            )


@dataclass
class Answer:
    question_id: str
    content: AnswerContent
    status: AnswerStatus = AnswerStatus.DRAFT
    version: int = 0
    comments: list[ReviewComment] = field(default_factory=list)


@dataclass
class Checklist:
    """The case's question bank; retired questions stay for audit purposes."""

    questions: dict[str, Question] = field(default_factory=dict)

    def active(self) -> list[Question]:
        return [q for q in self.questions.values() if not q.retired]


# ---------------------------------------------------------------------------
# Operations


def _content_matches(question: Question, content: AnswerContent) -> None:
    qt = question.qtype
    if isinstance(content, Choice):
        if qt.kind != CHOICE:
            raise TypeMismatchError(
                f"question {question.id} takes {qt.kind} answers, not a choice"
            )
        if not 0 <= content.index < len(qt.options):
            raise TypeMismatchError(
                f"choice index {content.index} outside options 0..{len(qt.options) - 1}",
                field="index",
            )
    elif isinstance(content, Text):
        if qt.kind != EXTENDED:
            raise TypeMismatchError(
                f"question {question.id} takes {qt.kind} answers, not free text"
            )
        if not content.body.strip():
            raise TypeMismatchError("extended responses must be non-empty", field="body")
    elif isinstance(content, MetricResult):
        if qt.kind != METRIC:
            raise TypeMismatchError(
                f"question {question.id} takes {qt.kind} answers, not a metric result"
            )
        if content.metric != qt.metric:
            raise TypeMismatchError(
                f"question {question.id} expects metric {qt.metric}, got {content.metric}",
                field="metric",
            )
    else:
        raise TypeMismatchError(f"unsupported answer content {type(content).__name__}")


def register_question(
    case: "AssuranceCase",
    question: Question,
    actor: StakeholderRole = StakeholderRole.SYSTEM_ADMIN,
) -> "AssuranceCase":
    """Add a question under its principle/segment and link it to the
    requirements it verifies."""
    from .model import ElementKind, LinkKind, TraceLink

    if question.id in case.checklist.questions or question.id in case.elements:
        raise DuplicateIdError(f"id {question.id} already in use", field="id")
    if question.principle not in case.principles:
        raise UnknownPrincipleError(f"unknown principle {question.principle}")
    if question.segment not in case.principles[question.principle].segments:
        raise UnknownPrincipleError(
            f"principle {question.principle} has no segment {question.segment}"
        )
    if question.stage not in LIFECYCLE_STAGES:
        raise InvalidQuestionError(f"unknown lifecycle stage {question.stage!r}", field="stage")
    if question.desideratum not in DESIDERATA:
        raise InvalidQuestionError(
            f"unknown desideratum {question.desideratum!r}", field="desideratum"
        )
    question.qtype.validate()
    for req_id in question.requirement_links:
        element = case.elements.get(req_id)
        if element is None or element.kind is not ElementKind.REQUIREMENT:
            raise UnknownRequirementError(f"{req_id} is not a requirement in this case")

    case.checklist.questions[question.id] = question
    for req_id in question.requirement_links:
        case.add_link(
            TraceLink(question.id, req_id, LinkKind.QUESTION_OF_REQUIREMENT),
            actor=actor,
            record=False,
        )
    case._record(actor, "register_question", question.id)
    return case


def answer_question(
    case: "AssuranceCase",
    question_id: str,
    content: AnswerContent,
    actor: StakeholderRole,
) -> "AssuranceCase":
    """Store or rewrite a supplier's answer; the answer returns to Draft."""
    if actor is not StakeholderRole.AI_SUPPLIER:
        raise ForbiddenError(f"only the AI supplier answers questions, not {actor.value}")
    question = case.checklist.questions.get(question_id)
    if question is None:
        raise UnknownQuestionError(f"unknown question {question_id}")
    if question.retired:
        raise InvalidQuestionError(f"question {question_id} is retired")
    _content_matches(question, content)

    existing = case.answers.get(question_id)
    prior = existing.status if existing else None
    if existing is not None and existing.status not in (
        AnswerStatus.DRAFT,
        AnswerStatus.CHANGES_REQUESTED,
    ):
        raise LockedAnswerError(
            f"answer to {question_id} is {existing.status.value} and cannot be edited"
        )
    if existing is None:
        case.answers[question_id] = Answer(question_id=question_id, content=content)
    else:
        existing.content = content
        existing.status = AnswerStatus.DRAFT
    case._record(
        actor,
        "answer_question",
        question_id,
        prior_state=prior.value if prior else None,
        new_state=AnswerStatus.DRAFT.value,
    )
    return case


def retire_question(
    case: "AssuranceCase",
    question_id: str,
    actor: StakeholderRole = StakeholderRole.SYSTEM_ADMIN,
) -> "AssuranceCase":
    """Exclude a question from coverage without deleting its history."""
    question = case.checklist.questions.get(question_id)
    if question is None:
        raise UnknownQuestionError(f"unknown question {question_id}")
    question.retired = True
    case._record(actor, "retire_question", question_id)
    return case


def remove_question(
    case: "AssuranceCase",
    question_id: str,
    actor: StakeholderRole = StakeholderRole.SYSTEM_ADMIN,
) -> "AssuranceCase":
    """Delete a never-answered question outright."""
    from .model import LinkKind

    if question_id not in case.checklist.questions:
        raise UnknownQuestionError(f"unknown question {question_id}")
    if question_id in case.answers:
        raise QuestionPinnedError(
            f"question {question_id} has an answer; retire it instead"
        )
    del case.checklist.questions[question_id]
    case.links = [
        l
        for l in case.links
        if not (l.kind is LinkKind.QUESTION_OF_REQUIREMENT and l.source == question_id)
    ]
    case._record(actor, "remove_question", question_id)
    return case


@dataclass(frozen=True)
class CoverageCell:
    question_count: int
    answered: int
    accepted: int


@dataclass(frozen=True)
class CoverageReport:
    cells: dict[str, dict[str, CoverageCell]]
    gaps: tuple[tuple[str, str], ...]

    def total_questions(self) -> int:
        return sum(c.question_count for row in self.cells.values() for c in row.values())


def coverage_report(case: "AssuranceCase") -> CoverageReport:
    """Principle x lifecycle-stage matrix; zero cells are coverage gaps."""
    counts: dict[str, dict[str, list[int]]] = {
        pid: {stage: [0, 0, 0] for stage in LIFECYCLE_STAGES} for pid in case.principles
    }
    for question in case.checklist.active():
        cell = counts[question.principle][question.stage]
        cell[0] += 1
        answer = case.answers.get(question.id)
        if answer is not None:
            cell[1] += 1
            if answer.status is AnswerStatus.ACCEPTED:
                cell[2] += 1
    cells = {
        pid: {stage: CoverageCell(*vals) for stage, vals in row.items()}
        for pid, row in counts.items()
    }
    gaps = tuple(
        (pid, stage)
        for pid, row in cells.items()
        for stage, cell in row.items()
        if cell.question_count == 0
    )
    return CoverageReport(cells=cells, gaps=gaps)
