"""Multi-role iterative review workflow.

Suppliers draft and submit answers, validators accept or request changes,
and the regulator certifies or flags the case. Answer statuses move through
a closed four-state machine; the case status is always derived from answer
statuses plus the regulator's records, never stored.
"""

from __future__ import annotations

from enum import Enum
from typing import TYPE_CHECKING

from .checklist import AnswerStatus, ReviewComment, ReviewVerdict
from .errors import (
    EmptyFlagListError,
    ForbiddenError,
    IllegalTransitionError,
    InvalidQuestionError,
    TypeMismatchError,
    UnknownQuestionError,
)
from .vocab import StakeholderRole

if TYPE_CHECKING:
    from .model import AssuranceCase, AuditRecord


class CaseStatus(str, Enum):
    DRAFTING = "Drafting"
    UNDER_VALIDATION = "UnderValidation"
    VALIDATOR_APPROVED = "ValidatorApproved"
    REGULATOR_REVIEW = "RegulatorReview"
    REGULATOR_FLAGGED = "RegulatorFlagged"
    CERTIFIED = "Certified"


class AnswerEvent(str, Enum):
    SUBMIT = "Submit"
    VALIDATOR_ACCEPT = "ValidatorAccept"
    VALIDATOR_REQUEST_CHANGES = "ValidatorRequestChanges"
    REGULATOR_FLAG = "RegulatorFlag"


# The complete legal transition table; everything else is rejected.
ANSWER_TRANSITIONS: dict[tuple[AnswerStatus, AnswerEvent], AnswerStatus] = {
    (AnswerStatus.DRAFT, AnswerEvent.SUBMIT): AnswerStatus.SUBMITTED,
    (AnswerStatus.CHANGES_REQUESTED, AnswerEvent.SUBMIT): AnswerStatus.SUBMITTED,
    (AnswerStatus.SUBMITTED, AnswerEvent.VALIDATOR_ACCEPT): AnswerStatus.ACCEPTED,
    (AnswerStatus.SUBMITTED, AnswerEvent.VALIDATOR_REQUEST_CHANGES): AnswerStatus.CHANGES_REQUESTED,
    (AnswerStatus.ACCEPTED, AnswerEvent.REGULATOR_FLAG): AnswerStatus.CHANGES_REQUESTED,
}


def answer_transition(status: AnswerStatus, event: AnswerEvent) -> AnswerStatus:
    try:
        return ANSWER_TRANSITIONS[(status, event)]
    except KeyError:
        raise IllegalTransitionError(
            f"answer event {event.value} is illegal in status {status.value}"
        ) from None


# ---------------------------------------------------------------------------
# Supplier / validator / regulator operations


def submit_answer(case: "AssuranceCase", question_id: str, actor: StakeholderRole) -> "AssuranceCase":
    """Move a drafted (or change-requested) answer into the review queue."""
    if actor is not StakeholderRole.AI_SUPPLIER:
        raise ForbiddenError(f"only the AI supplier submits answers, not {actor.value}")
    if question_id not in case.checklist.questions:
        raise UnknownQuestionError(f"unknown question {question_id}")
    answer = case.answers.get(question_id)
    if answer is None:
        raise IllegalTransitionError(f"question {question_id} has no answer to submit")
    prior = answer.status
    answer.status = answer_transition(prior, AnswerEvent.SUBMIT)
    answer.version += 1
    case._record(
        actor,
        "submit_answer",
        question_id,
        prior_state=prior.value,
        new_state=answer.status.value,
    )
    return case


def review_answer(
    case: "AssuranceCase",
    question_id: str,
    author_role: StakeholderRole,
    verdict: ReviewVerdict,
    text: str = "",
) -> "AssuranceCase":
    """Validator verdict on a submitted answer: accept, or request changes
    with feedback the supplier must address."""
    from .model import now_utc

    if author_role is not StakeholderRole.ETHICS_VALIDATOR:
        raise ForbiddenError(f"only ethics validators review answers, not {author_role.value}")
    question = case.checklist.questions.get(question_id)
    if question is None:
        raise UnknownQuestionError(f"unknown question {question_id}")
    answer = case.answers.get(question_id)
    if answer is None:
        raise IllegalTransitionError(f"question {question_id} has no answer to review")
    if verdict is ReviewVerdict.ACCEPT and not question.requirement_links:
        raise InvalidQuestionError(
            f"question {question_id} verifies no requirement; its answer cannot be accepted"
        )
    if verdict is ReviewVerdict.REQUEST_CHANGES and not text.strip():
        raise TypeMismatchError("requesting changes needs comment text", field="text")

    event = (
        AnswerEvent.VALIDATOR_ACCEPT
        if verdict is ReviewVerdict.ACCEPT
        else AnswerEvent.VALIDATOR_REQUEST_CHANGES
    )
    prior = answer.status
    answer.status = answer_transition(prior, event)
    answer.comments.append(
        ReviewComment(
            author_role=author_role,
            verdict=verdict,
            text=text,
            timestamp=now_utc(),
            answer_version=answer.version,
        )
    )
    case._record(
        author_role,
        "review_answer",
        question_id,
        prior_state=prior.value,
        new_state=answer.status.value,
    )
    return case


def regulator_review(
    case: "AssuranceCase",
    decision: str,
    flagged_questions: list[str] | None = None,
    comment: str = "",
    actor: StakeholderRole = StakeholderRole.REGULATOR,
) -> "AssuranceCase":
    """Regulator gate once every answer is accepted: approve to certify, or
    flag answers back to the supplier."""
    from .model import RegulatorRecord, now_utc

    if actor is not StakeholderRole.REGULATOR:
        raise ForbiddenError(f"only the regulator certifies or flags, not {actor.value}")
    if decision not in ("Approve", "Flag"):
        raise TypeMismatchError(f"unknown regulator decision {decision!r}", field="decision")
    if derive_status(case) is not CaseStatus.REGULATOR_REVIEW:
        raise IllegalTransitionError(
            f"regulator review needs status {CaseStatus.REGULATOR_REVIEW.value}, "
            f"case is {derive_status(case).value}"
        )
    flagged = tuple(flagged_questions or ())
    if decision == "Flag":
        if not flagged:
            raise EmptyFlagListError("flag decision needs at least one flagged question")
        for qid in flagged:
            if qid not in case.checklist.questions:
                raise UnknownQuestionError(f"unknown flagged question {qid}")
        for qid in flagged:
            answer = case.answers[qid]
            prior = answer.status
            answer.status = answer_transition(prior, AnswerEvent.REGULATOR_FLAG)
            answer.comments.append(
                ReviewComment(
                    author_role=actor,
                    verdict=ReviewVerdict.REQUEST_CHANGES,
                    text=comment,
                    timestamp=now_utc(),
                    answer_version=answer.version,
                )
            )
    record = case._record(actor, "regulator_review", case.id, new_state=decision)
    case.regulator_records.append(
        RegulatorRecord(
            decision=decision,
            flagged_questions=flagged,
            comment=comment,
            timestamp=now_utc(),
            seq=record.seq,
        )
    )
    return case


# ---------------------------------------------------------------------------
# Derived case status


def _supplier_activity_since(case: "AssuranceCase", seq: int) -> bool:
    return any(
        r.seq > seq and r.action in ("answer_question", "submit_answer")
        for r in case.audit
    )


def derive_status(case: "AssuranceCase") -> CaseStatus:
    """Case status computed from answer statuses and regulator records."""
    active = case.checklist.active()
    statuses = {
        q.id: case.answers[q.id].status for q in active if q.id in case.answers
    }
    all_accepted = bool(active) and len(statuses) == len(active) and all(
        s is AnswerStatus.ACCEPTED for s in statuses.values()
    )

    last = case.regulator_records[-1] if case.regulator_records else None
    if last is not None and last.decision == "Approve" and all_accepted:
        return CaseStatus.CERTIFIED
    if (
        last is not None
        and last.decision == "Flag"
        and not _supplier_activity_since(case, last.seq)
    ):
        return CaseStatus.REGULATOR_FLAGGED
    if all_accepted:
        return CaseStatus.REGULATOR_REVIEW
    if any(s is AnswerStatus.SUBMITTED for s in statuses.values()):
        return CaseStatus.UNDER_VALIDATION
    if statuses and all(s is AnswerStatus.ACCEPTED for s in statuses.values()):
        # everything reviewed so far is accepted, but questions remain open
        return CaseStatus.VALIDATOR_APPROVED
    return CaseStatus.DRAFTING


def accepted_requirements(case: "AssuranceCase") -> dict[str, bool]:
    """requirement id -> True when every active question verifying it has
    an accepted answer (and at least one question verifies it)."""
    from .model import ElementKind

    linked: dict[str, list[str]] = {}
    for question in case.checklist.active():
        for req in question.requirement_links:
            linked.setdefault(req, []).append(question.id)

    result: dict[str, bool] = {}
    for element in case.elements.values():
        if element.kind is not ElementKind.REQUIREMENT:
            continue
        question_ids = linked.get(element.id, [])
        result[element.id] = bool(question_ids) and all(
            qid in case.answers and case.answers[qid].status is AnswerStatus.ACCEPTED
            for qid in question_ids
        )
    return result


def audit_trail(case: "AssuranceCase", target: str | None = None) -> list["AuditRecord"]:
    """Ordered audit records, optionally narrowed to one target id."""
    records = sorted(case.audit, key=lambda r: r.seq)
    if target is not None:
        records = [r for r in records if r.target == target]
    return records
