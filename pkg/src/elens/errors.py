"""Exception hierarchy shared by all modules.

Every error carries a short machine-readable ``code`` used by the HTTP layer
to build problem-detail responses, and optionally the ``field`` it concerns.
"""

from __future__ import annotations


class ElensError(Exception):
    """Base class for all domain errors."""

    code = "error"

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.message = message
        self.field = field


# ---------------------------------------------------------------------------
# Case model

class DuplicateIdError(ElensError):
    code = "duplicate-id"


class InvalidElementError(ElensError):
    code = "invalid-element"


class UnknownElementError(ElensError):
    code = "unknown-element"


class UnknownEndpointError(ElensError):
    code = "unknown-endpoint"


class KindMismatchError(ElensError):
    code = "kind-mismatch"


class DuplicateLinkError(ElensError):
    code = "duplicate-link"


class LinkCycleError(ElensError):
    code = "link-cycle"


class UnknownPrincipleError(ElensError):
    code = "unknown-principle"


# ---------------------------------------------------------------------------
# State machines

class IllegalTransitionError(ElensError):
    code = "illegal-transition"


# ---------------------------------------------------------------------------
# Goal graph

class NotALeafError(ElensError):
    code = "not-a-leaf"


class OutOfRangeError(ElensError):
    code = "out-of-range"


class UnassignedLeafError(ElensError):
    code = "unassigned-leaf"


class CyclicGraphError(ElensError):
    code = "cyclic-graph"


class MixedIncomingError(ElensError):
    code = "mixed-incoming"


class MixedDecompositionError(ElensError):
    code = "mixed-decomposition"


class UnknownNodeError(ElensError):
    code = "unknown-node"


# ---------------------------------------------------------------------------
# Checklist / workflow

class InvalidQuestionError(ElensError):
    code = "invalid-question"


class UnknownQuestionError(ElensError):
    code = "unknown-question"


class UnknownRequirementError(ElensError):
    code = "unknown-requirement"


class ForbiddenError(ElensError):
    code = "forbidden"


class TypeMismatchError(ElensError):
    code = "type-mismatch"


class LockedAnswerError(ElensError):
    code = "locked-answer"


class EmptyFlagListError(ElensError):
    code = "empty-flag-list"


class QuestionPinnedError(ElensError):
    code = "question-pinned"


class RegistryClosedError(ElensError):
    code = "registry-closed"


# ---------------------------------------------------------------------------
# Analysis

class IncompleteCaseError(ElensError):
    code = "incomplete-case"

    def __init__(self, message: str, violations=None):
        super().__init__(message)
        self.violations = list(violations or [])


# ---------------------------------------------------------------------------
# Assessors

class MetricError(ElensError):
    """Metric-domain failure: recordable as a failed evaluation result."""

    code = "metric-error"


class UnknownGroupError(MetricError):
    code = "unknown-group"


class EmptyGroupError(MetricError):
    code = "empty-group"


class DegenerateVarianceError(MetricError):
    code = "degenerate-variance"


class TooShortError(MetricError):
    code = "too-short"


class MetricInputError(ElensError):
    """Input file does not parse to the metric's input type."""

    code = "parse-error"


# ---------------------------------------------------------------------------
# Persistence / service

class VersionConflictError(ElensError):
    code = "version-conflict"


class CaseNotFoundError(ElensError):
    code = "case-not-found"


class CaseExistsError(ElensError):
    code = "case-exists"
