"""Assurance-case toolkit for AI ethics.

Builds traceable hazard-analysis cases (losses, hazards, unethical AI
actions, causal scenarios, constraints, recommendations, requirements),
evaluates goal graphs into mitigation verdicts, runs lifecycle checklists
with qualitative and algorithmic assessments, and drives the supplier /
validator / regulator review loop over an HTTP API.
"""

from .checklist import (
    Answer,
    AnswerStatus,
    Checklist,
    Choice,
    MetricResult,
    Question,
    QuestionType,
    ReviewComment,
    ReviewVerdict,
    Text,
    answer_question,
    coverage_report,
    register_question,
)
from .dsl import ParseDiagnostic, SourceSpan, lint, parse_case, serialize_case, try_parse
from .errors import ElensError
from .goals import GoalGraph, GoalNode, Verdict, case_verdict, gate_segments
from .model import (
    AssuranceCase,
    AuditRecord,
    CaseElement,
    ElementKind,
    LinkKind,
    TraceLink,
    UaiaMode,
    VerificationMethod,
    Violation,
)
from .stpa import (
    EthicalState,
    StateEvent,
    TraceMatrix,
    UaiaSlot,
    build_trace_matrix,
    classify_state,
    enumerate_uaia_slots,
    transition,
)
from .vocab import LIFECYCLE_STAGES, StakeholderRole
from .workflow import (
    AnswerEvent,
    CaseStatus,
    answer_transition,
    audit_trail,
    derive_status,
    regulator_review,
    review_answer,
    submit_answer,
)

__version__ = "0.1.0"
