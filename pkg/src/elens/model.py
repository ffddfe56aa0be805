"""Typed in-memory model of an assurance case.

An :class:`AssuranceCase` aggregates the element catalog (losses, hazards,
unethical actions, scenarios, constraints, recommendations, requirements,
evidence), the trace links between them, the goal graph, the checklist with
its answers, and an append-only audit log. Mutating operations validate
their preconditions, mutate the case, and append exactly one audit record.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum

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
)
from .errors import (
    DuplicateIdError,
    DuplicateLinkError,
    InvalidElementError,
    KindMismatchError,
    LinkCycleError,
    RegistryClosedError,
    UnknownElementError,
    UnknownEndpointError,
    UnknownPrincipleError,
)
from .goals import GoalGraph, GoalNode
from .vocab import LIFECYCLE_STAGES, StakeholderRole

SCHEMA_VERSION = 1

# One or more letters, optional digits, optional dot-separated numeric
# suffix: L1, H7, UAIA101, DR101.1 -- and bare control-action ids like A.
ID_PATTERN = re.compile(r"^[A-Za-z]+[0-9]*(?:\.[0-9]+)*$")


class ElementKind(str, Enum):
    LOSS = "loss"
    HAZARD = "hazard"
    CONTROL_ACTION = "control_action"
    UAIA = "uaia"
    CAUSAL_SCENARIO = "scenario"
    CONSTRAINT = "constraint"
    DESIGN_RECOMMENDATION = "recommendation"
    REQUIREMENT = "requirement"
    EVIDENCE = "evidence"


class VerificationMethod(str, Enum):
    DEMONSTRATION = "demonstration"
    BLACK_BOX_TESTING = "black_box_testing"
    SCENARIO_TESTING = "scenario_testing"
    ALGORITHMIC_EVALUATION = "algorithmic_evaluation"


class UaiaMode(str, Enum):
    PROVIDED = "provided"
    NOT_PROVIDED = "not_provided"


class LinkKind(str, Enum):
    HAZARD_OF_LOSS = "HazardOfLoss"
    UAIA_OF_HAZARD = "UaiaOfHazard"
    SCENARIO_OF_UAIA = "ScenarioOfUaia"
    CONSTRAINT_OF_HAZARD = "ConstraintOfHazard"
    CONSTRAINT_OF_UAIA = "ConstraintOfUaia"
    RECOMMENDATION_OF_CONSTRAINT = "RecommendationOfConstraint"
    REQUIREMENT_OF_RECOMMENDATION = "RequirementOfRecommendation"
    EVIDENCE_OF_REQUIREMENT = "EvidenceOfRequirement"
    QUESTION_OF_REQUIREMENT = "QuestionOfRequirement"


# Endpoint schema: link kind -> (source kind, target kind). The source of a
# QuestionOfRequirement link is a checklist question, not a case element.
LINK_SCHEMA: dict[LinkKind, tuple[ElementKind | None, ElementKind]] = {
    LinkKind.HAZARD_OF_LOSS: (ElementKind.HAZARD, ElementKind.LOSS),
    LinkKind.UAIA_OF_HAZARD: (ElementKind.UAIA, ElementKind.HAZARD),
    LinkKind.SCENARIO_OF_UAIA: (ElementKind.CAUSAL_SCENARIO, ElementKind.UAIA),
    LinkKind.CONSTRAINT_OF_HAZARD: (ElementKind.CONSTRAINT, ElementKind.HAZARD),
    LinkKind.CONSTRAINT_OF_UAIA: (ElementKind.CONSTRAINT, ElementKind.UAIA),
    LinkKind.RECOMMENDATION_OF_CONSTRAINT: (
        ElementKind.DESIGN_RECOMMENDATION,
        ElementKind.CONSTRAINT,
    ),
    LinkKind.REQUIREMENT_OF_RECOMMENDATION: (
        ElementKind.REQUIREMENT,
        ElementKind.DESIGN_RECOMMENDATION,
    ),
    LinkKind.EVIDENCE_OF_REQUIREMENT: (ElementKind.EVIDENCE, ElementKind.REQUIREMENT),
    LinkKind.QUESTION_OF_REQUIREMENT: (None, ElementKind.REQUIREMENT),
}


def now_utc() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds").replace("+00:00", "Z")


@dataclass
class CaseElement:
    """One typed analysis artifact, anchored to a principle segment."""

    id: str
    kind: ElementKind
    principle: str
    segment: str
    description: str
    verification: VerificationMethod | None = None
    lifecycle_stage: str | None = None
    # UAIA slot annotation: which control action this unethical action
    # concerns, and whether it is the provided or not-provided variant.
    control_action: str | None = None
    uaia_mode: UaiaMode | None = None

    def validate(self) -> None:
        if not ID_PATTERN.match(self.id or ""):
            raise InvalidElementError(f"malformed element id {self.id!r}", field="id")
        if not isinstance(self.kind, ElementKind):
            raise InvalidElementError(f"unknown element kind {self.kind!r}", field="kind")
        if not self.description or not self.description.strip():
            raise InvalidElementError(f"element {self.id} has an empty description")
        if self.kind is ElementKind.REQUIREMENT:
            if self.verification is None:
                raise InvalidElementError(
                    f"requirement {self.id} needs a verification method",
                    field="verification",
                )
        elif self.verification is not None:
            raise InvalidElementError(
                f"{self.kind.value} {self.id} cannot carry a verification method",
                field="verification",
            )
        if (self.control_action is None) != (self.uaia_mode is None):
            raise InvalidElementError(
                f"element {self.id} must set control action and mode together"
            )
        if self.control_action is not None and self.kind is not ElementKind.UAIA:
            raise InvalidElementError(
                f"{self.kind.value} {self.id} cannot be annotated with a control action"
            )
        if self.lifecycle_stage is not None and self.lifecycle_stage not in LIFECYCLE_STAGES:
            raise InvalidElementError(
                f"unknown lifecycle stage {self.lifecycle_stage!r}", field="lifecycle_stage"
            )


@dataclass(frozen=True)
class TraceLink:
    source: str
    target: str
    kind: LinkKind


@dataclass(frozen=True)
class Violation:
    element_id: str
    rule_id: str
    message: str


@dataclass(frozen=True)
class AuditRecord:
    seq: int
    actor: str
    action: str
    target: str
    timestamp: str
    prior_state: str | None = None
    new_state: str | None = None


@dataclass
class RegulatorRecord:
    decision: str  # "Approve" | "Flag"
    flagged_questions: tuple[str, ...]
    comment: str
    timestamp: str
    seq: int


@dataclass
class Principle:
    id: str
    title: str = ""
    segments: dict[str, str] = field(default_factory=dict)  # segment id -> title


# Completeness rule set. Each entry: rule id, element kind it constrains,
# the link kinds that satisfy it, and the message template.
_COMPLETENESS_RULES: tuple[tuple[str, ElementKind, tuple[LinkKind, ...], str], ...] = (
    ("a", ElementKind.HAZARD, (LinkKind.HAZARD_OF_LOSS,), "hazard {id} links no loss"),
    ("b", ElementKind.UAIA, (LinkKind.UAIA_OF_HAZARD,), "unethical action {id} links no hazard"),
    (
        "c",
        ElementKind.CAUSAL_SCENARIO,
        (LinkKind.SCENARIO_OF_UAIA,),
        "causal scenario {id} links no unethical action",
    ),
    (
        "d",
        ElementKind.DESIGN_RECOMMENDATION,
        (LinkKind.RECOMMENDATION_OF_CONSTRAINT,),
        "design recommendation {id} links no constraint",
    ),
    (
        "e",
        ElementKind.REQUIREMENT,
        (LinkKind.REQUIREMENT_OF_RECOMMENDATION,),
        "requirement {id} links no design recommendation",
    ),
    # rule f (requirement without verification) is handled separately
    (
        "g",
        ElementKind.CONSTRAINT,
        (LinkKind.CONSTRAINT_OF_HAZARD, LinkKind.CONSTRAINT_OF_UAIA),
        "constraint {id} links no hazard or unethical action",
    ),
)


class AssuranceCase:
    """Root aggregate; all mutations go through validated operations."""

    def __init__(self, case_id: str, title: str = ""):
        if not case_id or not case_id.strip():
            raise InvalidElementError("case id must be non-empty", field="id")
        self.id = case_id
        self.title = title
        self.schema_version = SCHEMA_VERSION
        self.principles: dict[str, Principle] = {}
        self.elements: dict[str, CaseElement] = {}
        self.links: list[TraceLink] = []
        self.goal_graph = GoalGraph()
        self.checklist = Checklist()
        self.answers: dict[str, Answer] = {}
        self.regulator_records: list[RegulatorRecord] = []
        self.audit: list[AuditRecord] = []
        self.extra: dict = {}  # unknown persisted fields, preserved on rewrite
        self.source_spans: dict[str, object] = {}  # transient; filled by the DSL parser

    # -- audit ----------------------------------------------------------

    def _record(
        self,
        actor: StakeholderRole | str,
        action: str,
        target: str,
        prior_state: str | None = None,
        new_state: str | None = None,
    ) -> AuditRecord:
        role = actor.value if isinstance(actor, StakeholderRole) else str(actor)
        record = AuditRecord(
            seq=len(self.audit) + 1,
            actor=role,
            action=action,
            target=target,
            timestamp=now_utc(),
            prior_state=prior_state,
            new_state=new_state,
        )
        self.audit.append(record)
        return record

    @property
    def status(self):
        from .workflow import derive_status

        return derive_status(self)

    # -- structure building ----------------------------------------------

    def add_principle(
        self, principle_id: str, title: str = "", actor=StakeholderRole.SYSTEM_ADMIN
    ) -> Principle:
        # the principle registry stays open while authoring, closed once
        # any answer exists (audit stability)
        if self.answers:
            raise RegistryClosedError(
                "the principle registry is closed once answering has begun"
            )
        if principle_id in self.principles:
            raise DuplicateIdError(f"principle {principle_id} already declared")
        principle = Principle(principle_id, title)
        self.principles[principle_id] = principle
        self._record(actor, "add_principle", principle_id)
        return principle

    def add_segment(
        self,
        principle_id: str,
        segment_id: str,
        title: str = "",
        actor=StakeholderRole.SYSTEM_ADMIN,
    ) -> None:
        if self.answers:
            raise RegistryClosedError(
                "the principle registry is closed once answering has begun"
            )
        if principle_id not in self.principles:
            raise UnknownPrincipleError(f"unknown principle {principle_id}")
        segments = self.principles[principle_id].segments
        if segment_id in segments:
            raise DuplicateIdError(
                f"segment {segment_id} already declared under {principle_id}"
            )
        segments[segment_id] = title
        self._record(actor, "add_segment", f"{principle_id}/{segment_id}")

    def add_element(
        self, element: CaseElement, actor=StakeholderRole.SYSTEM_ADMIN
    ) -> "AssuranceCase":
        element.validate()
        if element.id in self.elements or element.id in self.checklist.questions:
            raise DuplicateIdError(f"id {element.id} already in use", field="id")
        if element.principle not in self.principles:
            raise UnknownPrincipleError(f"unknown principle {element.principle}")
        if element.segment not in self.principles[element.principle].segments:
            raise UnknownPrincipleError(
                f"principle {element.principle} has no segment {element.segment}"
            )
        self.elements[element.id] = element
        self._record(actor, "add_element", element.id, new_state=element.kind.value)
        return self

    def add_link(
        self, link: TraceLink, actor=StakeholderRole.SYSTEM_ADMIN, record: bool = True
    ) -> "AssuranceCase":
        source_kind, target_kind = LINK_SCHEMA[link.kind]
        target = self.elements.get(link.target)
        if target is None:
            raise UnknownEndpointError(f"unknown link target {link.target}", field="target")
        if target.kind is not target_kind:
            raise KindMismatchError(
                f"{link.kind.value} link needs a {target_kind.value} target, "
                f"{link.target} is a {target.kind.value}"
            )
        if source_kind is None:
            if link.source not in self.checklist.questions:
                raise UnknownEndpointError(
                    f"unknown question {link.source} in link", field="source"
                )
        else:
            source = self.elements.get(link.source)
            if source is None:
                raise UnknownEndpointError(
                    f"unknown link source {link.source}", field="source"
                )
            if source.kind is not source_kind:
                raise KindMismatchError(
                    f"{link.kind.value} link needs a {source_kind.value} source, "
                    f"{link.source} is a {source.kind.value}"
                )
        if link in self.links:
            raise DuplicateLinkError(
                f"duplicate link {link.source} -> {link.target} ({link.kind.value})"
            )
        # The chain is a DAG by construction; guard against future kinds.
        if source_kind is not None and self._reaches(link.target, link.source):
            raise LinkCycleError(
                f"link {link.source} -> {link.target} would close a cycle"
            )
        self.links.append(link)
        if record:
            self._record(actor, "add_link", f"{link.source}->{link.target}")
        return self

    def _reaches(self, start: str, goal: str) -> bool:
        frontier = [start]
        seen = {start}
        while frontier:
            node = frontier.pop()
            if node == goal:
                return True
            for link in self.element_links():
                if link.source == node and link.target not in seen:
                    seen.add(link.target)
                    frontier.append(link.target)
        return False

    # -- queries ----------------------------------------------------------

    def element_links(self) -> list[TraceLink]:
        """Trace links between case elements (checklist links excluded)."""
        return [l for l in self.links if l.kind is not LinkKind.QUESTION_OF_REQUIREMENT]

    def require_element(self, element_id: str) -> CaseElement:
        element = self.elements.get(element_id)
        if element is None:
            raise UnknownElementError(f"unknown element {element_id}")
        return element

    def _hops(self, element_id: str, forward: bool) -> list[list[str]]:
        self.require_element(element_id)
        links = self.element_links()
        visited = {element_id}
        frontier = {element_id}
        hops: list[list[str]] = []
        while frontier:
            if forward:
                reached = {l.source for l in links if l.target in frontier}
            else:
                reached = {l.target for l in links if l.source in frontier}
            reached -= visited
            if not reached:
                break
            hops.append(sorted(reached))
            visited |= reached
            frontier = reached
        return hops

    def trace_backward(self, element_id: str) -> list[list[str]]:
        """Transitive upstream elements grouped by hop, e.g. a requirement
        traces back through recommendation, constraint, unethical action,
        and hazard to the losses it ultimately mitigates."""
        return self._hops(element_id, forward=False)

    def trace_forward(self, element_id: str) -> list[list[str]]:
        """Transitive downstream elements grouped by hop (dual of
        :meth:`trace_backward`)."""
        return self._hops(element_id, forward=True)

    def completeness_check(self) -> list[Violation]:
        """Every gap in the mandatory analysis chain; empty iff complete.

        Violations are data, never raised: assurance surfaces gaps.
        """
        outgoing: dict[str, set[LinkKind]] = {}
        for link in self.element_links():
            outgoing.setdefault(link.source, set()).add(link.kind)

        violations: list[Violation] = []
        for rule_id, kind, satisfying, template in _COMPLETENESS_RULES:
            for element in self.elements.values():
                if element.kind is not kind:
                    continue
                if not outgoing.get(element.id, set()) & set(satisfying):
                    violations.append(
                        Violation(element.id, rule_id, template.format(id=element.id))
                    )
        for element in self.elements.values():
            if element.kind is ElementKind.REQUIREMENT and element.verification is None:
                violations.append(
                    Violation(
                        element.id, "f", f"requirement {element.id} has no verification method"
                    )
                )
        violations.sort(key=lambda v: (v.rule_id, v.element_id))
        return violations

    # -- comparison ---------------------------------------------------------

    def structural_key(self):
        """Canonical tuple of the authored structure (answers, audit and
        other runtime state excluded); two cases are structurally equal
        iff their keys are equal."""
        elements = tuple(
            sorted(
                (
                    e.id,
                    e.kind.value,
                    e.principle,
                    e.segment,
                    e.description,
                    e.verification.value if e.verification else None,
                    e.lifecycle_stage,
                    e.control_action,
                    e.uaia_mode.value if e.uaia_mode else None,
                )
                for e in self.elements.values()
            )
        )
        links = tuple(sorted((l.source, l.target, l.kind.value) for l in self.links))
        principles = tuple(
            (p.id, p.title, tuple(p.segments.items())) for p in self.principles.values()
        )
        questions = tuple(
            sorted(
                (
                    q.id,
                    q.principle,
                    q.segment,
                    q.stage,
                    q.desideratum,
                    q.qtype.kind,
                    q.qtype.options,
                    q.qtype.metric,
                    q.text,
                    tuple(sorted(q.requirement_links)),
                    q.retired,
                )
                for q in self.checklist.questions.values()
            )
        )
        nodes = tuple(
            sorted(
                (
                    n.id,
                    n.kind,
                    n.label,
                    n.actor,
                    n.satisfaction,
                    n.bound_element,
                    n.mitigates,
                )
                for n in self.goal_graph.nodes.values()
            )
        )
        goal_links = tuple(
            sorted((l.source, l.target, l.kind) for l in self.goal_graph.links)
        )
        return (self.id, self.title, principles, elements, links, questions, nodes, goal_links)

    # -- persistence ---------------------------------------------------------

    def to_dict(self) -> dict:
        def element_dict(e: CaseElement) -> dict:
            d = {
                "id": e.id,
                "kind": e.kind.value,
                "principle": e.principle,
                "segment": e.segment,
                "description": e.description,
            }
            if e.verification:
                d["verification"] = e.verification.value
            if e.lifecycle_stage:
                d["lifecycle_stage"] = e.lifecycle_stage
            if e.control_action:
                d["control_action"] = e.control_action
                d["uaia_mode"] = e.uaia_mode.value
            return d

        def question_dict(q: Question) -> dict:
            d = {
                "id": q.id,
                "principle": q.principle,
                "segment": q.segment,
                "stage": q.stage,
                "desideratum": q.desideratum,
                "type": {"kind": q.qtype.kind},
                "text": q.text,
                "requirement_links": list(q.requirement_links),
                "retired": q.retired,
            }
            if q.qtype.kind == "choice":
                d["type"]["options"] = list(q.qtype.options)
            if q.qtype.kind == "metric":
                d["type"]["metric"] = q.qtype.metric
            return d

        def content_dict(content) -> dict:
            if isinstance(content, Choice):
                return {"type": "choice", "index": content.index}
            if isinstance(content, Text):
                return {"type": "text", "body": content.body}
            return {
                "type": "metric",
                "metric": content.metric,
                "value": content.value,
                "inputs_digest": content.inputs_digest,
                "error": content.error,
            }

        def answer_dict(a: Answer) -> dict:
            return {
                "question_id": a.question_id,
                "content": content_dict(a.content),
                "status": a.status.value,
                "version": a.version,
                "comments": [
                    {
                        "author_role": c.author_role.value,
                        "verdict": c.verdict.value,
                        "text": c.text,
                        "timestamp": c.timestamp,
                        "answer_version": c.answer_version,
                    }
                    for c in a.comments
                ],
            }

        def node_dict(n: GoalNode) -> dict:
            d: dict = {"id": n.id, "kind": n.kind, "label": n.label}
            if n.actor is not None:
                d["actor"] = n.actor
            if n.satisfaction is not None:
                d["satisfaction"] = n.satisfaction
            if n.bound_element is not None:
                d["bound_element"] = n.bound_element
            if n.mitigates is not None:
                d["mitigates"] = n.mitigates
            return d

        doc = {
            "schema_version": self.schema_version,
            "id": self.id,
            "title": self.title,
            "principles": [
                {
                    "id": p.id,
                    "title": p.title,
                    "segments": [{"id": s, "title": t} for s, t in p.segments.items()],
                }
                for p in self.principles.values()
            ],
            "elements": [element_dict(e) for e in self.elements.values()],
            "links": [
                {"source": l.source, "target": l.target, "kind": l.kind.value}
                for l in self.links
            ],
            "questions": [question_dict(q) for q in self.checklist.questions.values()],
            "answers": {qid: answer_dict(a) for qid, a in sorted(self.answers.items())},
            "regulator_records": [
                {
                    "decision": r.decision,
                    "flagged_questions": list(r.flagged_questions),
                    "comment": r.comment,
                    "timestamp": r.timestamp,
                    "seq": r.seq,
                }
                for r in self.regulator_records
            ],
            "goal_graph": {
                "nodes": [node_dict(n) for n in self.goal_graph.nodes.values()],
                "links": [
                    {"source": l.source, "target": l.target, "kind": l.kind}
                    for l in self.goal_graph.links
                ],
            },
        }
        doc.update(self.extra)
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "AssuranceCase":
        known = {
            "schema_version",
            "id",
            "title",
            "principles",
            "elements",
            "links",
            "questions",
            "answers",
            "regulator_records",
            "goal_graph",
        }
        case = cls(doc["id"], doc.get("title", ""))
        case.schema_version = doc.get("schema_version", SCHEMA_VERSION)
        case.extra = {k: v for k, v in doc.items() if k not in known}
        for p in doc.get("principles", []):
            principle = Principle(p["id"], p.get("title", ""))
            for s in p.get("segments", []):
                principle.segments[s["id"]] = s.get("title", "")
            case.principles[principle.id] = principle
        for e in doc.get("elements", []):
            element = CaseElement(
                id=e["id"],
                kind=ElementKind(e["kind"]),
                principle=e["principle"],
                segment=e["segment"],
                description=e["description"],
                verification=(
                    VerificationMethod(e["verification"]) if e.get("verification") else None
                ),
                lifecycle_stage=e.get("lifecycle_stage"),
                control_action=e.get("control_action"),
                uaia_mode=UaiaMode(e["uaia_mode"]) if e.get("uaia_mode") else None,
            )
            case.elements[element.id] = element
        for l in doc.get("links", []):
            case.links.append(TraceLink(l["source"], l["target"], LinkKind(l["kind"])))
        for q in doc.get("questions", []):
            qtype = QuestionType(
                kind=q["type"]["kind"],
                options=tuple(q["type"].get("options", ())),
                metric=q["type"].get("metric"),
            )
            question = Question(
                id=q["id"],
                principle=q["principle"],
                segment=q["segment"],
                stage=q["stage"],
                qtype=qtype,
                text=q["text"],
                desideratum=q.get("desideratum", "Relevant"),
                requirement_links=tuple(q.get("requirement_links", ())),
                retired=q.get("retired", False),
            )
            case.checklist.questions[question.id] = question
        for qid, a in doc.get("answers", {}).items():
            content_doc = a["content"]
            if content_doc["type"] == "choice":
                content = Choice(content_doc["index"])
            elif content_doc["type"] == "text":
                content = Text(content_doc["body"])
            else:
                content = MetricResult(
                    metric=content_doc["metric"],
                    value=content_doc.get("value"),
                    inputs_digest=content_doc["inputs_digest"],
                    error=content_doc.get("error"),
                )
            answer = Answer(
                question_id=qid,
                content=content,
                status=AnswerStatus(a["status"]),
                version=a.get("version", 0),
            )
            for c in a.get("comments", []):
                answer.comments.append(
                    ReviewComment(
                        author_role=StakeholderRole(c["author_role"]),
                        verdict=ReviewVerdict(c["verdict"]),
                        text=c["text"],
                        timestamp=c["timestamp"],
                        answer_version=c["answer_version"],
                    )
                )
            case.answers[qid] = answer
        for r in doc.get("regulator_records", []):
            case.regulator_records.append(
                RegulatorRecord(
                    decision=r["decision"],
                    flagged_questions=tuple(r.get("flagged_questions", ())),
                    comment=r.get("comment", ""),
                    timestamp=r["timestamp"],
                    seq=r["seq"],
                )
            )
        graph_doc = doc.get("goal_graph", {})
        for n in graph_doc.get("nodes", []):
            case.goal_graph.nodes[n["id"]] = GoalNode(
                id=n["id"],
                kind=n.get("kind", "goal"),
                label=n.get("label", ""),
                actor=n.get("actor"),
                satisfaction=n.get("satisfaction"),
                bound_element=n.get("bound_element"),
                mitigates=n.get("mitigates"),
            )
        for l in graph_doc.get("links", []):
            from .goals import GoalLink

            case.goal_graph.links.append(GoalLink(l["source"], l["target"], l["kind"]))
        return case
