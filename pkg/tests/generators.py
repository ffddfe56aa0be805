"""Seeded random generators shared by property and acceptance tests.

The goal-graph oracle here deliberately re-implements the propagation rules
as plain recursion so the iterative evaluator is checked against an
independent formulation.
"""

from __future__ import annotations

import random

from elens.checklist import Question, QuestionType, register_question
from elens.goals import CONTRIBUTION_WEIGHTS, GoalGraph, GoalNode
from elens.model import (
    AssuranceCase,
    CaseElement,
    ElementKind,
    LinkKind,
    TraceLink,
    UaiaMode,
    VerificationMethod,
)
from elens.vocab import DESIDERATA, LIFECYCLE_STAGES, METRIC_NAMES

_WORDS = (
    "documentation", "explanation", "model", "data", "shortlist", "privacy",
    "owner", "method", "outputs", "recruiters", "applicants", "fairness",
    "decision", "evidence", "monitoring", "training",
)
_TRICKY = ('quoted "term"', "back\\slash", "line\nbreak", "tab\tstop", "trailing space ")

_LINK_TARGET_KIND = {
    ElementKind.HAZARD: (ElementKind.LOSS, LinkKind.HAZARD_OF_LOSS),
    ElementKind.UAIA: (ElementKind.HAZARD, LinkKind.UAIA_OF_HAZARD),
    ElementKind.CAUSAL_SCENARIO: (ElementKind.UAIA, LinkKind.SCENARIO_OF_UAIA),
    ElementKind.DESIGN_RECOMMENDATION: (ElementKind.CONSTRAINT, LinkKind.RECOMMENDATION_OF_CONSTRAINT),
    ElementKind.REQUIREMENT: (ElementKind.DESIGN_RECOMMENDATION, LinkKind.REQUIREMENT_OF_RECOMMENDATION),
    ElementKind.EVIDENCE: (ElementKind.REQUIREMENT, LinkKind.EVIDENCE_OF_REQUIREMENT),
}


def _text(rng: random.Random) -> str:
    words = [rng.choice(_WORDS) for _ in range(rng.randint(1, 5))]
    if rng.random() < 0.15:
        words.append(rng.choice(_TRICKY))
    return " ".join(words)


def random_case(rng: random.Random) -> AssuranceCase:
    """A structurally valid random case touching every DSL construct."""
    case = AssuranceCase(f"case{rng.randint(0, 9999)}", _text(rng) if rng.random() < 0.7 else "")
    counters: dict[str, int] = {}

    def fresh(prefix: str) -> str:
        counters[prefix] = counters.get(prefix, 0) + 1
        return f"{prefix}{counters[prefix]}"

    pools: dict[ElementKind, list[str]] = {kind: [] for kind in ElementKind}
    segments: list[tuple[str, str]] = []
    for _ in range(rng.randint(1, 3)):
        pid = fresh("p")
        case.add_principle(pid, _text(rng) if rng.random() < 0.5 else "")
        for _ in range(rng.randint(1, 3)):
            sid = fresh("s")
            case.add_segment(pid, sid, _text(rng) if rng.random() < 0.5 else "")
            segments.append((pid, sid))

    kind_prefix = {
        ElementKind.LOSS: "L",
        ElementKind.HAZARD: "H",
        ElementKind.CONTROL_ACTION: "CA",
        ElementKind.UAIA: "UAIA",
        ElementKind.CAUSAL_SCENARIO: "CS",
        ElementKind.CONSTRAINT: "EC",
        ElementKind.DESIGN_RECOMMENDATION: "DR",
        ElementKind.REQUIREMENT: "R",
        ElementKind.EVIDENCE: "EV",
    }
    # build in dependency order so link targets already exist
    build_order = (
        ElementKind.LOSS,
        ElementKind.HAZARD,
        ElementKind.CONTROL_ACTION,
        ElementKind.UAIA,
        ElementKind.CAUSAL_SCENARIO,
        ElementKind.CONSTRAINT,
        ElementKind.DESIGN_RECOMMENDATION,
        ElementKind.REQUIREMENT,
        ElementKind.EVIDENCE,
    )
    for kind in build_order:
        for _ in range(rng.randint(0, 3)):
            pid, sid = rng.choice(segments)
            element_id = fresh(kind_prefix[kind])
            annotation: dict = {}
            if kind is ElementKind.UAIA and pools[ElementKind.CONTROL_ACTION] and rng.random() < 0.7:
                annotation = {
                    "control_action": rng.choice(pools[ElementKind.CONTROL_ACTION]),
                    "uaia_mode": rng.choice(list(UaiaMode)),
                }
            case.add_element(
                CaseElement(
                    id=element_id,
                    kind=kind,
                    principle=pid,
                    segment=sid,
                    description=_text(rng),
                    verification=(
                        rng.choice(list(VerificationMethod))
                        if kind is ElementKind.REQUIREMENT
                        else None
                    ),
                    lifecycle_stage=(
                        rng.choice(LIFECYCLE_STAGES) if rng.random() < 0.3 else None
                    ),
                    **annotation,
                )
            )
            pools[kind].append(element_id)
            if kind in _LINK_TARGET_KIND:
                target_kind, link_kind = _LINK_TARGET_KIND[kind]
                targets = pools[target_kind]
                for target in rng.sample(targets, min(len(targets), rng.randint(0, 2))):
                    case.add_link(TraceLink(element_id, target, link_kind))
            if kind is ElementKind.CONSTRAINT:
                for target_kind, link_kind in (
                    (ElementKind.HAZARD, LinkKind.CONSTRAINT_OF_HAZARD),
                    (ElementKind.UAIA, LinkKind.CONSTRAINT_OF_UAIA),
                ):
                    targets = pools[target_kind]
                    if targets and rng.random() < 0.5:
                        case.add_link(TraceLink(element_id, rng.choice(targets), link_kind))

    for _ in range(rng.randint(0, 4)):
        pid, sid = rng.choice(segments)
        roll = rng.random()
        if roll < 0.4:
            qtype = QuestionType("extended")
        elif roll < 0.7:
            qtype = QuestionType(
                "choice",
                options=tuple(f"{_text(rng)} #{i}" for i in range(rng.randint(2, 4))),
            )
        else:
            qtype = QuestionType("metric", metric=rng.choice(METRIC_NAMES))
        reqs = pools[ElementKind.REQUIREMENT]
        register_question(
            case,
            Question(
                id=fresh("Q"),
                principle=pid,
                segment=sid,
                stage=rng.choice(LIFECYCLE_STAGES),
                qtype=qtype,
                text=_text(rng),
                desideratum=rng.choice(DESIDERATA),
                requirement_links=tuple(
                    rng.sample(reqs, min(len(reqs), rng.randint(0, 2)))
                ),
            ),
        )

    _random_goal_layer(case, rng, pools)
    return case


def _random_goal_layer(case: AssuranceCase, rng: random.Random, pools) -> None:
    graph = case.goal_graph
    count = rng.randint(0, 6)
    ids = [f"g{i}" for i in range(count)]
    for i, node_id in enumerate(ids):
        mitigatable = pools[ElementKind.HAZARD] + pools[ElementKind.UAIA]
        graph.add_node(
            GoalNode(
                id=node_id,
                kind=rng.choice(("goal", "softgoal", "task", "resource", "belief")),
                label=_text(rng) if rng.random() < 0.7 else "",
                satisfaction=rng.randint(-100, 100) if rng.random() < 0.5 else None,
                bound_element=(
                    rng.choice(pools[ElementKind.REQUIREMENT])
                    if pools[ElementKind.REQUIREMENT] and rng.random() < 0.3
                    else None
                ),
                mitigates=(
                    rng.choice(mitigatable) if mitigatable and rng.random() < 0.3 else None
                ),
            )
        )
        if i == 0:
            continue
        roll = rng.random()
        sources = rng.sample(ids[:i], rng.randint(1, min(3, i)))
        if roll < 0.3:
            continue
        if roll < 0.6:
            graph.add_decomposition(node_id, sources, rng.choice(("and", "or")))
        elif roll < 0.85:
            for source in sources:
                graph.add_contribution(source, node_id, rng.choice(list(CONTRIBUTION_WEIGHTS)))
        else:
            graph.add_dependency(sources[0], node_id)


# ---------------------------------------------------------------------------
# Goal-graph DAGs and the independent recursive oracle


def random_goal_dag(rng: random.Random, max_nodes: int = 8) -> GoalGraph:
    """Random DAG with every leaf assigned, ready to propagate."""
    graph = GoalGraph()
    count = rng.randint(1, max_nodes)
    ids = [f"n{i}" for i in range(count)]
    for i, node_id in enumerate(ids):
        graph.add_node(GoalNode(id=node_id, kind="goal"))
        if i == 0:
            continue
        roll = rng.random()
        if roll < 0.25:
            continue
        sources = rng.sample(ids[:i], rng.randint(1, min(3, i)))
        if roll < 0.65:
            graph.add_decomposition(node_id, sources, rng.choice(("and", "or")))
        else:
            for source in sources:
                graph.add_contribution(source, node_id, rng.choice(list(CONTRIBUTION_WEIGHTS)))
    for node_id in graph.leaves():
        graph.assign_leaf(node_id, rng.randint(-100, 100))
    return graph


def oracle_propagate(graph: GoalGraph) -> dict[str, int]:
    """Plain recursive evaluation of the propagation rules."""
    memo: dict[str, int] = {}

    def value(node_id: str) -> int:
        if node_id in memo:
            return memo[node_id]
        decomp, contrib = graph.incoming(node_id)
        if decomp:
            child_values = [value(link.source) for link in decomp]
            result = min(child_values) if decomp[0].kind == "and" else max(child_values)
        elif contrib:
            total = sum(
                value(link.source) * CONTRIBUTION_WEIGHTS[link.kind] for link in contrib
            )
            result = max(-100, min(100, int(total / 100)))  # int() truncates toward zero
        else:
            result = graph.nodes[node_id].satisfaction
        memo[node_id] = result
        return result

    return {node_id: value(node_id) for node_id in graph.nodes}


def random_topological_order(graph: GoalGraph, rng: random.Random) -> list[str]:
    """A uniformly shuffled valid topological order (independent of the
    implementation's tie-breaking)."""
    edges = [(l.source, l.target) for l in graph.links if l.kind != "dependency"]
    indegree = {n: 0 for n in graph.nodes}
    for _, target in edges:
        indegree[target] += 1
    ready = [n for n, d in indegree.items() if d == 0]
    order = []
    while ready:
        node = ready.pop(rng.randrange(len(ready)))
        order.append(node)
        for source, target in edges:
            if source == node:
                indegree[target] -= 1
                if indegree[target] == 0:
                    ready.append(target)
    return order
