"""Goal graph with bottom-up satisfaction propagation.

Nodes follow the goal-modeling vocabulary (goal, softgoal, task, resource,
belief) and carry satisfaction in [-100, 100]. Links are either
decompositions (AND/OR, child -> parent), weighted contributions
(contributor -> recipient), or structural dependencies that never alter
satisfaction. Propagation is deterministic:

    AND parent   = min(children)
    OR parent    = max(children)
    contribution = clamp(trunc(sum(child * weight) / 100), -100, 100)

A node may receive decomposition links or contribution links, never both.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    CyclicGraphError,
    DuplicateIdError,
    DuplicateLinkError,
    MixedDecompositionError,
    MixedIncomingError,
    NotALeafError,
    OutOfRangeError,
    UnassignedLeafError,
    UnknownNodeError,
)

SAT_MIN = -100
SAT_MAX = 100

NODE_KINDS = ("goal", "softgoal", "task", "resource", "belief")

AND = "and"
OR = "or"
DEPENDENCY = "dependency"
DECOMPOSITION_KINDS = (AND, OR)

CONTRIBUTION_WEIGHTS = {
    "make": 100,
    "help": 50,
    "somepositive": 25,
    "unknown": 0,
    "somenegative": -25,
    "hurt": -50,
    "break": -100,
}

LINK_KINDS = DECOMPOSITION_KINDS + tuple(CONTRIBUTION_WEIGHTS) + (DEPENDENCY,)


@dataclass
class GoalNode:
    """One intentional element of the graph.

    ``bound_element`` ties a leaf to a requirement whose review acceptance
    drives its satisfaction; ``mitigates`` tags the node as the mitigation
    claim for one hazard (or unethical-action) element.
    """

    id: str
    kind: str = "goal"
    label: str = ""
    actor: str | None = None
    satisfaction: int | None = None
    bound_element: str | None = None
    mitigates: str | None = None

    def __post_init__(self):
        if self.kind not in NODE_KINDS:
            raise OutOfRangeError(f"unknown node kind {self.kind!r}", field="kind")
        if self.satisfaction is not None:
            _check_range(self.satisfaction)


@dataclass(frozen=True)
class GoalLink:
    source: str
    target: str
    kind: str


@dataclass(frozen=True)
class Verdict:
    mitigated: bool
    root_satisfaction: int
    unresolved: tuple[str, ...]


def _check_range(value: int) -> None:
    if not isinstance(value, int) or isinstance(value, bool):
        raise OutOfRangeError(f"satisfaction must be an integer, got {value!r}")
    if not SAT_MIN <= value <= SAT_MAX:
        raise OutOfRangeError(f"satisfaction {value} outside [{SAT_MIN}, {SAT_MAX}]")


def _trunc_div_100(total: int) -> int:
    # integer division truncating toward zero, so +/- mirror each other
    if total >= 0:
        return total // 100
    return -((-total) // 100)


class GoalGraph:
    """Mutable container for nodes and links; evaluation itself is pure."""

    def __init__(self):
        self.nodes: dict[str, GoalNode] = {}
        self.links: list[GoalLink] = []

    def __len__(self) -> int:
        return len(self.nodes)

    # -- construction -------------------------------------------------

    def add_node(self, node: GoalNode) -> GoalNode:
        if node.id in self.nodes:
            raise DuplicateIdError(f"goal node {node.id} already defined", field="id")
        self.nodes[node.id] = node
        return node

    def _require(self, node_id: str) -> GoalNode:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise UnknownNodeError(f"unknown goal node {node_id}") from None

    def _add_link(self, link: GoalLink) -> None:
        if link in self.links:
            raise DuplicateLinkError(
                f"duplicate goal link {link.source} -> {link.target} ({link.kind})"
            )
        self.links.append(link)

    def add_decomposition(self, parent: str, children: list[str], kind: str = AND) -> None:
        if kind not in DECOMPOSITION_KINDS:
            raise MixedDecompositionError(f"unknown decomposition kind {kind!r}")
        self._require(parent)
        existing = {
            link.kind
            for link in self.links
            if link.target == parent and link.kind in DECOMPOSITION_KINDS
        }
        if existing and existing != {kind}:
            raise MixedDecompositionError(
                f"node {parent} already has {existing.pop()}-decomposition children"
            )
        for child in children:
            self._require(child)
            if child == parent:
                raise MixedDecompositionError(f"node {parent} cannot decompose into itself")
            self._add_link(GoalLink(child, parent, kind))

    def add_contribution(self, source: str, target: str, kind: str) -> None:
        if kind not in CONTRIBUTION_WEIGHTS:
            raise OutOfRangeError(f"unknown contribution kind {kind!r}", field="kind")
        self._require(source)
        self._require(target)
        if source == target:
            raise CyclicGraphError(f"node {source} cannot contribute to itself")
        self._add_link(GoalLink(source, target, kind))

    def add_dependency(self, source: str, target: str) -> None:
        self._require(source)
        self._require(target)
        self._add_link(GoalLink(source, target, DEPENDENCY))

    # -- structure queries --------------------------------------------

    def incoming(self, node_id: str) -> tuple[list[GoalLink], list[GoalLink]]:
        """(decomposition links, contribution links) arriving at a node."""
        decomp = [l for l in self.links if l.target == node_id and l.kind in DECOMPOSITION_KINDS]
        contrib = [l for l in self.links if l.target == node_id and l.kind in CONTRIBUTION_WEIGHTS]
        return decomp, contrib

    def is_leaf(self, node_id: str) -> bool:
        self._require(node_id)
        decomp, contrib = self.incoming(node_id)
        return not decomp and not contrib

    def leaves(self) -> list[str]:
        return sorted(n for n in self.nodes if self.is_leaf(n))

    def roots(self) -> list[str]:
        """Nodes that feed no decomposition or contribution upward."""
        non_roots = {
            l.source for l in self.links if l.kind in DECOMPOSITION_KINDS or l.kind in CONTRIBUTION_WEIGHTS
        }
        return sorted(n for n in self.nodes if n not in non_roots)

    # -- evaluation ----------------------------------------------------

    def assign_leaf(self, node_id: str, satisfaction: int) -> None:
        node = self._require(node_id)
        if not self.is_leaf(node_id):
            raise NotALeafError(f"node {node_id} has incoming links; only leaves are assignable")
        _check_range(satisfaction)
        node.satisfaction = satisfaction

    def topological_order(self) -> list[str]:
        """Kahn's algorithm over evaluation edges; ties broken by node id."""
        edges = [l for l in self.links if l.kind != DEPENDENCY]
        indegree = {n: 0 for n in self.nodes}
        for link in edges:
            indegree[link.target] += 1
        ready = sorted(n for n, d in indegree.items() if d == 0)
        order: list[str] = []
        while ready:
            node = ready.pop(0)
            order.append(node)
            freed = []
            for link in edges:
                if link.source == node:
                    indegree[link.target] -= 1
                    if indegree[link.target] == 0:
                        freed.append(link.target)
            ready = sorted(set(ready) | set(freed))
        if len(order) != len(self.nodes):
            stuck = sorted(set(self.nodes) - set(order))
            raise CyclicGraphError(f"goal graph has a cycle through {', '.join(stuck)}")
        return order

    def propagate(
        self,
        order: list[str] | None = None,
        overrides: dict[str, int] | None = None,
    ) -> dict[str, int]:
        """Evaluate every node bottom-up.

        ``order`` may supply an alternative topological order (validated);
        ``overrides`` substitutes leaf satisfactions without mutating nodes.
        """
        overrides = overrides or {}
        for node_id in self.nodes:
            decomp, contrib = self.incoming(node_id)
            if decomp and contrib:
                raise MixedIncomingError(
                    f"node {node_id} receives both decomposition and contribution links"
                )

        if order is None:
            order = self.topological_order()
        else:
            self._validate_order(order)

        values: dict[str, int] = {}
        for node_id in order:
            node = self.nodes[node_id]
            decomp, contrib = self.incoming(node_id)
            if decomp:
                kinds = {l.kind for l in decomp}
                if len(kinds) != 1:
                    raise MixedDecompositionError(
                        f"node {node_id} mixes AND and OR decomposition"
                    )
                child_values = [values[l.source] for l in decomp]
                values[node_id] = min(child_values) if kinds == {AND} else max(child_values)
            elif contrib:
                total = sum(values[l.source] * CONTRIBUTION_WEIGHTS[l.kind] for l in contrib)
                values[node_id] = max(SAT_MIN, min(SAT_MAX, _trunc_div_100(total)))
            else:
                sat = overrides.get(node_id, node.satisfaction)
                if sat is None:
                    raise UnassignedLeafError(f"leaf {node_id} has no satisfaction assigned")
                _check_range(sat)
                values[node_id] = sat
        return values

    def _validate_order(self, order: list[str]) -> None:
        if sorted(order) != sorted(self.nodes):
            raise CyclicGraphError("evaluation order must be a permutation of all nodes")
        position = {n: i for i, n in enumerate(order)}
        for link in self.links:
            if link.kind == DEPENDENCY:
                continue
            if position[link.source] > position[link.target]:
                raise CyclicGraphError(
                    f"order violates dependency {link.source} -> {link.target}"
                )

    # -- export ---------------------------------------------------------

    def to_dot(self, values: dict[str, int] | None = None) -> str:
        """DOT text for external rendering: node label = id + satisfaction."""
        lines = ["digraph goals {"]
        for node_id in sorted(self.nodes):
            node = self.nodes[node_id]
            sat = (values or {}).get(node_id, node.satisfaction)
            sat_text = "?" if sat is None else str(sat)
            shape = {"task": "hexagon", "resource": "box", "belief": "ellipse"}.get(
                node.kind, "box" if node.kind == "goal" else "oval"
            )
            lines.append(f'  "{node_id}" [label="{node_id}\\n{sat_text}" shape={shape}];')
        for link in sorted(self.links, key=lambda l: (l.source, l.target, l.kind)):
            style = ' style=dashed' if link.kind == DEPENDENCY else ""
            lines.append(f'  "{link.source}" -> "{link.target}" [label="{link.kind}"{style}];')
        lines.append("}")
        return "\n".join(lines) + "\n"

def graph_verdict(graph: GoalGraph, values: dict[str, int], threshold: int = 100) -> Verdict:
    """Mitigation verdict over already-propagated values."""
    roots = graph.roots()
    root_satisfaction = min((values[r] for r in roots), default=0)
    unresolved = tuple(
        sorted(
            nid
            for nid, node in graph.nodes.items()
            if node.mitigates is not None and values.get(nid, SAT_MIN) < threshold
        )
    )
    mitigated = root_satisfaction >= threshold and not unresolved
    return Verdict(mitigated=mitigated, root_satisfaction=root_satisfaction, unresolved=unresolved)


def bound_leaf_overrides(case) -> dict[str, int]:
    """Leaf satisfactions induced by requirement review acceptance.

    A leaf bound to a requirement evaluates to 100 exactly when every
    checklist question linked to that requirement has an accepted answer,
    and to 0 otherwise.
    """
    from .workflow import accepted_requirements  # local import: avoids module cycle

    accepted = accepted_requirements(case)
    overrides: dict[str, int] = {}
    for node_id, node in case.goal_graph.nodes.items():
        if node.bound_element is not None and case.goal_graph.is_leaf(node_id):
            overrides[node_id] = 100 if accepted.get(node.bound_element, False) else 0
    return overrides


def case_verdict(case, threshold: int = 100) -> Verdict:
    """Evaluate the case's goal graph and report whether every tagged
    hazard-mitigation node clears the threshold."""
    graph: GoalGraph = case.goal_graph
    if not graph.nodes:
        return Verdict(mitigated=0 >= threshold, root_satisfaction=0, unresolved=())
    values = graph.propagate(overrides=bound_leaf_overrides(case))
    return graph_verdict(graph, values, threshold)


def gate_segments(case, principle: str, threshold: int = 100) -> list[tuple[str, bool]]:
    """Check a principle's segments in declared order, stopping at the
    first failure; the principle holds only if every entry passes."""
    from .errors import UnknownPrincipleError

    if principle not in case.principles:
        raise UnknownPrincipleError(f"unknown principle {principle}")
    graph: GoalGraph = case.goal_graph
    values = graph.propagate(overrides=bound_leaf_overrides(case)) if graph.nodes else {}

    mitigation_by_segment: dict[str, list[str]] = {}
    for node_id, node in graph.nodes.items():
        if node.mitigates is None:
            continue
        element = case.elements.get(node.mitigates)
        if element is not None and element.principle == principle:
            mitigation_by_segment.setdefault(element.segment, []).append(node_id)

    results: list[tuple[str, bool]] = []
    for segment in case.principles[principle].segments:
        nodes = mitigation_by_segment.get(segment, [])
        ok = all(values[n] >= threshold for n in nodes)
        results.append((segment, ok))
        if not ok:
            break
    return results
