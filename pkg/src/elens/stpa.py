"""Ethical process analysis: system states, action slots, trace matrix.

The analysis distinguishes three system states (safe, hazard, loss); losses
arise only via hazard states. Control actions are examined in two modes
(provided / not provided), each of which should be covered by an identified
unethical action. The trace matrix joins every requirement through its
recommendation and constraint back to the losses it guards against.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING

from .errors import IllegalTransitionError, IncompleteCaseError, KindMismatchError
from .model import ElementKind, LinkKind, UaiaMode

if TYPE_CHECKING:
    from .model import AssuranceCase


class EthicalState(str, Enum):
    SAFE = "Safe"
    HAZARD = "HazardState"
    LOSS = "LossState"


class StateEvent(str, Enum):
    HAZARD_RAISED = "HazardRaised"
    HAZARD_MITIGATED = "HazardMitigated"
    LOSS_REALIZED = "LossRealized"
    LOSS_RECOVERED = "LossRecovered"


# Defined transitions (5 of the 12 state/event cells). Raising a further
# hazard while already in the hazard state is legal and stays there; a loss
# can never be realized straight from the safe state.
STATE_TRANSITIONS: dict[tuple[EthicalState, StateEvent], EthicalState] = {
    (EthicalState.SAFE, StateEvent.HAZARD_RAISED): EthicalState.HAZARD,
    (EthicalState.HAZARD, StateEvent.HAZARD_RAISED): EthicalState.HAZARD,
    (EthicalState.HAZARD, StateEvent.HAZARD_MITIGATED): EthicalState.SAFE,
    (EthicalState.HAZARD, StateEvent.LOSS_REALIZED): EthicalState.LOSS,
    (EthicalState.LOSS, StateEvent.LOSS_RECOVERED): EthicalState.HAZARD,
}


def transition(state: EthicalState, event: StateEvent) -> EthicalState:
    try:
        return STATE_TRANSITIONS[(state, event)]
    except KeyError:
        raise IllegalTransitionError(
            f"event {event.value} is illegal in state {state.value}"
        ) from None


def classify_state(
    case: "AssuranceCase",
    active_hazards: set[str],
    realized_losses: set[str],
) -> EthicalState:
    """State of the system given which hazards are active and which losses
    have been realized; a realized loss dominates."""
    for hazard_id in active_hazards:
        element = case.require_element(hazard_id)
        if element.kind is not ElementKind.HAZARD:
            raise KindMismatchError(f"{hazard_id} is a {element.kind.value}, not a hazard")
    for loss_id in realized_losses:
        element = case.require_element(loss_id)
        if element.kind is not ElementKind.LOSS:
            raise KindMismatchError(f"{loss_id} is a {element.kind.value}, not a loss")
    if realized_losses:
        return EthicalState.LOSS
    if active_hazards:
        return EthicalState.HAZARD
    return EthicalState.SAFE


@dataclass(frozen=True)
class UaiaSlot:
    control_action: str
    mode: UaiaMode
    filled_by: str | None  # unethical-action element, when identified


def enumerate_uaia_slots(case: "AssuranceCase", control_action: str) -> list[UaiaSlot]:
    """The two analysis slots of a control action (provided / not
    provided); an unfilled slot marks an analysis gap."""
    element = case.require_element(control_action)
    if element.kind is not ElementKind.CONTROL_ACTION:
        raise KindMismatchError(
            f"{control_action} is a {element.kind.value}, not a control action"
        )
    hazard_linked = {
        l.source for l in case.links if l.kind is LinkKind.UAIA_OF_HAZARD
    }
    slots = []
    for mode in (UaiaMode.PROVIDED, UaiaMode.NOT_PROVIDED):
        candidates = sorted(
            e.id
            for e in case.elements.values()
            if e.kind is ElementKind.UAIA
            and e.control_action == control_action
            and e.uaia_mode is mode
            and e.id in hazard_linked
        )
        slots.append(UaiaSlot(control_action, mode, candidates[0] if candidates else None))
    return slots


@dataclass(frozen=True)
class MatrixRow:
    requirement: str
    recommendation: str
    constraint: str
    uaia_or_hazard: str
    losses: tuple[str, ...]


@dataclass(frozen=True)
class TraceMatrix:
    rows: tuple[MatrixRow, ...]

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["requirement", "recommendation", "constraint", "uaia_or_hazard", "losses"])
        for row in self.rows:
            writer.writerow(
                [
                    row.requirement,
                    row.recommendation,
                    row.constraint,
                    row.uaia_or_hazard,
                    ";".join(row.losses),
                ]
            )
        return buffer.getvalue()

    def to_json_obj(self) -> list[dict]:
        return [
            {
                "requirement": r.requirement,
                "recommendation": r.recommendation,
                "constraint": r.constraint,
                "uaia_or_hazard": r.uaia_or_hazard,
                "losses": list(r.losses),
            }
            for r in self.rows
        ]


def _reachable_losses(case: "AssuranceCase", start: str) -> tuple[str, ...]:
    links = case.element_links()
    seen = {start}
    frontier = [start]
    losses = set()
    while frontier:
        node = frontier.pop()
        if case.elements[node].kind is ElementKind.LOSS:
            losses.add(node)
        for link in links:
            if link.source == node and link.target not in seen:
                seen.add(link.target)
                frontier.append(link.target)
    return tuple(sorted(losses))


def build_trace_matrix(case: "AssuranceCase") -> TraceMatrix:
    """One row per requirement -> recommendation -> constraint path, joined
    through to the losses; only complete cases have a well-defined matrix."""
    violations = case.completeness_check()
    if violations:
        raise IncompleteCaseError(
            f"case has {len(violations)} completeness violation(s)", violations=violations
        )
    req_links = [l for l in case.links if l.kind is LinkKind.REQUIREMENT_OF_RECOMMENDATION]
    rec_links = [l for l in case.links if l.kind is LinkKind.RECOMMENDATION_OF_CONSTRAINT]
    con_links = [
        l
        for l in case.links
        if l.kind in (LinkKind.CONSTRAINT_OF_HAZARD, LinkKind.CONSTRAINT_OF_UAIA)
    ]

    rows = []
    for rl in req_links:
        for dl in rec_links:
            if dl.source != rl.target:
                continue
            for cl in con_links:
                if cl.source != dl.target:
                    continue
                rows.append(
                    MatrixRow(
                        requirement=rl.source,
                        recommendation=rl.target,
                        constraint=dl.target,
                        uaia_or_hazard=cl.target,
                        losses=_reachable_losses(case, cl.target),
                    )
                )
    rows.sort(key=lambda r: (r.requirement, r.recommendation, r.constraint, r.uaia_or_hazard))
    return TraceMatrix(rows=tuple(rows))
