import random

import pytest
from hypothesis import given, settings, strategies as st

from elens.errors import (
    DuplicateIdError,
    DuplicateLinkError,
    InvalidElementError,
    KindMismatchError,
    UnknownElementError,
    UnknownEndpointError,
    UnknownPrincipleError,
)
from elens.model import (
    AssuranceCase,
    CaseElement,
    ElementKind,
    LinkKind,
    TraceLink,
    VerificationMethod,
)

from generators import random_case


def blank_case() -> AssuranceCase:
    case = AssuranceCase("t", "test case")
    case.add_principle("transparency")
    case.add_segment("transparency", "traceability")
    case.add_segment("transparency", "explainability")
    return case


def element(eid, kind, segment="traceability", **kwargs) -> CaseElement:
    return CaseElement(
        id=eid,
        kind=kind,
        principle="transparency",
        segment=segment,
        description=kwargs.pop("description", f"element {eid}"),
        **kwargs,
    )


class TestAddElement:
    def test_add_loss(self):
        case = blank_case()
        case.add_element(
            element(
                "L1",
                ElementKind.LOSS,
                description="Loss of documentation related to data, its collection, and preprocessing",
            )
        )
        assert "L1" in case.elements
        assert case.elements["L1"].kind is ElementKind.LOSS

    def test_duplicate_id(self):
        case = blank_case()
        case.add_element(element("L1", ElementKind.LOSS))
        with pytest.raises(DuplicateIdError):
            case.add_element(element("L1", ElementKind.LOSS))

    def test_requirement_needs_verification(self):
        case = blank_case()
        with pytest.raises(InvalidElementError):
            case.add_element(element("R1", ElementKind.REQUIREMENT))

    def test_verification_only_on_requirements(self):
        case = blank_case()
        with pytest.raises(InvalidElementError):
            case.add_element(
                element("L1", ElementKind.LOSS, verification=VerificationMethod.DEMONSTRATION)
            )

    def test_empty_description(self):
        case = blank_case()
        with pytest.raises(InvalidElementError):
            case.add_element(element("L1", ElementKind.LOSS, description="   "))

    @pytest.mark.parametrize("bad_id", ["", "1L", "L 1", "L1.", "L-1", "L1..2"])
    def test_malformed_ids(self, bad_id):
        case = blank_case()
        with pytest.raises(InvalidElementError):
            case.add_element(element(bad_id, ElementKind.LOSS))

    @pytest.mark.parametrize("good_id", ["A", "L1", "UAIA101", "DR101.1", "R101.1.2"])
    def test_wellformed_ids(self, good_id):
        case = blank_case()
        case.add_element(element(good_id, ElementKind.CONTROL_ACTION if good_id == "A" else ElementKind.LOSS))

    def test_undeclared_principle(self):
        case = AssuranceCase("t")
        with pytest.raises(UnknownPrincipleError):
            case.add_element(element("L1", ElementKind.LOSS))


class TestAddLink:
    def _case_with_chain(self):
        case = blank_case()
        case.add_element(element("L6", ElementKind.LOSS, "explainability"))
        case.add_element(element("H7", ElementKind.HAZARD, "explainability"))
        case.add_element(element("UAIA101", ElementKind.UAIA, "explainability"))
        return case

    def test_hazard_of_loss(self):
        case = self._case_with_chain()
        case.add_link(TraceLink("H7", "L6", LinkKind.HAZARD_OF_LOSS))
        assert TraceLink("H7", "L6", LinkKind.HAZARD_OF_LOSS) in case.links

    def test_reversed_direction_is_kind_mismatch(self):
        case = self._case_with_chain()
        with pytest.raises(KindMismatchError):
            case.add_link(TraceLink("L6", "H7", LinkKind.HAZARD_OF_LOSS))

    def test_uaia_of_hazard(self):
        case = self._case_with_chain()
        case.add_link(TraceLink("UAIA101", "H7", LinkKind.UAIA_OF_HAZARD))

    def test_unknown_endpoint(self):
        case = self._case_with_chain()
        with pytest.raises(UnknownEndpointError):
            case.add_link(TraceLink("H7", "L9", LinkKind.HAZARD_OF_LOSS))

    def test_duplicate_link(self):
        case = self._case_with_chain()
        case.add_link(TraceLink("H7", "L6", LinkKind.HAZARD_OF_LOSS))
        with pytest.raises(DuplicateLinkError):
            case.add_link(TraceLink("H7", "L6", LinkKind.HAZARD_OF_LOSS))


class TestTraces:
    def test_diamond_final_hop(self):
        # one hazard linked to two losses: the last backward hop holds both
        case = blank_case()
        case.add_element(element("L1", ElementKind.LOSS))
        case.add_element(element("L2", ElementKind.LOSS))
        case.add_element(element("H1", ElementKind.HAZARD))
        case.add_element(element("UAIA1", ElementKind.UAIA))
        case.add_link(TraceLink("H1", "L1", LinkKind.HAZARD_OF_LOSS))
        case.add_link(TraceLink("H1", "L2", LinkKind.HAZARD_OF_LOSS))
        case.add_link(TraceLink("UAIA1", "H1", LinkKind.UAIA_OF_HAZARD))

        # independent reachability oracle on the 4-node graph
        edges = {("H1", "L1"), ("H1", "L2"), ("UAIA1", "H1")}
        reachable = set()
        frontier = {"UAIA1"}
        while frontier:
            frontier = {t for (s, t) in edges if s in frontier}
            reachable |= frontier
        hops = case.trace_backward("UAIA1")
        assert {h for hop in hops for h in hop} == reachable
        assert hops == [["H1"], ["L1", "L2"]]

    def test_losses_are_roots(self):
        case = blank_case()
        case.add_element(element("L1", ElementKind.LOSS))
        assert case.trace_backward("L1") == []

    def test_unknown_element(self):
        case = blank_case()
        with pytest.raises(UnknownElementError):
            case.trace_backward("L9")

    def test_golden_backward_chain(self, golden_case):
        assert golden_case.trace_backward("R101.1") == [
            ["DR101.1"],
            ["EC101"],
            ["UAIA101"],
            ["H7"],
            ["L6"],
        ]

    def test_golden_forward_includes(self, golden_case):
        flat = {e for hop in golden_case.trace_forward("L6") for e in hop}
        assert {"H6", "H7"} <= flat
        uaia_forward = {e for hop in golden_case.trace_forward("UAIA101") for e in hop}
        assert {"EC101", "DR101.1", "DR101.2", "DR101.3", "DR101.4",
                "R101.1", "R101.2", "R101.3", "R101.4"} <= uaia_forward

    def test_requirement_without_evidence_is_leaf(self, golden_case):
        assert golden_case.trace_forward("R101.1") == []

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10**9))
    def test_backward_forward_duality(self, seed):
        case = random_case(random.Random(seed))
        ids = sorted(case.elements)
        forward = {
            e: {x for hop in case.trace_forward(e) for x in hop} for e in ids
        }
        backward = {
            e: {x for hop in case.trace_backward(e) for x in hop} for e in ids
        }
        for x in ids:
            for y in ids:
                assert (y in forward[x]) == (x in backward[y])


class TestCompleteness:
    def test_empty_case_is_vacuously_complete(self):
        assert blank_case().completeness_check() == []

    def test_golden_case_complete(self, golden_case):
        assert golden_case.completeness_check() == []

    def test_each_rule_fires(self):
        case = blank_case()
        case.add_element(element("H1", ElementKind.HAZARD))
        case.add_element(element("UAIA1", ElementKind.UAIA))
        case.add_element(element("CS1", ElementKind.CAUSAL_SCENARIO))
        case.add_element(element("DR1", ElementKind.DESIGN_RECOMMENDATION))
        case.add_element(
            element("R1", ElementKind.REQUIREMENT, verification=VerificationMethod.DEMONSTRATION)
        )
        case.add_element(element("EC1", ElementKind.CONSTRAINT))
        rules = {(v.element_id, v.rule_id) for v in case.completeness_check()}
        assert rules == {
            ("H1", "a"),
            ("UAIA1", "b"),
            ("CS1", "c"),
            ("DR1", "d"),
            ("R1", "e"),
            ("EC1", "g"),
        }

    def test_rule_f_on_unverified_requirement(self):
        # bypasses add_element (which rejects this) the way a hand-edited
        # persisted document could
        case = blank_case()
        case.elements["R1"] = element("R1", ElementKind.REQUIREMENT)
        violations = case.completeness_check()
        assert ("R1", "f") in {(v.element_id, v.rule_id) for v in violations}


class TestAudit:
    def test_every_mutation_appends_one_record(self):
        case = AssuranceCase("t")
        baseline = len(case.audit)
        case.add_principle("transparency")
        assert len(case.audit) == baseline + 1
        case.add_segment("transparency", "traceability")
        assert len(case.audit) == baseline + 2
        case.add_element(element("L1", ElementKind.LOSS))
        assert len(case.audit) == baseline + 3
        case.add_element(element("H1", ElementKind.HAZARD))
        case.add_link(TraceLink("H1", "L1", LinkKind.HAZARD_OF_LOSS))
        assert len(case.audit) == baseline + 5
        assert [r.seq for r in case.audit] == list(range(1, len(case.audit) + 1))

    def test_failed_mutation_appends_nothing(self):
        case = blank_case()
        n = len(case.audit)
        with pytest.raises(InvalidElementError):
            case.add_element(element("R1", ElementKind.REQUIREMENT))
        assert len(case.audit) == n


class TestLinkSchemaSoundness:
    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10**9))
    def test_stored_links_satisfy_schema(self, seed):
        from elens.model import LINK_SCHEMA

        case = random_case(random.Random(seed))
        for link in case.links:
            source_kind, target_kind = LINK_SCHEMA[link.kind]
            assert case.elements[link.target].kind is target_kind
            if source_kind is None:
                assert link.source in case.checklist.questions
            else:
                assert case.elements[link.source].kind is source_kind


class TestPersistenceRoundTrip:
    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10**9))
    def test_dict_round_trip(self, seed):
        case = random_case(random.Random(seed))
        clone = AssuranceCase.from_dict(case.to_dict())
        assert clone.structural_key() == case.structural_key()


class TestMutationExhaustive:
    def test_removing_any_single_mandatory_link_yields_one_violation(self, golden_case):
        """Every individual link of the five mandatory classes is load-bearing."""
        rule_by_kind = {
            LinkKind.HAZARD_OF_LOSS: "a",
            LinkKind.UAIA_OF_HAZARD: "b",
            LinkKind.SCENARIO_OF_UAIA: "c",
            LinkKind.RECOMMENDATION_OF_CONSTRAINT: "d",
            LinkKind.REQUIREMENT_OF_RECOMMENDATION: "e",
        }
        mandatory = [l for l in golden_case.links if l.kind in rule_by_kind]
        assert len(mandatory) == 11 + 6 + 4 + 4 + 4
        for dropped in mandatory:
            mutated = AssuranceCase.from_dict(golden_case.to_dict())
            mutated.links = [l for l in mutated.links if l != dropped]
            violations = mutated.completeness_check()
            assert len(violations) == 1, dropped
            assert violations[0].element_id == dropped.source
            assert violations[0].rule_id == rule_by_kind[dropped.kind]
