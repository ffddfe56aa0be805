import hashlib
import random
import statistics
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from elens.assessors import (
    AttributionSeries,
    EvidenceSequence,
    LabeledPredictionSet,
    demographic_parity_difference,
    disparate_impact_ratio,
    evaluate_metric,
    faithfulness_score,
    monotonicity_score,
    parse_attribution_series,
    parse_evidence_sequence,
    parse_prediction_set,
    run_metric,
)
from elens.checklist import MetricResult, Question, metric as metric_qtype, register_question
from elens.errors import (
    DegenerateVarianceError,
    MetricInputError,
    TooShortError,
    UnknownGroupError,
)
from elens.model import AssuranceCase, CaseElement, ElementKind, VerificationMethod

TOL = 1e-9

# 8-record fixture: group A shortlists 3 of 4, group B 1 of 4
EIGHT_RECORDS = LabeledPredictionSet(
    (
        (True, "A"), (True, "A"), (True, "A"), (False, "A"),
        (True, "B"), (False, "B"), (False, "B"), (False, "B"),
    )
)


class TestDemographicParity:
    def test_equal_rates_give_zero(self):
        data = LabeledPredictionSet(((True, "A"), (False, "A"), (True, "B"), (False, "B")))
        assert demographic_parity_difference(data, "A", "B") == 0.0

    def test_eight_record_fixture(self):
        # direct enumeration: 3/4 - 1/4
        positives = Counter(g for p, g in EIGHT_RECORDS.records if p)
        totals = Counter(g for _, g in EIGHT_RECORDS.records)
        expected = abs(positives["A"] / totals["A"] - positives["B"] / totals["B"])
        assert expected == 0.5
        assert demographic_parity_difference(EIGHT_RECORDS, "A", "B") == pytest.approx(0.5, abs=TOL)

    def test_single_member_extremes(self):
        data = LabeledPredictionSet(((True, "A"), (False, "B")))
        assert demographic_parity_difference(data, "A", "B") == 1.0

    def test_symmetry_and_permutation_invariance(self):
        rng = random.Random(7)
        records = [(rng.random() < 0.5, rng.choice("AB")) for _ in range(20)]
        records += [(True, "A"), (True, "B")]  # both groups present
        data = LabeledPredictionSet(tuple(records))
        shuffled = list(records)
        rng.shuffle(shuffled)
        data2 = LabeledPredictionSet(tuple(shuffled))
        assert demographic_parity_difference(data, "A", "B") == pytest.approx(
            demographic_parity_difference(data2, "B", "A"), abs=TOL
        )

    def test_unknown_group(self):
        with pytest.raises(UnknownGroupError):
            demographic_parity_difference(EIGHT_RECORDS, "A", "Z")


class TestDisparateImpact:
    def test_quarter_vs_three_quarters(self):
        assert disparate_impact_ratio(EIGHT_RECORDS, "A", "B") == pytest.approx(1 / 3, abs=TOL)

    def test_identical_rates(self):
        data = LabeledPredictionSet(((True, "A"), (True, "B")))
        assert disparate_impact_ratio(data, "A", "B") == 1.0

    def test_double_zero_is_undefined(self):
        data = LabeledPredictionSet(((False, "A"), (False, "B")))
        assert disparate_impact_ratio(data, "A", "B") is None


class TestFaithfulness:
    def test_proportional_is_one(self):
        series = AttributionSeries(((1, 0.1), (2, 0.2), (3, 0.3)))
        assert faithfulness_score(series) == pytest.approx(1.0, abs=TOL)

    def test_negated_is_minus_one(self):
        series = AttributionSeries(((1, -1.0), (2, -2.0), (3, -3.0)))
        assert faithfulness_score(series) == pytest.approx(-1.0, abs=TOL)

    def test_fixture_matches_independent_pearson(self):
        pairs = ((1, 0.1), (2, 0.4), (3, 0.2), (4, 0.8))
        expected = statistics.correlation([a for a, _ in pairs], [d for _, d in pairs])
        assert faithfulness_score(AttributionSeries(pairs)) == pytest.approx(expected, abs=TOL)

    def test_constant_coordinate_degenerate(self):
        with pytest.raises(DegenerateVarianceError):
            faithfulness_score(AttributionSeries(((1, 0.5), (2, 0.5), (3, 0.5))))

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 10**9))
    def test_positive_affine_invariance(self, seed):
        rng = random.Random(seed)
        n = rng.randint(3, 12)
        xs = [rng.uniform(-5, 5) for _ in range(n)]
        ys = [rng.uniform(-5, 5) for _ in range(n)]
        if len(set(xs)) < 2 or len(set(ys)) < 2:
            return
        a, c = rng.uniform(0.1, 10), rng.uniform(0.1, 10)
        b, d = rng.uniform(-20, 20), rng.uniform(-20, 20)
        base = faithfulness_score(AttributionSeries(tuple(zip(xs, ys))))
        scaled = faithfulness_score(
            AttributionSeries(tuple((a * x + b, c * y + d) for x, y in zip(xs, ys)))
        )
        assert scaled == pytest.approx(base, abs=TOL)


class TestMonotonicity:
    def test_strictly_increasing(self):
        assert monotonicity_score(EvidenceSequence((0.1, 0.2, 0.9))) == 1.0

    def test_strictly_decreasing(self):
        assert monotonicity_score(EvidenceSequence((0.9, 0.5, 0.1))) == 0.0

    def test_two_of_three_steps(self):
        assert monotonicity_score(EvidenceSequence((0.1, 0.3, 0.2, 0.5))) == 2 / 3

    def test_sorted_sequences_are_fully_monotone(self):
        rng = random.Random(3)
        for _ in range(25):
            values = sorted(rng.random() for _ in range(rng.randint(2, 12)))
            assert monotonicity_score(EvidenceSequence(tuple(values))) == 1.0

    def test_reversing_strictly_monotone_zeroes_score(self):
        rng = random.Random(4)
        values = sorted({rng.random() for _ in range(8)})
        assert monotonicity_score(EvidenceSequence(tuple(values))) == 1.0
        assert monotonicity_score(EvidenceSequence(tuple(reversed(values)))) == 0.0

    def test_too_short(self):
        with pytest.raises(TooShortError):
            EvidenceSequence((0.5,))


class TestParsing:
    def test_fairness_csv(self):
        data = parse_prediction_set("predicted,group\n1,A\n0,B\n")
        assert data.records == ((True, "A"), (False, "B"))

    def test_bad_header(self):
        with pytest.raises(MetricInputError):
            parse_prediction_set("pred,grp\n1,A\n")

    def test_bad_predicted_value(self):
        with pytest.raises(MetricInputError):
            parse_prediction_set("predicted,group\n2,A\n0,B\n")

    def test_attribution_csv(self):
        series = parse_attribution_series("attribution,performance_drop\n1,0.5\n2,0.7\n")
        assert series.pairs == ((1.0, 0.5), (2.0, 0.7))

    def test_prediction_out_of_range(self):
        with pytest.raises(MetricInputError):
            parse_evidence_sequence("prediction\n0.5\n1.5\n")


class TestRunMetric:
    def build_case(self, metric_name: str) -> AssuranceCase:
        case = AssuranceCase("t")
        case.add_principle("fairness")
        case.add_segment("fairness", "bias")
        case.add_element(
            CaseElement(
                "R1", ElementKind.REQUIREMENT, "fairness", "bias", "report the metric",
                verification=VerificationMethod.ALGORITHMIC_EVALUATION,
            )
        )
        register_question(
            case,
            Question(
                id="Q1", principle="fairness", segment="bias", stage="DataCollection",
                qtype=metric_qtype(metric_name), text="provide the data",
                requirement_links=("R1",),
            ),
        )
        return case

    FAIRNESS_CSV = b"predicted,group\n1,A\n1,A\n1,A\n0,A\n1,B\n0,B\n0,B\n0,B\n"

    def test_fairness_fixture_scores_half(self):
        case = self.build_case("demographic_parity")
        result = run_metric(case, "Q1", self.FAIRNESS_CSV)
        assert result.value == pytest.approx(0.5, abs=TOL)
        assert result.inputs_digest == hashlib.sha256(self.FAIRNESS_CSV).hexdigest()
        assert isinstance(case.answers["Q1"].content, MetricResult)

    def test_degenerate_variance_recorded_as_failure(self):
        case = self.build_case("faithfulness")
        payload = b"attribution,performance_drop\n1,0.5\n2,0.5\n3,0.5\n"
        result = run_metric(case, "Q1", payload)
        assert result.value is None
        assert result.error == "degenerate-variance"
        # the failure is stored and the answer stays editable
        assert case.answers["Q1"].content.error == "degenerate-variance"

    def test_rerun_is_bit_identical(self):
        case = self.build_case("monotonicity")
        payload = b"prediction\n0.1\n0.3\n0.2\n0.5\n"
        first = run_metric(case, "Q1", payload)
        second = run_metric(case, "Q1", payload)
        assert first == second
        assert first.value == 2 / 3

    def test_malformed_file_raises(self):
        case = self.build_case("demographic_parity")
        with pytest.raises(MetricInputError):
            run_metric(case, "Q1", b"not,a,header\n1,2,3\n")

    def test_three_groups_rejected(self):
        case = self.build_case("demographic_parity")
        with pytest.raises(MetricInputError):
            run_metric(case, "Q1", b"predicted,group\n1,A\n0,B\n1,C\n")

    def test_undefined_ratio_recorded(self):
        case = self.build_case("disparate_impact")
        result = run_metric(case, "Q1", b"predicted,group\n0,A\n0,B\n")
        assert result.value is None
        assert result.error == "undefined"

    def test_evaluate_metric_determinism(self):
        payload = b"attribution,performance_drop\n1,0.1\n2,0.4\n3,0.2\n4,0.8\n"
        assert evaluate_metric("faithfulness", payload) == evaluate_metric("faithfulness", payload)
