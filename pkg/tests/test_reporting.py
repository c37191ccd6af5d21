import copy
from fractions import Fraction

import pytest

from routegen import BenchmarkMismatch, DomainError
from routegen.reporting import (
    accuracy_section,
    distribution_line,
    economics_section,
    report,
    routing_section,
)

from .token_fixtures import SCALES


def _record(run_name, benchmark="fixture", mean=Fraction(1, 2), simple=2, complex_=1,
            totals=None):
    return {
        "run_name": run_name,
        "benchmark": benchmark,
        "distribution": {"Simple": simple, "Complex": complex_, "total": simple + complex_},
        "scores": {
            "1": {
                "benchmark": benchmark,
                "mean": float(mean),
                "mean_exact": f"{mean.numerator}/{mean.denominator}",
                "strategy": run_name,
            }
        },
        "totals": totals or {"c_in": 700, "c_out": 250, "total": 1000, "routing_total": 50},
    }


class TestDistributionLine:
    def test_published_shape(self):
        line = distribution_line(275, 152)
        assert line == "275 Simple / 152 Complex (64.4% Simple)"

    def test_empty_split(self):
        assert distribution_line(0, 0) == "0 Simple / 0 Complex"

    def test_negative_counts_rejected(self):
        with pytest.raises(DomainError):
            distribution_line(-1, 5)

    def test_percentages_partition_within_rounding(self):
        simple, complex_ = 53, 111
        pct_simple = simple / (simple + complex_) * 100
        pct_complex = complex_ / (simple + complex_) * 100
        assert abs(pct_simple + pct_complex - 100.0) < 1e-9


class TestRoutingSection:
    def test_lists_each_routed_run(self):
        text = routing_section([_record("routed-a"), _record("routed-b", simple=5, complex_=5)])
        assert "routed-a" in text
        assert "2 Simple / 1 Complex" in text
        assert "5 Simple / 5 Complex (50.0% Simple)" in text

    def test_runs_without_distribution_skipped(self):
        record = _record("forced")
        record["distribution"] = None
        text = routing_section([record])
        assert "(no routed runs)" in text


class TestAccuracySection:
    def test_deltas_against_baseline(self):
        records = [
            _record("zero", mean=Fraction(1, 2)),
            _record("routed", mean=Fraction(3, 4)),
        ]
        text = accuracy_section(records, baseline_name="zero")
        assert "75.00 (+50.00%)" in text
        assert "50.00" in text

    def test_missing_baseline_rejected(self):
        with pytest.raises(BenchmarkMismatch):
            accuracy_section([_record("routed")], baseline_name="zero")

    def test_no_scores_reported_gracefully(self):
        record = _record("routed")
        record["scores"] = {}
        assert "(no scored runs)" in accuracy_section([record], baseline_name="ignored", k=1)


class TestEconomicsSection:
    def test_reduction_row_printed(self):
        data = SCALES["6.7B"]
        record = _record(
            "routed",
            benchmark="MBPP-sanitized",
            totals={
                "c_in": data["routed"]["MBPP-sanitized"] - 61_001 - 100,
                "c_out": 100,
                "total": data["routed"]["MBPP-sanitized"],
                "routing_total": 61_001,
            },
        )
        text = economics_section(record, {"S": data["baselines"]["S"]})
        assert "(59.22%)" in text
        assert "RT" in text

    def test_benchmark_absent_from_baseline_rejected(self):
        record = _record("routed", benchmark="fixture")
        with pytest.raises(BenchmarkMismatch):
            economics_section(record, {"S": {"other": 100}})


class TestReport:
    def test_sections_assembled(self):
        records = [_record("zero", mean=Fraction(2, 5)), _record("routed", mean=Fraction(3, 5))]
        text = report(records, baseline_name="zero",
                      baseline_totals={"S": {"fixture": 2000}}, k_values=(1,))
        assert "Routing distribution" in text
        assert "Pass@1" in text
        assert "R2S" in text

    def test_report_does_not_mutate_records(self):
        records = [_record("zero"), _record("routed")]
        snapshot = copy.deepcopy(records)
        report(records, baseline_name="zero", baseline_totals={"S": {"fixture": 2000}})
        assert records == snapshot
