"""Human-readable report assembly from run records.

Reports combine three views: routing distribution (how many tasks each
label received), accuracy (pass@k per method per benchmark with relative
deltas), and token economics (per-benchmark totals with reduction rows).
All arithmetic stays exact; rounding happens in the formatting helpers.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence

from .errors import BenchmarkMismatch, DomainError
from .evaluator import pass_table
from .ledger import display_pct, token_report

__all__ = [
    "distribution_line",
    "routing_section",
    "accuracy_section",
    "economics_section",
    "report",
]


def distribution_line(simple: int, complex_: int) -> str:
    """Render a label split like ``275 Simple / 152 Complex (64.4% Simple)``."""
    if simple < 0 or complex_ < 0:
        raise DomainError("label counts must be nonnegative")
    total = simple + complex_
    if total == 0:
        return "0 Simple / 0 Complex"
    pct = display_pct(Fraction(simple, total), decimals=1)
    return f"{simple} Simple / {complex_} Complex ({pct}% Simple)"


def routing_section(records: Sequence[Mapping]) -> str:
    """Distribution lines for every run record that carries routing labels."""
    lines = ["Routing distribution"]
    seen = False
    for record in records:
        distribution = record.get("distribution")
        if not distribution:
            continue
        seen = True
        name = record.get("run_name") or record.get("benchmark") or "run"
        benchmark = record.get("benchmark", "")
        prefix = f"{name} [{benchmark}]" if benchmark and benchmark != name else name
        lines.append(
            f"  {prefix}: {distribution_line(distribution['Simple'], distribution['Complex'])}"
        )
    if not seen:
        lines.append("  (no routed runs)")
    return "\n".join(lines)


def _scores_by_method(records: Sequence[Mapping], k: int) -> dict[str, dict[str, Fraction]]:
    table: dict[str, dict[str, Fraction]] = {}
    for record in records:
        scores = record.get("scores") or {}
        entry = scores.get(str(k))
        if entry is None:
            continue
        method = record.get("run_name") or entry.get("strategy") or "run"
        benchmark = record.get("benchmark", "")
        num, _, den = entry["mean_exact"].partition("/")
        mean = Fraction(int(num), int(den or "1"))
        table.setdefault(method, {})[benchmark] = mean
    return table


def accuracy_section(records: Sequence[Mapping], baseline_name: str, k: int = 1) -> str:
    """Pass@k table across runs, with deltas relative to ``baseline_name``."""
    means = _scores_by_method(records, k)
    if not means:
        return f"Pass@{k}\n  (no scored runs)"
    if baseline_name not in means:
        raise BenchmarkMismatch(f"baseline run {baseline_name!r} has no pass@{k} scores")
    return pass_table(means, baseline_name, k=k)


def economics_section(
    routed_record: Mapping,
    baseline_totals: Mapping[str, Mapping[str, int]],
    routed_name: str = "RG",
) -> str:
    """Token table for one routed run against named baseline totals.

    ``baseline_totals`` maps baseline name to per-benchmark grand totals.
    The routed run contributes its own benchmark column only; comparing
    across benchmarks needs one record per benchmark merged by the caller.
    """
    benchmark = routed_record.get("benchmark", "")
    totals = routed_record.get("totals")
    if not benchmark or totals is None:
        raise DomainError("routed record lacks benchmark totals")
    for name, per_benchmark in baseline_totals.items():
        if benchmark not in per_benchmark:
            raise BenchmarkMismatch(f"baseline {name!r} has no totals for {benchmark!r}")
    # Reductions compare grand totals: the routed side pays for its
    # classifier calls, so routing tokens stay in.
    routed = {benchmark: totals["total"]}
    routing = {benchmark: totals["routing_total"]}
    baselines = {
        name: {benchmark: per_benchmark[benchmark]} for name, per_benchmark in baseline_totals.items()
    }
    return token_report(routed, baselines, routing_totals=routing, routed_name=routed_name)


def report(
    records: Sequence[Mapping],
    baseline_name: str | None = None,
    baseline_totals: Mapping[str, Mapping[str, int]] | None = None,
    k_values: Sequence[int] = (1,),
) -> str:
    """Full report: routing split, then accuracy per k, then token economics."""
    sections = [routing_section(records)]
    if baseline_name is not None:
        for k in k_values:
            sections.append(accuracy_section(records, baseline_name, k=k))
    if baseline_totals:
        for record in records:
            if record.get("distribution") and record.get("totals"):
                sections.append(economics_section(record, baseline_totals))
    return "\n\n".join(sections)
