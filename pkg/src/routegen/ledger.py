"""Token-cost accounting and reduction reporting.

Per-task cost follows the routed strategy. A Simple-routed task is charged
one direct prompt in and the sampled programs out. A Complex-routed task is
charged the stage-1 prompt plus every per-trace stage-2 prompt in, and the
traces plus programs out. Total cost is input plus output. Routing tokens
(classifier prompt and reply) are kept in their own bucket: they never join
a strategy's input/output but they do join run totals.

Everything here computes in exact integer/rational arithmetic; rounding
happens only in display helpers.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import DomainError, ShapeMismatch
from .router import DifficultyLabel


class TokenStage(str, Enum):
    ROUTING_PROMPT = "RoutingPrompt"
    ROUTING_REPLY = "RoutingReply"
    DIRECT_PROMPT = "DirectPrompt"
    DIRECT_CODE = "DirectCode"
    ICOT_STAGE1_PROMPT = "IcotStage1Prompt"
    ICOT_TRACE = "IcotTrace"
    ICOT_STAGE2_PROMPT = "IcotStage2Prompt"
    ICOT_CODE = "IcotCode"


_ROUTING_STAGES = (TokenStage.ROUTING_PROMPT, TokenStage.ROUTING_REPLY)


@dataclass(frozen=True)
class TokenRecord:
    stage: TokenStage
    tokens: int
    task_id: str
    call_ordinal: int

    def __post_init__(self) -> None:
        if self.tokens < 0:
            raise ValueError("token counts must be nonnegative")


@dataclass(frozen=True)
class TaskCost:
    task_id: str
    route: DifficultyLabel
    c_in: int
    c_out: int
    total: int
    routing_tokens: int

    def __post_init__(self) -> None:
        if self.total != self.c_in + self.c_out:
            raise ValueError("total must equal c_in + c_out")
        if min(self.c_in, self.c_out, self.routing_tokens) < 0:
            raise ValueError("cost components must be nonnegative")


@dataclass(frozen=True)
class RunTotals:
    c_in: int
    c_out: int
    total: int
    routing_total: int


@dataclass(frozen=True)
class ReductionReport:
    benchmark: str
    baseline_name: str
    baseline_total: int | Fraction
    routed_total: int | Fraction
    reduction_abs: int | Fraction
    reduction_pct: Fraction


def _count_stages(records: Sequence[TokenRecord]) -> dict[TokenStage, list[int]]:
    buckets: dict[TokenStage, list[int]] = {}
    for record in records:
        buckets.setdefault(record.stage, []).append(record.tokens)
    return buckets


def task_cost(transcript: Sequence[TokenRecord], route: DifficultyLabel) -> TaskCost:
    """Fold one task's transcript into its cost.

    The transcript may include routing records; they land in the routing
    bucket. The remaining records must match the route's shape exactly:
    one prompt plus n programs for Simple, or one stage-1 prompt, n traces,
    n stage-2 prompts, and n programs for Complex.
    """
    if not transcript:
        raise ShapeMismatch("empty transcript")
    task_ids = {record.task_id for record in transcript}
    if len(task_ids) != 1:
        raise ShapeMismatch(f"transcript mixes tasks: {sorted(task_ids)}")
    task_id = transcript[0].task_id

    routing_tokens = sum(r.tokens for r in transcript if r.stage in _ROUTING_STAGES)
    generation = [r for r in transcript if r.stage not in _ROUTING_STAGES]
    buckets = _count_stages(generation)

    if route is DifficultyLabel.SIMPLE:
        expected = {TokenStage.DIRECT_PROMPT, TokenStage.DIRECT_CODE}
        if set(buckets) - expected:
            raise ShapeMismatch(f"Simple route saw stages {sorted(s.value for s in set(buckets) - expected)}")
        prompts = buckets.get(TokenStage.DIRECT_PROMPT, [])
        codes = buckets.get(TokenStage.DIRECT_CODE, [])
        if len(prompts) != 1:
            raise ShapeMismatch(f"Simple route needs exactly one prompt record, saw {len(prompts)}")
        if not codes:
            raise ShapeMismatch("Simple route needs at least one program record")
        c_in = prompts[0]
        c_out = sum(codes)
    elif route is DifficultyLabel.COMPLEX:
        expected = {
            TokenStage.ICOT_STAGE1_PROMPT,
            TokenStage.ICOT_TRACE,
            TokenStage.ICOT_STAGE2_PROMPT,
            TokenStage.ICOT_CODE,
        }
        if set(buckets) - expected:
            raise ShapeMismatch(f"Complex route saw stages {sorted(s.value for s in set(buckets) - expected)}")
        stage1 = buckets.get(TokenStage.ICOT_STAGE1_PROMPT, [])
        traces = buckets.get(TokenStage.ICOT_TRACE, [])
        stage2 = buckets.get(TokenStage.ICOT_STAGE2_PROMPT, [])
        codes = buckets.get(TokenStage.ICOT_CODE, [])
        if len(stage1) != 1:
            raise ShapeMismatch(f"Complex route needs exactly one stage-1 prompt record, saw {len(stage1)}")
        if not traces:
            raise ShapeMismatch("Complex route needs at least one trace record")
        if not (len(traces) == len(stage2) == len(codes)):
            raise ShapeMismatch(
                f"Complex route needs matching trace/stage-2/program counts, saw "
                f"{len(traces)}/{len(stage2)}/{len(codes)}"
            )
        c_in = stage1[0] + sum(stage2)
        c_out = sum(traces) + sum(codes)
    else:  # pragma: no cover - two-label space
        raise ShapeMismatch(f"unknown route {route!r}")

    return TaskCost(
        task_id=task_id,
        route=route,
        c_in=c_in,
        c_out=c_out,
        total=c_in + c_out,
        routing_tokens=routing_tokens,
    )


def routing_cost(transcript: Sequence[TokenRecord]) -> int:
    """Routing-bucket tokens of a transcript (classifier prompt + reply)."""
    return sum(r.tokens for r in transcript if r.stage in _ROUTING_STAGES)


def run_totals(costs: Iterable[TaskCost]) -> RunTotals:
    """Component-wise sums over task costs; total includes routing tokens."""
    c_in = c_out = routing = 0
    for cost in costs:
        c_in += cost.c_in
        c_out += cost.c_out
        routing += cost.routing_tokens
    return RunTotals(c_in=c_in, c_out=c_out, total=c_in + c_out + routing, routing_total=routing)


def reduction(
    baseline_total: int,
    routed_total: int,
    benchmark: str = "",
    baseline_name: str = "",
) -> ReductionReport:
    """Absolute and fractional token reduction of a routed run vs a baseline."""
    if baseline_total <= 0:
        raise DomainError(f"baseline total must be positive, got {baseline_total}")
    reduction_abs = baseline_total - routed_total
    return ReductionReport(
        benchmark=benchmark,
        baseline_name=baseline_name,
        baseline_total=baseline_total,
        routed_total=routed_total,
        reduction_abs=reduction_abs,
        reduction_pct=Fraction(reduction_abs, baseline_total),
    )


def average_reduction(per_benchmark: Sequence[ReductionReport]) -> ReductionReport:
    """Average row across benchmarks.

    The absolute column is the mean of per-benchmark absolute reductions;
    the percentage is that mean over the mean baseline, which equals the
    ratio of sums.
    """
    if not per_benchmark:
        raise DomainError("average over zero reduction reports")
    count = len(per_benchmark)
    baseline_mean = Fraction(sum(r.baseline_total for r in per_benchmark), count)
    routed_mean = Fraction(sum(r.routed_total for r in per_benchmark), count)
    abs_mean = Fraction(sum(r.reduction_abs for r in per_benchmark), count)
    if baseline_mean <= 0:
        raise DomainError("mean baseline must be positive")
    return ReductionReport(
        benchmark="Avg",
        baseline_name=per_benchmark[0].baseline_name,
        baseline_total=_as_int_if_whole(baseline_mean),
        routed_total=_as_int_if_whole(routed_mean),
        reduction_abs=_as_int_if_whole(abs_mean),
        reduction_pct=abs_mean / baseline_mean,
    )


def _as_int_if_whole(value: Fraction) -> int | Fraction:
    return int(value) if value.denominator == 1 else value


def display_int(value: int | Fraction) -> int:
    """Nearest integer, halves away from zero; display use only."""
    if isinstance(value, int):
        return value
    sign = 1 if value >= 0 else -1
    magnitude = abs(value)
    return sign * ((magnitude.numerator * 2 + magnitude.denominator) // (2 * magnitude.denominator))


def display_pct(value: Fraction, decimals: int = 2) -> str:
    """Percentage string with fixed decimals, halves away from zero."""
    scale = 10**decimals
    scaled = value * 100 * scale
    sign = "-" if scaled < 0 else ""
    magnitude = abs(scaled)
    units = (magnitude.numerator * 2 + magnitude.denominator) // (2 * magnitude.denominator)
    whole, frac = divmod(units, scale)
    return f"{sign}{whole}.{frac:0{decimals}d}"


def token_report(
    routed_totals: Mapping[str, int],
    baseline_totals: Mapping[str, Mapping[str, int]],
    routing_totals: Mapping[str, int] | None = None,
    routed_name: str = "RG",
) -> str:
    """Plain-text token table: methods by benchmarks, with reduction rows.

    ``routed_totals`` maps benchmark to the routed run's total (routing
    tokens included); ``baseline_totals`` maps baseline name to per-benchmark
    totals. One reduction row is emitted per baseline, as an absolute drop
    with the percentage in parentheses, plus an Avg column.
    """
    benchmarks = list(routed_totals)
    if not benchmarks:
        raise DomainError("token report needs at least one benchmark")
    columns = benchmarks + ["Avg"]
    header = ["Method"] + columns

    def fmt_int(value: int | Fraction) -> str:
        return f"{display_int(value):,}"

    rows: list[list[str]] = []
    if routing_totals is not None:
        rt_cells = [fmt_int(routing_totals.get(b, 0)) for b in benchmarks]
        rt_avg = Fraction(sum(routing_totals.get(b, 0) for b in benchmarks), len(benchmarks))
        rows.append(["RT"] + rt_cells + [fmt_int(rt_avg)])
    for name, totals in baseline_totals.items():
        cells = [fmt_int(totals[b]) for b in benchmarks]
        avg = Fraction(sum(totals[b] for b in benchmarks), len(benchmarks))
        rows.append([name] + cells + [fmt_int(avg)])
    routed_cells = [fmt_int(routed_totals[b]) for b in benchmarks]
    routed_avg = Fraction(sum(routed_totals[b] for b in benchmarks), len(benchmarks))
    rows.append([routed_name] + routed_cells + [fmt_int(routed_avg)])
    for name, totals in baseline_totals.items():
        reductions = [
            reduction(totals[b], routed_totals[b], benchmark=b, baseline_name=name) for b in benchmarks
        ]
        avg = average_reduction(reductions)
        cells = [f"{fmt_int(r.reduction_abs)} ({display_pct(r.reduction_pct)}%)" for r in reductions]
        cells.append(f"{fmt_int(avg.reduction_abs)} ({display_pct(avg.reduction_pct)}%)")
        rows.append([f"R2{name[:1].upper()}"] + cells)

    widths = [max(len(row[i]) for row in [header] + rows) for i in range(len(header))]
    lines = [
        "  ".join(cell.ljust(widths[i]) for i, cell in enumerate(header)).rstrip(),
        "  ".join("-" * widths[i] for i in range(len(header))),
    ]
    for row in rows:
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip())
    return "\n".join(lines)
