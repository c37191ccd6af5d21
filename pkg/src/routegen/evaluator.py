"""Verdict statistics and the unbiased Pass@k estimator.

For a task with n generated candidates of which c pass, Pass@k is the
probability that a uniform draw of k candidates contains at least one
passing one: 1 - C(n-c, k)/C(n, k). It is computed in exact rational
arithmetic via the product form 1 - prod_{i=0}^{k-1} (n-c-i)/(n-i), which
never materializes a factorial and is exactly 1 whenever n - c < k.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .corpus import Task
from .errors import DomainError
from .execution import ExecutionJob, ExecutionVerdict, VerdictStatus
from .generator import GenerationResult
from .ledger import display_pct

DEFAULT_K_VALUES = (1,)


@dataclass(frozen=True)
class TaskEvaluation:
    task_id: str
    n: int
    c: int
    verdicts: tuple[ExecutionVerdict, ...]

    def __post_init__(self) -> None:
        if not 0 <= self.c <= self.n:
            raise ValueError("need 0 <= c <= n")
        if len(self.verdicts) != self.n:
            raise ValueError("verdict count must equal n")

    def to_record(self) -> dict:
        return {
            "task_id": self.task_id,
            "n": self.n,
            "c": self.c,
            "verdicts": [v.to_record() for v in self.verdicts],
        }


@dataclass(frozen=True)
class BenchmarkScore:
    k: int
    per_task: Mapping[str, Fraction]
    mean: Fraction


def pass_at_k(n: int, c: int, k: int) -> Fraction:
    """Unbiased Pass@k for n candidates with c passing; exact rational."""
    if k < 1 or k > n:
        raise DomainError(f"need 1 <= k <= n, got k={k}, n={n}")
    if not 0 <= c <= n:
        raise DomainError(f"need 0 <= c <= n, got c={c}, n={n}")
    if n - c < k:
        return Fraction(1)
    miss = Fraction(1)
    for i in range(k):
        miss *= Fraction(n - c - i, n - i)
    return 1 - miss


def evaluate_task(
    task: Task,
    result: GenerationResult,
    executor: object,
    timeout_s: float = 10.0,
    memory_limit_mb: int = 512,
) -> TaskEvaluation:
    """Execute every candidate against the task's tests and count passes.

    Candidates flagged NoCode become NoCode verdicts (executors short-circuit
    on empty code), so the verdict list always aligns with the candidates.
    """
    jobs = [
        ExecutionJob(
            code=candidate.code,
            test_suite=task.test_suite,
            entry_point=task.entry_point,
            timeout_s=timeout_s,
            memory_limit_mb=memory_limit_mb,
        )
        for candidate in result.candidates
    ]
    verdicts = tuple(executor.execute_batch(jobs))
    c = sum(1 for verdict in verdicts if verdict.status is VerdictStatus.PASS)
    return TaskEvaluation(task_id=task.task_id, n=len(jobs), c=c, verdicts=verdicts)


def aggregate(evaluations: Sequence[TaskEvaluation], k: int) -> BenchmarkScore:
    """Per-task Pass@k, then the unweighted mean over tasks.

    Tasks whose candidates all failed (or produced no code) stay in the mean
    at zero; dropping them would inflate the score.
    """
    if not evaluations:
        raise DomainError("aggregate over zero evaluations")
    short = [e for e in evaluations if e.n < k]
    if short:
        raise DomainError(f"k={k} exceeds n for tasks {[e.task_id for e in short]}")
    per_task = {e.task_id: pass_at_k(e.n, e.c, k) for e in evaluations}
    mean = sum(per_task.values(), Fraction(0)) / len(per_task)
    return BenchmarkScore(k=k, per_task=per_task, mean=mean)


def score_records(
    score: BenchmarkScore,
    benchmark: str,
    model: str,
    strategy: str,
) -> dict:
    """Structured export of one benchmark score."""
    return {
        "benchmark": benchmark,
        "model": model,
        "strategy": strategy,
        "k": score.k,
        "mean": float(score.mean),
        "mean_exact": f"{score.mean.numerator}/{score.mean.denominator}",
        "per_task": {task_id: float(value) for task_id, value in score.per_task.items()},
    }


def pass_table(
    means: Mapping[str, Mapping[str, Fraction]],
    baseline_name: str,
    k: int = 1,
) -> str:
    """Plain-text Pass@k table: method rows by benchmark columns.

    Cells show the percentage with the relative delta against the named
    baseline in parentheses; the baseline row shows no delta.
    """
    if baseline_name not in means:
        raise DomainError(f"baseline {baseline_name!r} not among methods {sorted(means)}")
    benchmarks = list(next(iter(means.values())))
    header = [f"Pass@{k}"] + benchmarks
    rows = []
    baseline = means[baseline_name]
    for method, per_benchmark in means.items():
        cells = []
        for benchmark in benchmarks:
            value = per_benchmark[benchmark]
            cell = display_pct(value)
            if method != baseline_name:
                base = baseline[benchmark]
                if base > 0:
                    delta = (value - base) / base
                    sign = "+" if delta >= 0 else ""
                    cell += f" ({sign}{display_pct(delta)}%)"
                else:
                    cell += " (n/a)"
            cells.append(cell)
        rows.append([method] + cells)
    widths = [max(len(row[i]) for row in [header] + rows) for i in range(len(header))]
    lines = [
        "  ".join(cell.ljust(widths[i]) for i, cell in enumerate(header)).rstrip(),
        "  ".join("-" * widths[i] for i in range(len(header))),
    ]
    for row in rows:
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip())
    return "\n".join(lines)
