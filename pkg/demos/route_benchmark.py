"""Classify every bundled task and show where the router sends it.

A scripted backend stands in for the classifier model: it answers with the
label the benchmark ships, phrased the way a real model would. The point is
the plumbing, one greedy call per task, a parsed label with rationale, and
a Simple/Complex split at the end.
"""

from routegen import (
    DifficultyLabel,
    MockBackend,
    RoutingMode,
    classify,
    distribution_line,
    load_benchmark,
    route,
    summarize,
)
from routegen.corpus import bundled_benchmark_path


def scripted_reply(task) -> str:
    if task.external_label and task.external_label.lower() == "simple":
        return "Simple, because the requirement maps onto one short pass over the input."
    return "Complex, because several conditions interact and the edge cases need care."


def main() -> None:
    bench = load_benchmark(bundled_benchmark_path())
    backend = MockBackend([scripted_reply(task) for task in bench.tasks], model_name="demo-cls")

    decisions = []
    print(f"benchmark: {bench.name} ({len(bench.tasks)} tasks)\n")
    for task in bench.tasks:
        decision = classify(task, backend, RoutingMode.EXTERNAL_CLASSIFIER)
        decisions.append(decision)
        strategy = route(decision)
        print(f"  {task.task_id:28s} {decision.label.value:8s} -> {strategy.value}")
        print(f"    {decision.rationale}")

    summary = summarize(decisions)
    print()
    print("distribution:", distribution_line(summary.simple_count, summary.complex_count))
    routing_tokens = sum(d.prompt_tokens + d.reply_tokens for d in decisions)
    print(f"classifier overhead: {routing_tokens} tokens across {len(decisions)} calls")
    simple = [d.task_id for d in decisions if d.label is DifficultyLabel.SIMPLE]
    print(f"direct few-shot queue: {', '.join(simple)}")


if __name__ == "__main__":
    main()
