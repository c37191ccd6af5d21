"""Acceptance gate: one test per top-level behavioral guarantee.

Each test pins the published fixture values exactly (display strings) and
additionally checks the stated numeric tolerance where one applies. Runtime
bounds are asserted with a monotonic clock so a regression into slow code
fails loudly rather than silently bloating CI.
"""

import time
from dataclasses import replace
from fractions import Fraction

from routegen import (
    Ablation,
    Benchmark,
    DifficultyLabel,
    MockBackend,
    RecordReplayBackend,
    ReplayMode,
    ReplayStore,
    RoutingDecision,
    RoutingMode,
    RunMode,
    SamplingConfig,
    StrategyChoice,
    TokenRecord,
    TokenStage,
    average_reduction,
    classify,
    diff_summaries,
    display_int,
    display_pct,
    generate_direct,
    generate_icot,
    load_benchmark,
    pass_at_k,
    reduction,
    render_direct_prompt,
    render_icot_stage1_prompt,
    render_icot_stage2_prompt,
    run_pipeline,
    summarize,
    task_cost,
)
from routegen.corpus import bundled_benchmark_path
from routegen.pipeline import RunConfig
from routegen.prompts import DEFAULT_DIRECT_EXEMPLARS

from . import token_fixtures
from .conftest import (
    CLASSIFIER_REPLIES,
    make_task,
    pass_all_executor,
    repeating_mock,
    three_task_benchmark,
)
from .oracles import pass_at_k_by_enumeration


def test_pass_at_k_matches_exhaustive_enumeration():
    started = time.monotonic()
    for n in range(1, 11):
        for c in range(0, n + 1):
            for k in range(1, n + 1):
                exact = pass_at_k(n, c, k)
                oracle = pass_at_k_by_enumeration(n, c, k)
                assert abs(float(exact) - float(oracle)) < 1e-12, (n, c, k)
                assert exact == oracle, (n, c, k)
    assert pass_at_k(5, 2, 1) == Fraction(2, 5)
    assert pass_at_k(20, 20, 1) == 1
    assert pass_at_k(20, 0, 5) == 0
    assert time.monotonic() - started < 5.0


def test_token_reduction_cells_reproduce_published_numbers():
    started = time.monotonic()
    for scale, data in token_fixtures.SCALES.items():
        for baseline_name, baseline_totals in data["baselines"].items():
            rows = []
            for benchmark in token_fixtures.BENCHMARKS:
                row = reduction(
                    baseline_totals[benchmark],
                    data["routed"][benchmark],
                    benchmark=benchmark,
                    baseline_name=baseline_name,
                )
                rows.append(row)
                expected_abs, expected_pct = data["expected"][baseline_name][benchmark]
                assert row.reduction_abs == expected_abs, (scale, baseline_name, benchmark)
                assert display_pct(row.reduction_pct) == expected_pct
                # The displayed figure sits within a hundredth of a point.
                assert abs(float(row.reduction_pct) * 100 - float(expected_pct)) <= 0.005 + 1e-9
            avg = average_reduction(rows)
            expected_abs, expected_pct = data["expected"][baseline_name]["Avg"]
            assert f"{display_int(avg.reduction_abs):,}" == expected_abs
            assert display_pct(avg.reduction_pct) == expected_pct
    # The four cells worth calling out by value.
    assert token_fixtures.SCALES["3B"]["expected"]["S"]["HumanEval"] == (881_666, "21.04")
    assert token_fixtures.SCALES["6.7B"]["expected"]["S"]["MBPP-sanitized"] == (8_741_828, "59.22")
    assert token_fixtures.SCALES["3B"]["expected"]["S"]["Avg"] == ("2,659,698", "46.57")
    assert token_fixtures.SCALES["V3"]["expected"]["I"]["Avg"] == ("714,106", "40.59")
    assert time.monotonic() - started < 1.0


def test_cost_shapes_for_synthetic_transcripts():
    started = time.monotonic()
    complex_transcript = (
        TokenRecord(TokenStage.ICOT_STAGE1_PROMPT, 100, "t", 0),
        TokenRecord(TokenStage.ICOT_TRACE, 50, "t", 1),
        TokenRecord(TokenStage.ICOT_TRACE, 60, "t", 2),
        TokenRecord(TokenStage.ICOT_STAGE2_PROMPT, 150, "t", 3),
        TokenRecord(TokenStage.ICOT_CODE, 40, "t", 4),
        TokenRecord(TokenStage.ICOT_STAGE2_PROMPT, 160, "t", 5),
        TokenRecord(TokenStage.ICOT_CODE, 45, "t", 6),
    )
    cost = task_cost(complex_transcript, DifficultyLabel.COMPLEX)
    assert (cost.c_in, cost.c_out, cost.total) == (410, 195, 605)

    def simple_cost(n: int):
        records = [TokenRecord(TokenStage.DIRECT_PROMPT, 120, "t", 0)]
        records += [TokenRecord(TokenStage.DIRECT_CODE, 30 + i, "t", i + 1) for i in range(n)]
        return task_cost(tuple(records), DifficultyLabel.SIMPLE)

    # The direct prompt is charged once no matter how many samples ride on it.
    assert {simple_cost(n).c_in for n in (1, 2, 5, 20)} == {120}
    assert time.monotonic() - started < 1.0


def test_replayed_classifier_fixtures_route_and_diff_as_published(tmp_path):
    started = time.monotonic()
    bench = load_benchmark(bundled_benchmark_path())
    tasks = {task.task_id: task for task in bench.tasks}
    order = sorted(CLASSIFIER_REPLIES)
    store = ReplayStore(tmp_path / "classifier.jsonl")
    recorder = RecordReplayBackend(
        store,
        ReplayMode.RECORD,
        MockBackend([CLASSIFIER_REPLIES[task_id] for task_id in order], model_name="cls"),
    )
    for task_id in order:
        classify(tasks[task_id], recorder, RoutingMode.EXTERNAL_CLASSIFIER)

    replayer = RecordReplayBackend(store, ReplayMode.REPLAY, model_name="cls")
    labels = {
        task_id: classify(tasks[task_id], replayer, RoutingMode.EXTERNAL_CLASSIFIER).label
        for task_id in order
    }
    for task_id in ("mini/sum_to_n", "mini/remove_vowels", "mini/below_threshold"):
        assert labels[task_id] is DifficultyLabel.SIMPLE, task_id
    for task_id in ("mini/monotonic", "mini/largest_prime_factor", "mini/triangle_area"):
        assert labels[task_id] is DifficultyLabel.COMPLEX, task_id

    def decision(task_id: str, label: DifficultyLabel) -> RoutingDecision:
        return RoutingDecision(task_id=task_id, label=label, rationale="",
                               source=RoutingMode.EXTERNAL_LABEL)

    # 164 tasks: 47 agree on Simple, 80 agree on Complex, 37 disagree.
    sides = [(DifficultyLabel.SIMPLE, DifficultyLabel.SIMPLE)] * 47
    sides += [(DifficultyLabel.SIMPLE, DifficultyLabel.COMPLEX)] * 6
    sides += [(DifficultyLabel.COMPLEX, DifficultyLabel.SIMPLE)] * 31
    sides += [(DifficultyLabel.COMPLEX, DifficultyLabel.COMPLEX)] * 80
    a = summarize(decision(f"t/{i}", pair[0]) for i, pair in enumerate(sides))
    b = summarize(decision(f"t/{i}", pair[1]) for i, pair in enumerate(sides))
    diff = diff_summaries(a, b)
    assert (diff.differing, diff.total) == (37, 164)
    assert display_pct(diff.rate) == "22.56"
    assert time.monotonic() - started < 1.0


def test_prompt_templates_carry_exemplars_and_caution():
    task = make_task("fix/render")
    direct = render_direct_prompt(task).text
    assert len(DEFAULT_DIRECT_EXEMPLARS) == 3
    for question, solution in DEFAULT_DIRECT_EXEMPLARS:
        assert question in direct
        assert solution in direct

    stage2 = render_icot_stage2_prompt(task, "1: Specification\nRead ints.\n2: Idea\nSum them.")
    assert "may contain errors" in stage2.text

    full = render_icot_stage1_prompt(task, Ablation.FULL).text
    no_spec = render_icot_stage1_prompt(task, Ablation.NO_SPECIFICATION).text
    no_idea = render_icot_stage1_prompt(task, Ablation.NO_IDEA).text
    assert "Specification" in full and "Idea" in full
    assert "Specification" not in no_spec and "Idea" in no_spec
    assert "Idea" not in no_idea and "Specification" in no_idea


def _replay_config(tmp_path, out_name: str) -> RunConfig:
    from routegen.backends import BackendConfig

    return RunConfig(
        benchmark_path=str(tmp_path / "unused.jsonl"),
        output_dir=str(tmp_path / out_name),
        mode=RunMode.EXTERNAL_LABEL,
        replay=ReplayMode.REPLAY,
        replay_store_path=str(tmp_path / "store.jsonl"),
        generator_backend=BackendConfig(endpoint="http://unused", model_name="gen"),
        sampling=SamplingConfig(n=2),
        run_name="acceptance",
    )


def test_replay_run_digests_are_deterministic_and_resumable(tmp_path):
    bench = three_task_benchmark()
    record_config = replace(_replay_config(tmp_path, "rec"), replay=ReplayMode.RECORD)
    golden = run_pipeline(
        record_config,
        benchmark=bench,
        generator_backend=repeating_mock(model_name="gen"),
        executor=pass_all_executor(),
    ).record["digest"]

    digests = [
        run_pipeline(
            _replay_config(tmp_path, f"replay-{i}"),
            benchmark=bench,
            executor=pass_all_executor(),
        ).record["digest"]
        for i in (1, 2)
    ]
    assert digests == [golden, golden]

    # Interrupted run: two tasks land in the event log, then the full set
    # resumes into the same directory and must fold to the golden digest.
    prefix = Benchmark(name=bench.name, tasks=bench.tasks[:2])
    resumed_config = _replay_config(tmp_path, "resumed")
    run_pipeline(resumed_config, benchmark=prefix, executor=pass_all_executor())
    resumed = run_pipeline(resumed_config, benchmark=bench, executor=pass_all_executor())
    assert resumed.record["digest"] == golden


def test_transcript_shapes_direct_and_icot():
    task = make_task("fix/shape")
    cfg = SamplingConfig(n=3)

    prose = "No code here, just words about the approach."
    direct = generate_direct(task, cfg, MockBackend([
        ["def solution():\n    return 1\n", prose, "def solution():\n    return 3\n"],
    ]))
    assert len(direct.transcript) == 1 + cfg.n
    assert len(direct.candidates) == cfg.n
    assert [c.code for c in direct.candidates][1] == ""
    assert "NoCode" in direct.candidates[1].flags

    trace = "1: Specification\nInts in, int out.\n2: Idea\nFold left.\n"
    icot = generate_icot(task, cfg, MockBackend([
        [trace, trace, trace],
        "def solution():\n    return 1\n",
        prose,
        "def solution():\n    return 3\n",
    ]))
    assert len(icot.transcript) == 1 + 3 * cfg.n
    assert len(icot.candidates) == cfg.n
    assert "NoCode" in icot.candidates[1].flags
    assert icot.strategy is StrategyChoice.ICOT
