"""Shared builders for the test suite.

Everything here is deterministic: mock backends derive replies from the
request text alone, and the scripted executor pins wall times to zero, so
any test built on these helpers can assert byte-identical artifacts.
"""

from __future__ import annotations

import stat
from pathlib import Path

import pytest

from routegen import (
    Benchmark,
    MockBackend,
    SamplingConfig,
    ScriptedExecutor,
    Task,
    VerdictStatus,
)

SIMPLE_MARKER = "# difficulty-probe: simple"


def make_task(
    task_id: str,
    prompt: str | None = None,
    entry_point: str = "solve",
    test_suite: str = "def check(candidate):\n    assert candidate(1) == 1\n",
    label: str | None = None,
    benchmark: str = "fixture",
) -> Task:
    if prompt is None:
        prompt = (
            f"def {entry_point}(x):\n"
            f'    """Return x unchanged. Task {task_id}."""\n'
        )
    return Task(
        task_id=task_id,
        prompt=prompt,
        entry_point=entry_point,
        test_suite=test_suite,
        benchmark=benchmark,
        external_label=label,
    )


def three_task_benchmark() -> Benchmark:
    """Two tasks marked simple, one complex, all with runnable-shaped tests."""
    tasks = (
        make_task(
            "fix/echo",
            prompt=f'def echo(x):\n    """Return x. {SIMPLE_MARKER}"""\n',
            entry_point="echo",
            label="simple",
        ),
        make_task(
            "fix/double",
            prompt=f'def double(x):\n    """Return 2*x. {SIMPLE_MARKER}"""\n',
            entry_point="double",
            test_suite="def check(candidate):\n    assert candidate(2) == 4\n",
            label="simple",
        ),
        make_task(
            "fix/knapsack",
            prompt='def knapsack(weights, values, cap):\n    """Maximize value under a weight cap."""\n',
            entry_point="knapsack",
            test_suite="def check(candidate):\n    assert candidate([1], [10], 1) == 10\n",
            label="complex",
        ),
    )
    return Benchmark(name="fixture", tasks=tasks)


def scripted_reply(request) -> list[str]:
    """Deterministic reply derived from the request text.

    Classifier prompts get a one-line label (simple when the task carries
    the probe marker), stage-1 prompts get a two-section solving process,
    everything else gets compilable code with a recognizable body.
    """
    text = request.prompt_text
    if "Simple, because" in text and "Complex, because" in text:
        if SIMPLE_MARKER in text:
            return ["Simple, because the body is a one-line return."]
        return ["Complex, because the search space needs dynamic programming."]
    if "solving process" in text and "write a code" in text:
        return ["```python\ndef solution(*args):\n    return args[0] if args else None\n```"]
    if "1: Specification" in text or "1: Idea" in text:
        trace = (
            "1: Specification\n"
            "  - Input: task arguments. Output: the required value.\n"
            "2: Idea: Apply the direct method, O(n)."
        )
        return [trace] * request.n
    return ["def solution(*args):\n    return args[0] if args else None"] * request.n


def repeating_mock(times: int = 400, model_name: str = "mock", fn=scripted_reply) -> MockBackend:
    return MockBackend([fn] * times, model_name=model_name)


def pass_all_executor() -> ScriptedExecutor:
    return ScriptedExecutor({}, default=VerdictStatus.PASS)


def write_fake_runner(tmp_path: Path, body: str, name: str = "fake_runner.py") -> list[str]:
    """Write a runner stand-in script and return the argv to invoke it."""
    script = tmp_path / name
    script.write_text(body, encoding="utf-8")
    script.chmod(script.stat().st_mode | stat.S_IXUSR)
    return ["python3", str(script)]


PASS_RUNNER_BODY = """\
import json, sys
job = json.loads(sys.stdin.read())
sys.stdout.write(json.dumps({"status": "Pass", "detail": "", "wall_time_s": 0.0}))
"""


# Classifier replies for six bundled fixture tasks, split three per label.
CLASSIFIER_REPLIES = {
    "mini/sum_to_n": "Simple, because it is one arithmetic formula over the first n integers.",
    "mini/remove_vowels": "Simple, because it filters characters against a fixed set in one pass.",
    "mini/below_threshold": "Simple, because comparing each element once settles the answer.",
    "mini/monotonic": "Complex, because the sequence must be validated against two orderings at once.",
    "mini/largest_prime_factor": "Complex, because it needs factorization with loop bounds that are easy to get wrong.",
    "mini/triangle_area": "Complex, because triangle validity must be checked before the area formula and rounding.",
}


@pytest.fixture
def bench3() -> Benchmark:
    return three_task_benchmark()


@pytest.fixture
def sampling2() -> SamplingConfig:
    return SamplingConfig(n=2)
