"""Run candidate programs against their test suites and print the verdicts.

Uses the sandboxed runner when the companion package is installed; otherwise
falls back to an in-process oracle so the demo still tells the story. The
fallback execs trusted fixture code only, never model output.
"""

import importlib.util
import sys

from routegen import (
    ExecutionJob,
    ScriptedExecutor,
    SubprocessRunnerExecutor,
    VerdictStatus,
    load_benchmark,
    reference_program,
)
from routegen.corpus import bundled_benchmark_path

LOOPER = "def loop_forever(*args, **kwargs):\n    while True:\n        pass\n"


def in_process_oracle(job: ExecutionJob) -> VerdictStatus:
    scope: dict = {}
    try:
        exec(job.code, scope)
        exec(job.test_suite, scope)
        scope["check"](scope[job.entry_point])
    except AssertionError:
        return VerdictStatus.FAIL
    except Exception:
        return VerdictStatus.RUNTIME_ERROR
    return VerdictStatus.PASS


def build_executor():
    if importlib.util.find_spec("sandbox_runner") is not None:
        print("using the sandboxed runner\n")
        return SubprocessRunnerExecutor([sys.executable, "-m", "sandbox_runner"]), True
    print("sandbox runner not installed; falling back to the in-process oracle\n")
    return ScriptedExecutor(oracle=in_process_oracle), False


def main() -> None:
    bench = load_benchmark(bundled_benchmark_path())
    executor, sandboxed = build_executor()

    for task in bench.tasks:
        job = ExecutionJob(
            code=reference_program(task),
            test_suite=task.test_suite,
            entry_point=task.entry_point,
            timeout_s=5.0,
        )
        verdict = executor.execute(job)
        print(f"  {task.task_id:28s} {verdict.status.value}")

    # A wrong program must fail, not error out.
    sum_to_n = next(t for t in bench.tasks if t.task_id == "mini/sum_to_n")
    mutant = ExecutionJob(
        code="def sum_to_n(n: int):\n    return 41\n",
        test_suite=sum_to_n.test_suite,
        entry_point="sum_to_n",
        timeout_s=5.0,
    )
    print(f"\n  constant mutant of sum_to_n:  {executor.execute(mutant).status.value}")

    if sandboxed:
        runaway = ExecutionJob(
            code=LOOPER,
            test_suite="def check(candidate):\n    candidate()\n",
            entry_point="loop_forever",
            timeout_s=2.0,
        )
        print(f"  runaway loop (2s budget):     {executor.execute(runaway).status.value}")
    else:
        print("  (install the runner package to see the Timeout verdict)")


if __name__ == "__main__":
    main()
