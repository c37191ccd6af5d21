"""Record a full pipeline run against a scripted backend, then replay it.

The first pass talks to the (mock) model and writes every response into a
replay store. The two replay passes never touch a backend; they rebuild the
run purely from the store and must land on the same run-record digest as
the recording, which is the property that makes experiments auditable.
"""

import tempfile
from dataclasses import replace
from pathlib import Path

from routegen import (
    BackendConfig,
    MockBackend,
    ReplayMode,
    RunConfig,
    RunMode,
    SamplingConfig,
    ScriptedExecutor,
    VerdictStatus,
    run_pipeline,
)
from routegen.corpus import bundled_benchmark_path

TRACE = """1: Specification
Inputs and outputs exactly as the signature says; no extra I/O.
2: Idea
Walk the input once and accumulate the answer. Time complexity O(n).
"""

CODE = '```python\ndef solution(*args, **kwargs):\n    return None\n```\n'


def scripted_reply(request):
    """Shape-appropriate replies: traces for stage 1, code everywhere else."""
    if "1: Specification" in request.prompt_text or "1: Idea" in request.prompt_text:
        return [TRACE] * request.n
    return [CODE] * request.n


def config_for(workdir: Path, name: str, mode: ReplayMode) -> RunConfig:
    return RunConfig(
        benchmark_path=str(bundled_benchmark_path()),
        output_dir=str(workdir / name),
        mode=RunMode.EXTERNAL_LABEL,
        replay=mode,
        replay_store_path=str(workdir / "store.jsonl"),
        generator_backend=BackendConfig(endpoint="http://unused", model_name="demo-gen"),
        sampling=SamplingConfig(n=2),
        k_values=(1, 2),
        run_name="demo",
    )


def main() -> None:
    workdir = Path(tempfile.mkdtemp(prefix="routegen-demo-"))
    print(f"working under {workdir}\n")

    executor = ScriptedExecutor(default=VerdictStatus.PASS)
    recording = run_pipeline(
        config_for(workdir, "recorded", ReplayMode.RECORD),
        generator_backend=MockBackend([scripted_reply] * 400, model_name="demo-gen"),
        executor=executor,
    ).record
    print(f"recorded run: {recording['task_count']} tasks, "
          f"{recording['totals']['total']} tokens")
    print(f"  digest {recording['digest'][:16]}…")
    store_lines = (workdir / "store.jsonl").read_text().count("\n")
    print(f"  replay store holds {store_lines} responses\n")

    digests = []
    for attempt in (1, 2):
        replayed = run_pipeline(
            config_for(workdir, f"replayed-{attempt}", ReplayMode.REPLAY),
            executor=ScriptedExecutor(default=VerdictStatus.PASS),
        ).record
        digests.append(replayed["digest"])
        print(f"replay {attempt}: digest {replayed['digest'][:16]}…")

    print()
    print("replays deterministic:", digests[0] == digests[1])
    print("replay matches recording:", digests[0] == recording["digest"])


if __name__ == "__main__":
    main()
