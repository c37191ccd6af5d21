"""Benchmark task records: loading, validation, and label attachment.

A benchmark is a line-delimited file of UTF-8 records, one task per line.
Required keys per record: ("task_id" | "name"), ("prompt" | "question"),
"entry_point", "test"; optional "canonical_solution" and "difficulty".
Any other keys are preserved as opaque metadata.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from .errors import DuplicateTaskId, EmptyFile, MissingField, UnknownTaskId

_ID_KEYS = ("task_id", "name")
_PROMPT_KEYS = ("prompt", "question")
_KNOWN_KEYS = frozenset(
    ("task_id", "name", "prompt", "question", "entry_point", "test", "canonical_solution", "difficulty")
)


@dataclass(frozen=True)
class Task:
    """One benchmark problem.

    ``prompt`` is the natural-language requirement plus function signature
    exactly as the benchmark ships it; ``test_suite`` is source text defining
    a ``check`` procedure that takes the entry-point function.
    """

    task_id: str
    prompt: str
    entry_point: str
    test_suite: str
    benchmark: str
    canonical_solution: str | None = None
    external_label: str | None = None
    metadata: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.task_id:
            raise ValueError("task_id must be non-empty")
        if not self.prompt:
            raise ValueError(f"task {self.task_id}: prompt must be non-empty")


@dataclass(frozen=True)
class Benchmark:
    name: str
    tasks: tuple[Task, ...]

    def __post_init__(self) -> None:
        if not self.tasks:
            raise ValueError(f"benchmark {self.name!r} has no tasks")
        seen: set[str] = set()
        for task in self.tasks:
            if task.task_id in seen:
                raise DuplicateTaskId(f"duplicate task_id {task.task_id!r} in benchmark {self.name!r}")
            seen.add(task.task_id)

    def __len__(self) -> int:
        return len(self.tasks)

    def __iter__(self):
        return iter(self.tasks)

    def task(self, task_id: str) -> Task:
        for task in self.tasks:
            if task.task_id == task_id:
                return task
        raise UnknownTaskId(f"no task {task_id!r} in benchmark {self.name!r}")


def _first_present(record: Mapping[str, object], keys: tuple[str, ...]) -> str | None:
    for key in keys:
        value = record.get(key)
        if value is not None:
            return key
    return None


def _parse_record(record: Mapping[str, object], index: int, benchmark_name: str) -> Task:
    id_key = _first_present(record, _ID_KEYS)
    if id_key is None:
        raise MissingField(index, "task_id")
    prompt_key = _first_present(record, _PROMPT_KEYS)
    if prompt_key is None:
        raise MissingField(index, "prompt")
    for required in ("entry_point", "test"):
        if record.get(required) is None:
            raise MissingField(index, required)
    metadata = {key: value for key, value in record.items() if key not in _KNOWN_KEYS}
    return Task(
        task_id=str(record[id_key]),
        prompt=str(record[prompt_key]),
        entry_point=str(record["entry_point"]),
        test_suite=str(record["test"]),
        benchmark=benchmark_name,
        canonical_solution=(None if record.get("canonical_solution") is None else str(record["canonical_solution"])),
        external_label=(None if record.get("difficulty") is None else str(record["difficulty"])),
        metadata=metadata,
    )


def load_benchmark(path: str | Path, format_hint: str = "jsonl", name: str | None = None) -> Benchmark:
    """Load a benchmark from ``path``, preserving on-disk record order.

    ``format_hint`` currently accepts only ``"jsonl"``. The benchmark name
    defaults to the file stem.
    """
    if format_hint != "jsonl":
        raise ValueError(f"unsupported format_hint {format_hint!r}")
    path = Path(path)
    benchmark_name = name if name is not None else path.stem
    tasks: list[Task] = []
    seen: set[str] = set()
    with path.open(encoding="utf-8") as fh:
        index = 0
        for line in fh:
            if not line.strip():
                continue
            record = json.loads(line)
            task = _parse_record(record, index, benchmark_name)
            if task.task_id in seen:
                raise DuplicateTaskId(f"duplicate task_id {task.task_id!r} at record {index}")
            seen.add(task.task_id)
            tasks.append(task)
            index += 1
    if not tasks:
        raise EmptyFile(f"{path}: no records")
    return Benchmark(name=benchmark_name, tasks=tuple(tasks))


def serialize_benchmark(benchmark: Benchmark, path: str | Path) -> None:
    """Write ``benchmark`` back out in the canonical record form.

    Loading the result yields tasks equal to the originals field for field.
    """
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for task in benchmark.tasks:
            record: dict[str, object] = {
                "task_id": task.task_id,
                "prompt": task.prompt,
                "entry_point": task.entry_point,
                "test": task.test_suite,
            }
            if task.canonical_solution is not None:
                record["canonical_solution"] = task.canonical_solution
            if task.external_label is not None:
                record["difficulty"] = task.external_label
            record.update(task.metadata)
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def attach_external_labels(benchmark: Benchmark, labels: Mapping[str, str]) -> Benchmark:
    """Return a copy of ``benchmark`` with ``labels`` attached by task id.

    Tasks absent from ``labels`` keep whatever label they already had.
    """
    known = {task.task_id for task in benchmark.tasks}
    for task_id in labels:
        if task_id not in known:
            raise UnknownTaskId(f"label for unknown task {task_id!r}")
    tasks = tuple(
        Task(
            task_id=task.task_id,
            prompt=task.prompt,
            entry_point=task.entry_point,
            test_suite=task.test_suite,
            benchmark=task.benchmark,
            canonical_solution=task.canonical_solution,
            external_label=labels.get(task.task_id, task.external_label),
            metadata=task.metadata,
        )
        for task in benchmark.tasks
    )
    return Benchmark(name=benchmark.name, tasks=tasks)


def reference_program(task: Task) -> str:
    """Prompt plus canonical solution: a complete, runnable reference program."""
    if task.canonical_solution is None:
        raise ValueError(f"task {task.task_id} has no canonical solution")
    return task.prompt + task.canonical_solution


def bundled_benchmark_path() -> Path:
    """Path of the small benchmark shipped with the package."""
    return Path(__file__).parent / "data" / "mini_benchmark.jsonl"


def load_bundled_benchmark() -> Benchmark:
    return load_benchmark(bundled_benchmark_path(), name="mini")
