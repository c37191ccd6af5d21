"""Pipeline orchestration: classify, route, generate, execute, account.

Each task flows through up to four stages (routing, generation, evaluation,
cost). Every completed stage appends one event to an append-only log keyed
by a digest of the task id, the stage, and the stage-relevant configuration,
so an interrupted run picks up exactly where it stopped and a config change
invalidates precisely the stages it affects. The run record is a fold over
those events; its content digest ignores wall-clock fields and filesystem
paths, which makes replayed runs byte-comparable.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Mapping

from .backends import (
    BackendConfig,
    HttpBackend,
    RecordReplayBackend,
    ReplayMode,
    ReplayStore,
)
from .corpus import Benchmark, load_benchmark
from .errors import ConfigError, RoutegenError
from .evaluator import aggregate, evaluate_task, score_records
from .generator import (
    GenerationResult,
    SamplingConfig,
    generate_direct,
    generate_icot,
)
from .ledger import TaskCost, TokenRecord, TokenStage, run_totals, task_cost
from .prompts import Ablation, TemplateLibrary
from .router import (
    DifficultyLabel,
    RoutingMode,
    StrategyChoice,
    classify,
)

logger = logging.getLogger(__name__)

EVENT_LOG_NAME = "events.jsonl"
RUN_RECORD_NAME = "run_record.json"
REPLAY_STORE_NAME = "replay.jsonl"

# Fields stripped before digesting: wall clock and filesystem locations.
_VOLATILE_KEYS = frozenset(("wall_time_s",))


class RunMode(str, Enum):
    EXTERNAL_CLASSIFIER = "ExternalClassifier"
    SELF_ROUTING = "SelfRouting"
    EXTERNAL_LABEL = "ExternalLabel"
    FORCED_DIRECT = "ForcedDirect"
    FORCED_ICOT = "ForcedIcot"


_FORCED_STRATEGY = {
    RunMode.FORCED_DIRECT: StrategyChoice.DIRECT,
    RunMode.FORCED_ICOT: StrategyChoice.ICOT,
}


@dataclass(frozen=True)
class RunConfig:
    benchmark_path: str
    output_dir: str
    mode: RunMode = RunMode.EXTERNAL_CLASSIFIER
    replay: ReplayMode = ReplayMode.LIVE
    replay_store_path: str | None = None
    classifier_backend: BackendConfig | None = None
    generator_backend: BackendConfig | None = None
    sampling: SamplingConfig = field(default_factory=SamplingConfig)
    ablation: Ablation = Ablation.FULL
    classifier_max_new_tokens: int = 128
    k_values: tuple[int, ...] = (1,)
    runner_cmd: tuple[str, ...] | None = None
    sandbox_workers: int = 4
    timeout_s: float = 10.0
    memory_limit_mb: int = 512
    template_dir: str | None = None
    benchmark_format: str = "jsonl"
    run_name: str = "run"

    def store_path(self) -> Path:
        if self.replay_store_path is not None:
            return Path(self.replay_store_path)
        return Path(self.output_dir) / REPLAY_STORE_NAME

    def semantic_snapshot(self) -> dict:
        """Config content that defines the run.

        Paths, pool sizes, and the replay mode are left out: they change
        where bytes come from or how fast, never what the run computes, so
        a recorded run and its replay fold to the same digest.
        """
        return {
            "mode": self.mode.value,
            "classifier_model": self.classifier_backend.model_name if self.classifier_backend else "",
            "generator_model": self.generator_backend.model_name if self.generator_backend else "",
            "sampling": {
                "n": self.sampling.n,
                "temperature": self.sampling.temperature,
                "top_p": self.sampling.top_p,
                "budgets": dict(self.sampling.max_new_tokens_stage),
            },
            "ablation": self.ablation.value,
            "classifier_max_new_tokens": self.classifier_max_new_tokens,
            "k_values": list(self.k_values),
            "timeout_s": self.timeout_s,
            "memory_limit_mb": self.memory_limit_mb,
            "run_name": self.run_name,
        }


class EventLog:
    """Append-only stage events: one JSON row per completed (task, stage)."""

    def __init__(self, path: str | Path) -> None:
        self._path = Path(path)
        self._rows: dict[tuple[str, str], dict] = {}
        if self._path.exists():
            with self._path.open(encoding="utf-8") as fh:
                for line in fh:
                    if not line.strip():
                        continue
                    row = json.loads(line)
                    self._rows[(row["task_id"], row["stage"])] = row

    def __len__(self) -> int:
        return len(self._rows)

    def lookup(self, task_id: str, stage: str, key: str) -> dict | None:
        row = self._rows.get((task_id, stage))
        if row is not None and row["key"] == key:
            return row["payload"]
        return None

    def append(self, task_id: str, stage: str, key: str, payload: dict) -> None:
        row = {"task_id": task_id, "stage": stage, "key": key, "payload": payload}
        self._rows[(task_id, stage)] = row
        self._path.parent.mkdir(parents=True, exist_ok=True)
        with self._path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")
            fh.flush()


def _digest_of(payload: object) -> str:
    canonical = json.dumps(payload, sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _scrub(value: object) -> object:
    if isinstance(value, dict):
        return {k: _scrub(v) for k, v in value.items() if k not in _VOLATILE_KEYS}
    if isinstance(value, list):
        return [_scrub(v) for v in value]
    return value


def run_record_digest(record: Mapping[str, object]) -> str:
    """Content digest of a run record, ignoring volatile fields."""
    body = {k: v for k, v in record.items() if k != "digest"}
    return _digest_of(_scrub(body))


@dataclass
class RunRecord:
    record: dict

    @property
    def digest(self) -> str:
        return self.record["digest"]

    def write(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.record, indent=2, ensure_ascii=False, sort_keys=True) + "\n",
            encoding="utf-8",
        )

    @classmethod
    def read(cls, path: str | Path) -> "RunRecord":
        return cls(record=json.loads(Path(path).read_text(encoding="utf-8")))


class Pipeline:
    """One configured run over one benchmark.

    Backends and the executor are injectable; when absent they are built
    from the config (HTTP backends wrapped for record/replay as configured).
    Passing ``do_generate=False`` gives a routing-only run, which is valid
    even for tasks without test suites.
    """

    def __init__(
        self,
        config: RunConfig,
        benchmark: Benchmark | None = None,
        classifier_backend: object | None = None,
        generator_backend: object | None = None,
        executor: object | None = None,
        library: TemplateLibrary | None = None,
    ) -> None:
        self.config = config
        if config.replay is ReplayMode.REPLAY and not config.store_path().exists():
            raise ConfigError(f"replay mode needs an existing store at {config.store_path()}")
        self.benchmark = benchmark if benchmark is not None else load_benchmark(
            config.benchmark_path, config.benchmark_format
        )
        self.library = library or TemplateLibrary(config.template_dir)
        self._template_fingerprint = self.library.fingerprint()
        self._executor = executor
        self._classifier = classifier_backend
        self._generator = generator_backend
        self._store: ReplayStore | None = None
        out = Path(config.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        self.events = EventLog(out / EVENT_LOG_NAME)

    # -- backend wiring -------------------------------------------------

    def _build_live(self, backend_config: BackendConfig | None, role: str) -> object:
        if backend_config is None:
            raise ConfigError(f"{role} backend required for mode {self.config.mode.value}")
        return HttpBackend(backend_config)

    def _wrap(self, backend: object | None, backend_config: BackendConfig | None, role: str) -> object:
        mode = self.config.replay
        if mode is ReplayMode.LIVE:
            return backend if backend is not None else self._build_live(backend_config, role)
        if self._store is None:
            self._store = ReplayStore(self.config.store_path())
        if mode is ReplayMode.RECORD:
            inner = backend if backend is not None else self._build_live(backend_config, role)
            return RecordReplayBackend(self._store, mode, inner)
        model_name = backend_config.model_name if backend_config else getattr(backend, "model_name", "replay")
        return RecordReplayBackend(self._store, mode, model_name=model_name)

    def generator_backend(self) -> object:
        if getattr(self, "_wrapped_generator", None) is None:
            self._wrapped_generator = self._wrap(self._generator, self.config.generator_backend, "generator")
        return self._wrapped_generator

    def classifier_backend(self) -> object:
        if self.config.mode is RunMode.SELF_ROUTING:
            return self.generator_backend()
        if getattr(self, "_wrapped_classifier", None) is None:
            self._wrapped_classifier = self._wrap(self._classifier, self.config.classifier_backend, "classifier")
        return self._wrapped_classifier

    def executor(self) -> object:
        if self._executor is None:
            from .execution import SubprocessRunnerExecutor

            if not self.config.runner_cmd:
                raise ConfigError("no runner configured and no executor injected")
            self._executor = SubprocessRunnerExecutor(
                self.config.runner_cmd, workers=self.config.sandbox_workers
            )
        return self._executor

    # -- stage keys -----------------------------------------------------

    def _routing_key(self, task_id: str) -> str:
        return _digest_of(
            {
                "task_id": task_id,
                "stage": "routing",
                "mode": self.config.mode.value,
                "model": self.config.classifier_backend.model_name
                if self.config.classifier_backend and self.config.mode is RunMode.EXTERNAL_CLASSIFIER
                else self.config.generator_backend.model_name
                if self.config.generator_backend and self.config.mode is RunMode.SELF_ROUTING
                else "",
                "max_new_tokens": self.config.classifier_max_new_tokens,
                "templates": self._template_fingerprint,
            }
        )

    def _generation_key(self, task_id: str, strategy: StrategyChoice) -> str:
        cfg = self.config
        return _digest_of(
            {
                "task_id": task_id,
                "stage": "generation",
                "strategy": strategy.value,
                "model": cfg.generator_backend.model_name if cfg.generator_backend else "",
                "n": cfg.sampling.n,
                "temperature": cfg.sampling.temperature,
                "top_p": cfg.sampling.top_p,
                "budgets": dict(cfg.sampling.max_new_tokens_stage),
                "ablation": cfg.ablation.value,
                "templates": self._template_fingerprint,
            }
        )

    def _evaluation_key(self, task_id: str, generation_key: str, test_suite: str) -> str:
        return _digest_of(
            {
                "task_id": task_id,
                "stage": "evaluation",
                "generation": generation_key,
                "timeout_s": self.config.timeout_s,
                "memory_limit_mb": self.config.memory_limit_mb,
                "test": hashlib.sha256(test_suite.encode("utf-8")).hexdigest(),
            }
        )

    def _cost_key(self, task_id: str, routing_key: str, generation_key: str) -> str:
        return _digest_of(
            {"task_id": task_id, "stage": "cost", "routing": routing_key, "generation": generation_key}
        )

    # -- stages ----------------------------------------------------------

    def _routing_stage(self, task) -> tuple[dict, str]:
        key = self._routing_key(task.task_id)
        cached = self.events.lookup(task.task_id, "routing", key)
        if cached is not None:
            return cached, key
        mode = self.config.mode
        if mode in _FORCED_STRATEGY:
            payload = {"forced": True, "strategy": _FORCED_STRATEGY[mode].value}
        elif mode is RunMode.EXTERNAL_LABEL:
            decision = classify(task, None, RoutingMode.EXTERNAL_LABEL)
            payload = {"forced": False, "decision": decision.to_record()}
        else:
            routing_mode = (
                RoutingMode.SELF_ROUTING if mode is RunMode.SELF_ROUTING else RoutingMode.EXTERNAL_CLASSIFIER
            )
            decision = classify(
                task,
                self.classifier_backend(),
                routing_mode,
                max_new_tokens=self.config.classifier_max_new_tokens,
                library=self.library,
            )
            payload = {"forced": False, "decision": decision.to_record()}
        self.events.append(task.task_id, "routing", key, payload)
        return payload, key

    @staticmethod
    def _strategy_of(routing_payload: dict) -> StrategyChoice:
        if routing_payload.get("forced"):
            return StrategyChoice(routing_payload["strategy"])
        decision = routing_payload["decision"]
        label = DifficultyLabel(decision["label"])
        return StrategyChoice.DIRECT if label is DifficultyLabel.SIMPLE else StrategyChoice.ICOT

    def _generation_stage(self, task, strategy: StrategyChoice) -> tuple[dict, str]:
        key = self._generation_key(task.task_id, strategy)
        cached = self.events.lookup(task.task_id, "generation", key)
        if cached is not None:
            return cached, key
        backend = self.generator_backend()
        if strategy is StrategyChoice.DIRECT:
            result = generate_direct(task, self.config.sampling, backend, library=self.library)
        else:
            result = generate_icot(
                task, self.config.sampling, backend, ablation=self.config.ablation, library=self.library
            )
        payload = result.to_record()
        self.events.append(task.task_id, "generation", key, payload)
        return payload, key

    def _evaluation_stage(self, task, generation_payload: dict, generation_key: str) -> tuple[dict, str]:
        key = self._evaluation_key(task.task_id, generation_key, task.test_suite)
        cached = self.events.lookup(task.task_id, "evaluation", key)
        if cached is not None:
            return cached, key
        result = _result_from_record(generation_payload)
        evaluation = evaluate_task(
            task,
            result,
            self.executor(),
            timeout_s=self.config.timeout_s,
            memory_limit_mb=self.config.memory_limit_mb,
        )
        payload = evaluation.to_record()
        self.events.append(task.task_id, "evaluation", key, payload)
        return payload, key

    def _cost_stage(
        self, task, routing_payload: dict, routing_key: str, generation_payload: dict, generation_key: str
    ) -> dict:
        key = self._cost_key(task.task_id, routing_key, generation_key)
        cached = self.events.lookup(task.task_id, "cost", key)
        if cached is not None:
            return cached
        transcript = list(_routing_records(task.task_id, routing_payload))
        transcript += [
            TokenRecord(
                stage=TokenStage(row["stage"]),
                tokens=row["tokens"],
                task_id=row["task_id"],
                call_ordinal=row["call_ordinal"],
            )
            for row in generation_payload["transcript"]
        ]
        strategy = StrategyChoice(generation_payload["strategy"])
        route_label = DifficultyLabel.SIMPLE if strategy is StrategyChoice.DIRECT else DifficultyLabel.COMPLEX
        cost = task_cost(transcript, route_label)
        payload = {
            "task_id": cost.task_id,
            "route": cost.route.value,
            "c_in": cost.c_in,
            "c_out": cost.c_out,
            "total": cost.total,
            "routing_tokens": cost.routing_tokens,
        }
        self.events.append(task.task_id, "cost", key, payload)
        return payload

    # -- run -------------------------------------------------------------

    def run(self, do_generate: bool = True, do_evaluate: bool = True) -> RunRecord:
        tasks_out: list[dict] = []
        failures = 0
        for task in self.benchmark:
            entry: dict = {"task_id": task.task_id}
            try:
                routing_payload, routing_key = self._routing_stage(task)
                entry["routing"] = routing_payload
                if do_generate:
                    strategy = self._strategy_of(routing_payload)
                    generation_payload, generation_key = self._generation_stage(task, strategy)
                    entry["generation"] = generation_payload
                    if do_evaluate and task.test_suite.strip():
                        evaluation_payload, _ = self._evaluation_stage(
                            task, generation_payload, generation_key
                        )
                        entry["evaluation"] = evaluation_payload
                    entry["cost"] = self._cost_stage(
                        task, routing_payload, routing_key, generation_payload, generation_key
                    )
            except RoutegenError as exc:
                logger.error("task %s failed: %s", task.task_id, exc)
                entry["failure"] = f"{type(exc).__name__}: {exc}"
                failures += 1
            tasks_out.append(entry)
        record = self._assemble(tasks_out, failures)
        run_record = RunRecord(record=record)
        run_record.write(Path(self.config.output_dir) / RUN_RECORD_NAME)
        return run_record

    def _assemble(self, tasks_out: list[dict], failures: int) -> dict:
        evaluations = []
        for entry in tasks_out:
            evaluation = entry.get("evaluation")
            if evaluation is not None:
                evaluations.append(evaluation)
        scores = {}
        for k in self.config.k_values:
            if evaluations and all(e["n"] >= k for e in evaluations):
                from .evaluator import TaskEvaluation
                from .execution import ExecutionVerdict, VerdictStatus

                objs = [
                    TaskEvaluation(
                        task_id=e["task_id"],
                        n=e["n"],
                        c=e["c"],
                        verdicts=tuple(
                            ExecutionVerdict(
                                status=VerdictStatus(v["status"]),
                                detail=v["detail"],
                                wall_time_s=v["wall_time_s"],
                            )
                            for v in e["verdicts"]
                        ),
                    )
                    for e in evaluations
                ]
                score = aggregate(objs, k)
                scores[str(k)] = score_records(
                    score,
                    benchmark=self.benchmark.name,
                    model=self.config.generator_backend.model_name if self.config.generator_backend else "",
                    strategy=self.config.mode.value,
                )
        costs = [
            TaskCost(
                task_id=entry["cost"]["task_id"],
                route=DifficultyLabel(entry["cost"]["route"]),
                c_in=entry["cost"]["c_in"],
                c_out=entry["cost"]["c_out"],
                total=entry["cost"]["total"],
                routing_tokens=entry["cost"]["routing_tokens"],
            )
            for entry in tasks_out
            if "cost" in entry
        ]
        totals = run_totals(costs)
        distribution = self._distribution(tasks_out)
        record = {
            "run_name": self.config.run_name,
            "benchmark": self.benchmark.name,
            "task_count": len(self.benchmark),
            "config": self.config.semantic_snapshot(),
            "tasks": tasks_out,
            "scores": scores,
            "totals": {
                "c_in": totals.c_in,
                "c_out": totals.c_out,
                "total": totals.total,
                "routing_total": totals.routing_total,
            },
            "distribution": distribution,
            "failures": failures,
        }
        record["digest"] = run_record_digest(record)
        return record

    @staticmethod
    def _distribution(tasks_out: list[dict]) -> dict | None:
        labels = []
        for entry in tasks_out:
            routing = entry.get("routing")
            if routing and not routing.get("forced"):
                labels.append(routing["decision"]["label"])
        if not labels:
            return None
        simple = sum(1 for label in labels if label == DifficultyLabel.SIMPLE.value)
        return {"Simple": simple, "Complex": len(labels) - simple, "total": len(labels)}


def _routing_records(task_id: str, routing_payload: dict) -> list[TokenRecord]:
    if routing_payload.get("forced"):
        return []
    decision = routing_payload["decision"]
    if decision["source"] == RoutingMode.EXTERNAL_LABEL.value:
        return []
    return [
        TokenRecord(TokenStage.ROUTING_PROMPT, decision["prompt_tokens"], task_id, 0),
        TokenRecord(TokenStage.ROUTING_REPLY, decision["reply_tokens"], task_id, 1),
    ]


def _result_from_record(payload: dict) -> GenerationResult:
    from .generator import Candidate, IntentionTrace

    return GenerationResult(
        task_id=payload["task_id"],
        strategy=StrategyChoice(payload["strategy"]),
        candidates=tuple(
            Candidate(
                code=c["code"],
                origin=StrategyChoice(c["origin"]),
                raw_completion=c["raw_completion"],
                task_id=c["task_id"],
                trace_index=c["trace_index"],
                flags=tuple(c["flags"]),
            )
            for c in payload["candidates"]
        ),
        traces=tuple(
            IntentionTrace(
                specification=t["specification"],
                idea=t["idea"],
                raw=t["raw"],
                index=t["index"],
                flags=tuple(t["flags"]),
            )
            for t in payload["traces"]
        ),
        transcript=tuple(
            TokenRecord(
                stage=TokenStage(r["stage"]),
                tokens=r["tokens"],
                task_id=r["task_id"],
                call_ordinal=r["call_ordinal"],
            )
            for r in payload["transcript"]
        ),
    )


def run_pipeline(
    config: RunConfig,
    benchmark: Benchmark | None = None,
    classifier_backend: object | None = None,
    generator_backend: object | None = None,
    executor: object | None = None,
    do_generate: bool = True,
    do_evaluate: bool = True,
) -> RunRecord:
    """Build a pipeline from ``config`` and run it to a RunRecord."""
    pipeline = Pipeline(
        config,
        benchmark=benchmark,
        classifier_backend=classifier_backend,
        generator_backend=generator_backend,
        executor=executor,
    )
    return pipeline.run(do_generate=do_generate, do_evaluate=do_evaluate)
