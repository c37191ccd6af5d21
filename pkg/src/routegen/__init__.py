"""Difficulty-aware routed code generation.

A classifier assigns each programming task a difficulty label; simple
tasks go to direct few-shot sampling, complex tasks to a two-stage
pipeline that first drafts an intention trace (specification plus idea)
and then writes code from it. Candidates run against test suites in a
sandbox, and exact token accounting makes routed and unrouted runs
comparable.
"""

from __future__ import annotations

from .backends import (
    BackendConfig,
    DecodeMode,
    GenerationRequest,
    GenerationResponse,
    HttpBackend,
    MockBackend,
    RecordReplayBackend,
    ReplayMode,
    ReplayStore,
    request_digest,
)
from .corpus import (
    Benchmark,
    Task,
    attach_external_labels,
    load_benchmark,
    load_bundled_benchmark,
    reference_program,
    serialize_benchmark,
)
from .errors import (
    AuthFailure,
    BackendError,
    BenchmarkMismatch,
    ConfigError,
    DomainError,
    DuplicateDecision,
    DuplicateTaskId,
    EmptyFile,
    MalformedResponse,
    MissingField,
    ProtocolError,
    RateLimited,
    ReplayMiss,
    RoutegenError,
    RunnerUnavailable,
    ShapeMismatch,
    Transport,
    UnknownTaskId,
)
from .evaluator import (
    BenchmarkScore,
    TaskEvaluation,
    aggregate,
    evaluate_task,
    pass_at_k,
    pass_table,
)
from .execution import (
    ExecutionJob,
    ExecutionVerdict,
    ScriptedExecutor,
    SubprocessRunnerExecutor,
    VerdictStatus,
)
from .generator import (
    Candidate,
    GenerationResult,
    IntentionTrace,
    SamplingConfig,
    extract_code,
    generate_direct,
    generate_icot,
    parse_intention,
    run_strategy,
)
from .ledger import (
    ReductionReport,
    RunTotals,
    TaskCost,
    TokenRecord,
    TokenStage,
    average_reduction,
    display_int,
    display_pct,
    reduction,
    routing_cost,
    run_totals,
    task_cost,
    token_report,
)
from .pipeline import (
    EventLog,
    Pipeline,
    RunConfig,
    RunMode,
    RunRecord,
    run_pipeline,
    run_record_digest,
)
from .prompts import (
    Ablation,
    PromptKind,
    PromptVariant,
    RenderedPrompt,
    TemplateLibrary,
    render_classifier_prompt,
    render_direct_prompt,
    render_icot_stage1_prompt,
    render_icot_stage2_prompt,
)
from .reporting import distribution_line, report
from .router import (
    DifficultyLabel,
    RoutingDecision,
    RoutingMode,
    RoutingSummary,
    StrategyChoice,
    SummaryDiff,
    classify,
    diff_summaries,
    parse_label,
    route,
    summarize,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # corpus
    "Task",
    "Benchmark",
    "load_benchmark",
    "serialize_benchmark",
    "attach_external_labels",
    "reference_program",
    "load_bundled_benchmark",
    # routing
    "DifficultyLabel",
    "StrategyChoice",
    "RoutingMode",
    "RoutingDecision",
    "RoutingSummary",
    "SummaryDiff",
    "classify",
    "route",
    "parse_label",
    "summarize",
    "diff_summaries",
    # prompts
    "PromptKind",
    "Ablation",
    "PromptVariant",
    "RenderedPrompt",
    "TemplateLibrary",
    "render_classifier_prompt",
    "render_direct_prompt",
    "render_icot_stage1_prompt",
    "render_icot_stage2_prompt",
    # backends
    "DecodeMode",
    "ReplayMode",
    "GenerationRequest",
    "GenerationResponse",
    "BackendConfig",
    "HttpBackend",
    "MockBackend",
    "ReplayStore",
    "RecordReplayBackend",
    "request_digest",
    # generation
    "SamplingConfig",
    "IntentionTrace",
    "Candidate",
    "GenerationResult",
    "extract_code",
    "parse_intention",
    "generate_direct",
    "generate_icot",
    "run_strategy",
    # execution
    "ExecutionJob",
    "ExecutionVerdict",
    "VerdictStatus",
    "SubprocessRunnerExecutor",
    "ScriptedExecutor",
    # evaluation
    "TaskEvaluation",
    "BenchmarkScore",
    "pass_at_k",
    "evaluate_task",
    "aggregate",
    "pass_table",
    # accounting
    "TokenStage",
    "TokenRecord",
    "TaskCost",
    "RunTotals",
    "ReductionReport",
    "task_cost",
    "routing_cost",
    "run_totals",
    "reduction",
    "average_reduction",
    "display_int",
    "display_pct",
    "token_report",
    # pipeline
    "RunConfig",
    "RunMode",
    "RunRecord",
    "EventLog",
    "Pipeline",
    "run_pipeline",
    "run_record_digest",
    # reporting
    "distribution_line",
    "report",
    # errors
    "RoutegenError",
    "EmptyFile",
    "MissingField",
    "DuplicateTaskId",
    "UnknownTaskId",
    "BackendError",
    "Transport",
    "RateLimited",
    "MalformedResponse",
    "AuthFailure",
    "ReplayMiss",
    "DuplicateDecision",
    "RunnerUnavailable",
    "ProtocolError",
    "DomainError",
    "ShapeMismatch",
    "BenchmarkMismatch",
    "ConfigError",
]
