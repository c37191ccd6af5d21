"""Candidate generation: direct few-shot sampling or two-stage decoding.

The direct strategy renders one few-shot prompt and samples n programs from
it. The two-stage strategy first samples n structured solving processes
(each a Specification section plus an Idea section), then greedily decodes
one program per process from its own stage-2 prompt. Both strategies return
exactly n candidates plus a token transcript holding, in call order, every
prompt and completion count the ledger needs.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping

from .backends import DecodeMode, GenerationRequest
from .corpus import Task
from .ledger import TokenRecord, TokenStage
from .prompts import (
    Ablation,
    TemplateLibrary,
    render_direct_prompt,
    render_icot_stage1_prompt,
    render_icot_stage2_prompt,
)
from .router import RoutingDecision, StrategyChoice, route

NO_CODE = "NoCode"
MALFORMED_TRACE = "Malformed"

DEFAULT_STAGE_BUDGETS: Mapping[str, int] = {
    "Direct": 300,
    "SelfCotStyle": 600,
    "IcotStage1": 300,
    "IcotStage2": 300,
}

_FENCE_RE = re.compile(r"```[^\n]*\n(.*?)```", re.DOTALL)
_DEF_RE = re.compile(r"^[ \t]*(?:async[ \t]+)?def[ \t]+\w", re.MULTILINE)
_CODE_START_RE = re.compile(
    r"^[ \t]*(?:(?:async[ \t]+)?def[ \t]+\w|class[ \t]+\w|@\w|import[ \t]+\w|from[ \t]+\S+[ \t]+import\b)",
    re.MULTILINE,
)
_HEADING_RE = re.compile(
    r"^[ \t]*(?:[#>*-]{1,6}[ \t]*)*(?:\*\*)?(?:\d+[ \t]*[:.)][ \t]*)?(?:\*\*)?[ \t]*(Specification|Idea)\b",
    re.IGNORECASE | re.MULTILINE,
)


@dataclass(frozen=True)
class SamplingConfig:
    n: int = 20
    temperature: float = 0.8
    top_p: float = 0.95
    max_new_tokens_stage: Mapping[str, int] = field(default_factory=lambda: dict(DEFAULT_STAGE_BUDGETS))

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if not 0 < self.top_p <= 1:
            raise ValueError("top_p must be in (0, 1]")
        missing = set(DEFAULT_STAGE_BUDGETS) - set(self.max_new_tokens_stage)
        if missing:
            raise ValueError(f"max_new_tokens_stage missing {sorted(missing)}")

    def budget(self, stage: str) -> int:
        return int(self.max_new_tokens_stage[stage])


@dataclass(frozen=True)
class IntentionTrace:
    specification: str
    idea: str
    raw: str
    index: int
    flags: tuple[str, ...] = ()

    def to_record(self) -> dict:
        return {
            "specification": self.specification,
            "idea": self.idea,
            "raw": self.raw,
            "index": self.index,
            "flags": list(self.flags),
        }


@dataclass(frozen=True)
class Candidate:
    code: str
    origin: StrategyChoice
    raw_completion: str
    task_id: str
    trace_index: int | None = None
    flags: tuple[str, ...] = ()

    @property
    def no_code(self) -> bool:
        return NO_CODE in self.flags

    def to_record(self) -> dict:
        return {
            "code": self.code,
            "origin": self.origin.value,
            "trace_index": self.trace_index,
            "raw_completion": self.raw_completion,
            "task_id": self.task_id,
            "flags": list(self.flags),
        }


@dataclass(frozen=True)
class GenerationResult:
    task_id: str
    strategy: StrategyChoice
    candidates: tuple[Candidate, ...]
    traces: tuple[IntentionTrace, ...]
    transcript: tuple[TokenRecord, ...]

    def to_record(self) -> dict:
        return {
            "task_id": self.task_id,
            "strategy": self.strategy.value,
            "candidates": [c.to_record() for c in self.candidates],
            "traces": [t.to_record() for t in self.traces],
            "transcript": [
                {
                    "stage": r.stage.value,
                    "tokens": r.tokens,
                    "task_id": r.task_id,
                    "call_ordinal": r.call_ordinal,
                }
                for r in self.transcript
            ],
        }


def extract_code(raw_completion: str) -> str | None:
    """Pull program text out of a completion; None means no code found.

    The first fenced block wins when fences are present; otherwise the text
    from the first definition-ish line (def, class, import, decorator) to the
    end is taken, provided a function definition appears at all. The result
    is stable under re-extraction.
    """
    fence = _FENCE_RE.search(raw_completion)
    scope = fence.group(1) if fence else raw_completion
    if not _DEF_RE.search(scope):
        return None
    start = _CODE_START_RE.search(scope)
    return scope[start.start() :]


def parse_intention(
    raw: str,
    expect_specification: bool = True,
    expect_idea: bool = True,
) -> tuple[str, str, tuple[str, ...]]:
    """Split a solving process into its (specification, idea) sections.

    Heading detection tolerates numbering ("1:", "2."), markdown hashes, and
    bold markers. A section that was expected but not found comes back empty
    with a Malformed flag.
    """
    matches = list(_HEADING_RE.finditer(raw))
    spec_match = next((m for m in matches if m.group(1).lower() == "specification"), None)
    idea_floor = spec_match.end() if spec_match else 0
    idea_match = next(
        (m for m in matches if m.group(1).lower() == "idea" and m.start() >= idea_floor), None
    )

    def section(begin: re.Match | None, end_at: int) -> str:
        if begin is None:
            return ""
        return raw[begin.end() : end_at].lstrip(" \t:*").strip()

    specification = section(spec_match, idea_match.start() if idea_match else len(raw))
    idea = section(idea_match, len(raw))
    flags: tuple[str, ...] = ()
    if (expect_specification and not specification) or (expect_idea and not idea):
        flags = (MALFORMED_TRACE,)
    return specification, idea, flags


def generate_direct(
    task: Task,
    cfg: SamplingConfig,
    backend: object,
    exemplars: tuple[tuple[str, str], ...] | None = None,
    library: TemplateLibrary | None = None,
) -> GenerationResult:
    """Sample n programs from one few-shot prompt."""
    rendered = render_direct_prompt(task, exemplars, library)
    request = GenerationRequest(
        prompt_text=rendered.text,
        decode=DecodeMode.SAMPLED,
        temperature=cfg.temperature,
        top_p=cfg.top_p,
        n=cfg.n,
        max_new_tokens=cfg.budget("Direct"),
    )
    response = backend.generate(request)
    candidates = []
    transcript = [TokenRecord(TokenStage.DIRECT_PROMPT, response.prompt_tokens, task.task_id, 0)]
    for i, completion in enumerate(response.completions):
        code = extract_code(completion)
        candidates.append(
            Candidate(
                code=code or "",
                origin=StrategyChoice.DIRECT,
                raw_completion=completion,
                task_id=task.task_id,
                flags=() if code else (NO_CODE,),
            )
        )
        transcript.append(
            TokenRecord(TokenStage.DIRECT_CODE, response.completion_tokens[i], task.task_id, i + 1)
        )
    return GenerationResult(
        task_id=task.task_id,
        strategy=StrategyChoice.DIRECT,
        candidates=tuple(candidates),
        traces=(),
        transcript=tuple(transcript),
    )


def generate_icot(
    task: Task,
    cfg: SamplingConfig,
    backend: object,
    ablation: Ablation = Ablation.FULL,
    library: TemplateLibrary | None = None,
) -> GenerationResult:
    """Sample n solving processes, then greedily decode one program per process.

    Stage 2 issues one independent greedy call per trace, so the transcript
    carries one stage-1 prompt count, n trace counts, and n (stage-2 prompt,
    program) count pairs in trace order. Malformed traces still reach stage 2
    with their raw text.
    """
    rendered1 = render_icot_stage1_prompt(task, ablation, library)
    stage1_request = GenerationRequest(
        prompt_text=rendered1.text,
        decode=DecodeMode.SAMPLED,
        temperature=cfg.temperature,
        top_p=cfg.top_p,
        n=cfg.n,
        max_new_tokens=cfg.budget("IcotStage1"),
    )
    stage1 = backend.generate(stage1_request)

    expect_spec = ablation is not Ablation.NO_SPECIFICATION
    expect_idea = ablation is not Ablation.NO_IDEA
    traces = []
    transcript = [TokenRecord(TokenStage.ICOT_STAGE1_PROMPT, stage1.prompt_tokens, task.task_id, 0)]
    for i, completion in enumerate(stage1.completions):
        specification, idea, flags = parse_intention(completion, expect_spec, expect_idea)
        traces.append(
            IntentionTrace(
                specification=specification,
                idea=idea,
                raw=completion,
                index=i + 1,
                flags=flags,
            )
        )
        transcript.append(
            TokenRecord(TokenStage.ICOT_TRACE, stage1.completion_tokens[i], task.task_id, i + 1)
        )

    candidates = []
    ordinal = cfg.n + 1
    for trace in traces:
        rendered2 = render_icot_stage2_prompt(task, trace.raw or " ", library)
        stage2_request = GenerationRequest(
            prompt_text=rendered2.text,
            decode=DecodeMode.GREEDY,
            max_new_tokens=cfg.budget("IcotStage2"),
        )
        stage2 = backend.generate(stage2_request)
        completion = stage2.completions[0]
        code = extract_code(completion)
        candidates.append(
            Candidate(
                code=code or "",
                origin=StrategyChoice.ICOT,
                raw_completion=completion,
                task_id=task.task_id,
                trace_index=trace.index,
                flags=() if code else (NO_CODE,),
            )
        )
        transcript.append(
            TokenRecord(TokenStage.ICOT_STAGE2_PROMPT, stage2.prompt_tokens, task.task_id, ordinal)
        )
        transcript.append(
            TokenRecord(TokenStage.ICOT_CODE, stage2.completion_tokens[0], task.task_id, ordinal + 1)
        )
        ordinal += 2

    return GenerationResult(
        task_id=task.task_id,
        strategy=StrategyChoice.ICOT,
        candidates=tuple(candidates),
        traces=tuple(traces),
        transcript=tuple(transcript),
    )


def run_strategy(
    task: Task,
    decision: RoutingDecision,
    cfg: SamplingConfig,
    backend: object,
    ablation: Ablation = Ablation.FULL,
    exemplars: tuple[tuple[str, str], ...] | None = None,
    library: TemplateLibrary | None = None,
) -> GenerationResult:
    """Dispatch on the routed strategy; the transcript suffices for costing."""
    strategy = route(decision)
    if strategy is StrategyChoice.DIRECT:
        return generate_direct(task, cfg, backend, exemplars, library)
    return generate_icot(task, cfg, backend, ablation, library)
