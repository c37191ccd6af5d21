"""Difficulty decisions and the label-to-strategy mapping.

A task is labeled Simple or Complex by one of three sources: a dedicated
classifier model, the generation model itself (self-routing), or a label
shipped with the benchmark. Simple tasks go to direct few-shot generation,
Complex tasks to the two-stage intention-guided strategy; nothing besides
the label influences the choice. When a classifier reply names neither
label the task falls back to Complex with a parse-failure flag, degrading
cost rather than correctness.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping

from .backends import DecodeMode, GenerationRequest
from .corpus import Task
from .errors import BenchmarkMismatch, DuplicateDecision
from .prompts import TemplateLibrary, render_classifier_prompt

ROUTING_PARSE_FAILURE = "RoutingParseFailure"
CLASSIFIER_MAX_NEW_TOKENS_DEFAULT = 128

_SIMPLE_EXTERNAL_LABELS = frozenset(("simple", "easy"))
_LABEL_RE = re.compile(r"\b(simple|complex)\b", re.IGNORECASE)
_RATIONALE_RE = re.compile(r"\bbecause\b.*", re.IGNORECASE | re.DOTALL)


class DifficultyLabel(str, Enum):
    SIMPLE = "Simple"
    COMPLEX = "Complex"


class RoutingMode(str, Enum):
    EXTERNAL_CLASSIFIER = "ExternalClassifier"
    SELF_ROUTING = "SelfRouting"
    EXTERNAL_LABEL = "ExternalLabel"


class StrategyChoice(str, Enum):
    DIRECT = "Direct"
    ICOT = "Icot"


@dataclass(frozen=True)
class RoutingDecision:
    task_id: str
    label: DifficultyLabel
    rationale: str
    source: RoutingMode
    raw_reply: str = ""
    flags: tuple[str, ...] = ()
    prompt_tokens: int = 0
    reply_tokens: int = 0

    def to_record(self) -> dict:
        return {
            "task_id": self.task_id,
            "label": self.label.value,
            "rationale": self.rationale,
            "source": self.source.value,
            "raw_reply": self.raw_reply,
            "flags": list(self.flags),
            "prompt_tokens": self.prompt_tokens,
            "reply_tokens": self.reply_tokens,
        }


@dataclass(frozen=True)
class RoutingSummary:
    simple_count: int
    complex_count: int
    total: int
    per_task: Mapping[str, DifficultyLabel]

    def __post_init__(self) -> None:
        if self.simple_count + self.complex_count != self.total:
            raise ValueError("label counts must partition the task set")


@dataclass(frozen=True)
class SummaryDiff:
    differing: int
    total: int
    rate: Fraction


def parse_label(reply: str) -> tuple[DifficultyLabel, str, tuple[str, ...]]:
    """Pull (label, rationale, flags) out of a classifier reply.

    Case-insensitive word scan; when both labels appear the first one wins.
    The rationale is the reply's "because ..." clause when present, else the
    whole reply. Neither label present means Complex plus a parse flag.
    """
    match = _LABEL_RE.search(reply)
    rationale_match = _RATIONALE_RE.search(reply)
    rationale = rationale_match.group(0).strip() if rationale_match else reply.strip()
    if match is None:
        return DifficultyLabel.COMPLEX, rationale, (ROUTING_PARSE_FAILURE,)
    label = DifficultyLabel.SIMPLE if match.group(1).lower() == "simple" else DifficultyLabel.COMPLEX
    return label, rationale, ()


def label_from_external(text: str) -> DifficultyLabel:
    """Map a benchmark-supplied difficulty label onto the two-label space."""
    return (
        DifficultyLabel.SIMPLE
        if text.strip().lower() in _SIMPLE_EXTERNAL_LABELS
        else DifficultyLabel.COMPLEX
    )


def classify(
    task: Task,
    backend: object | None,
    mode: RoutingMode,
    max_new_tokens: int = CLASSIFIER_MAX_NEW_TOKENS_DEFAULT,
    library: TemplateLibrary | None = None,
) -> RoutingDecision:
    """Produce one routing decision for ``task``.

    Classifier modes make exactly one greedy call; ExternalLabel reads the
    task's shipped label and never touches a model. Token usage of the call
    rides along on the decision for the ledger.
    """
    if mode is RoutingMode.EXTERNAL_LABEL:
        if task.external_label is None:
            raise ValueError(f"task {task.task_id} has no external label")
        return RoutingDecision(
            task_id=task.task_id,
            label=label_from_external(task.external_label),
            rationale="",
            source=mode,
        )
    if backend is None:
        raise ValueError(f"{mode.value} routing requires a classifier backend")
    rendered = render_classifier_prompt(task, library)
    request = GenerationRequest(
        prompt_text=rendered.text,
        decode=DecodeMode.GREEDY,
        max_new_tokens=max_new_tokens,
    )
    response = backend.generate(request)
    reply = response.completions[0]
    label, rationale, flags = parse_label(reply)
    return RoutingDecision(
        task_id=task.task_id,
        label=label,
        rationale=rationale,
        source=mode,
        raw_reply=reply,
        flags=flags,
        prompt_tokens=response.prompt_tokens,
        reply_tokens=response.completion_tokens[0],
    )


def route(decision: RoutingDecision) -> StrategyChoice:
    """Simple goes direct, Complex goes two-stage; a total function of the label."""
    return StrategyChoice.DIRECT if decision.label is DifficultyLabel.SIMPLE else StrategyChoice.ICOT


def summarize(decisions: Iterable[RoutingDecision]) -> RoutingSummary:
    per_task: dict[str, DifficultyLabel] = {}
    simple = 0
    for decision in decisions:
        if decision.task_id in per_task:
            raise DuplicateDecision(f"two decisions for task {decision.task_id!r}")
        per_task[decision.task_id] = decision.label
        if decision.label is DifficultyLabel.SIMPLE:
            simple += 1
    total = len(per_task)
    return RoutingSummary(
        simple_count=simple,
        complex_count=total - simple,
        total=total,
        per_task=per_task,
    )


def diff_summaries(a: RoutingSummary, b: RoutingSummary) -> SummaryDiff:
    """How many tasks two label sets disagree on, as a count and exact rate."""
    if set(a.per_task) != set(b.per_task):
        raise BenchmarkMismatch("summaries cover different task sets")
    if a.total == 0:
        return SummaryDiff(differing=0, total=0, rate=Fraction(0))
    differing = sum(1 for task_id, label in a.per_task.items() if b.per_task[task_id] != label)
    return SummaryDiff(differing=differing, total=a.total, rate=Fraction(differing, a.total))
