"""Prompt rendering for the four prompt families.

Four kinds of prompt are produced: the difficulty classifier prompt, the
direct few-shot generation prompt, the stage-1 solving-process prompt, and
the stage-2 code-from-process prompt. Templates live as plain-text assets
with ``{{slot}}`` placeholders and can be swapped out per run by pointing a
:class:`TemplateLibrary` at a different directory. Rendering is a pure text
transform: identical inputs always give identical output.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .corpus import Task


class PromptKind(str, Enum):
    CLASSIFIER = "Classifier"
    DIRECT_FEW_SHOT = "DirectFewShot"
    ICOT_STAGE1 = "IcotStage1"
    ICOT_STAGE2 = "IcotStage2"


class Ablation(str, Enum):
    FULL = "Full"
    NO_SPECIFICATION = "NoSpecification"
    NO_IDEA = "NoIdea"


# The bundled direct few-shot exemplars: reverse a string, sum of squares,
# binary search, each as (problem, solution).
DEFAULT_DIRECT_EXEMPLARS: tuple[tuple[str, str], ...] = (
    (
        'def reverse_String(str):\n""" Write a python function to reverse the given string."""\n',
        "def reverse_String(str):\n"
        '    reversed_str = ""\n'
        "    for ch in str[::-1]:\n"
        "        reversed_str += ch\n"
        "    return reversed_str\n",
    ),
    (
        'def sum_Of_Squares(lst):\n""" Write a python function to calculate the sum of squares of the numbers in the given list. """\n',
        "def sum_Of_Squares(lst):\n"
        "    total = 0\n"
        "    for num in lst:\n"
        "        total += num ** 2\n"
        "    return total\n",
    ),
    (
        'def binary_Search(sorted_lst, target):\n""" Write a python function to perform binary search on a sorted list to find the target element."""\n',
        "def binary_Search(sorted_lst, target):\n"
        "    low = 0\n"
        "    high = len(sorted_lst) - 1\n"
        "    while low <= high:\n"
        "        mid = (low + high) // 2\n"
        "        if sorted_lst[mid] == target:\n"
        "            return mid\n"
        "        elif sorted_lst[mid] < target:\n"
        "            low = mid + 1\n"
        "        else:\n"
        "            high = mid - 1\n"
        "    return -1\n",
    ),
)

_TEMPLATE_FILES: dict[tuple[PromptKind, Ablation], str] = {
    (PromptKind.CLASSIFIER, Ablation.FULL): "classifier.txt",
    (PromptKind.DIRECT_FEW_SHOT, Ablation.FULL): "direct_fewshot.txt",
    (PromptKind.ICOT_STAGE1, Ablation.FULL): "icot_stage1_full.txt",
    (PromptKind.ICOT_STAGE1, Ablation.NO_SPECIFICATION): "icot_stage1_no_specification.txt",
    (PromptKind.ICOT_STAGE1, Ablation.NO_IDEA): "icot_stage1_no_idea.txt",
    (PromptKind.ICOT_STAGE2, Ablation.FULL): "icot_stage2.txt",
    # Stage 2 is ablation-invariant: the same template serves every variant.
    (PromptKind.ICOT_STAGE2, Ablation.NO_SPECIFICATION): "icot_stage2.txt",
    (PromptKind.ICOT_STAGE2, Ablation.NO_IDEA): "icot_stage2.txt",
}


@dataclass(frozen=True)
class PromptVariant:
    kind: PromptKind
    ablation: Ablation = Ablation.FULL
    exemplars: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        if self.ablation is not Ablation.FULL and self.kind not in (
            PromptKind.ICOT_STAGE1,
            PromptKind.ICOT_STAGE2,
        ):
            raise ValueError(f"{self.kind.value} has no {self.ablation.value} variant")
        if self.kind is PromptKind.DIRECT_FEW_SHOT and not self.exemplars:
            raise ValueError("DirectFewShot requires at least one exemplar")


@dataclass(frozen=True)
class RenderedPrompt:
    text: str
    kind: PromptKind
    task_id: str


class TemplateLibrary:
    """Loads template assets, from the package by default or a custom directory."""

    def __init__(self, directory: str | Path | None = None) -> None:
        self._directory = Path(directory) if directory is not None else Path(__file__).parent / "templates"
        self._cache: dict[str, str] = {}

    def text(self, kind: PromptKind, ablation: Ablation = Ablation.FULL) -> str:
        try:
            filename = _TEMPLATE_FILES[(kind, ablation)]
        except KeyError:
            raise ValueError(f"no template for {kind.value} / {ablation.value}") from None
        if filename not in self._cache:
            self._cache[filename] = (self._directory / filename).read_text(encoding="utf-8")
        return self._cache[filename]

    def fingerprint(self) -> str:
        """Digest over every asset, used to key cached pipeline stages."""
        digest = hashlib.sha256()
        for filename in sorted(set(_TEMPLATE_FILES.values())):
            digest.update((self._directory / filename).read_bytes())
        return digest.hexdigest()


_DEFAULT_LIBRARY = TemplateLibrary()


def _fill(template: str, slots: dict[str, str]) -> str:
    out = template
    for name, value in slots.items():
        out = out.replace("{{" + name + "}}", value)
    return out


def _exemplar_block(exemplars: tuple[tuple[str, str], ...]) -> str:
    return "\n\n".join(f"{problem.rstrip()}\n\n{solution.rstrip()}" for problem, solution in exemplars)


def render_classifier_prompt(task: Task, library: TemplateLibrary | None = None) -> RenderedPrompt:
    """Prompt instructing the model to answer Simple or Complex with a rationale."""
    lib = library or _DEFAULT_LIBRARY
    text = _fill(lib.text(PromptKind.CLASSIFIER), {"task_prompt": task.prompt})
    return RenderedPrompt(text=text, kind=PromptKind.CLASSIFIER, task_id=task.task_id)


def render_direct_prompt(
    task: Task,
    exemplars: tuple[tuple[str, str], ...] | None = None,
    library: TemplateLibrary | None = None,
) -> RenderedPrompt:
    """Few-shot generation prompt: exemplars first, then the task prompt.

    ``exemplars`` defaults to the bundled trio; an explicit empty tuple is
    rejected since a few-shot prompt needs at least one exemplar.
    """
    if exemplars is None:
        exemplars = DEFAULT_DIRECT_EXEMPLARS
    if not exemplars:
        raise ValueError("direct prompt requires at least one exemplar")
    lib = library or _DEFAULT_LIBRARY
    text = _fill(
        lib.text(PromptKind.DIRECT_FEW_SHOT),
        {"exemplars": _exemplar_block(tuple(exemplars)), "task_prompt": task.prompt},
    )
    return RenderedPrompt(text=text, kind=PromptKind.DIRECT_FEW_SHOT, task_id=task.task_id)


def render_icot_stage1_prompt(
    task: Task,
    ablation: Ablation = Ablation.FULL,
    library: TemplateLibrary | None = None,
) -> RenderedPrompt:
    """Stage-1 prompt asking for a structured solving process.

    The Full variant requests both numbered sections; each ablation variant
    drops one section from the instructions and the worked examples alike.
    """
    lib = library or _DEFAULT_LIBRARY
    text = _fill(lib.text(PromptKind.ICOT_STAGE1, ablation), {"task_prompt": task.prompt})
    return RenderedPrompt(text=text, kind=PromptKind.ICOT_STAGE1, task_id=task.task_id)


def render_icot_stage2_prompt(
    task: Task,
    trace: object,
    library: TemplateLibrary | None = None,
) -> RenderedPrompt:
    """Stage-2 prompt: task, quoted solving process, then the caution instruction.

    ``trace`` may be an IntentionTrace or the raw trace text itself; only the
    raw text enters the prompt, verbatim.
    """
    raw = trace if isinstance(trace, str) else getattr(trace, "raw")
    if not raw:
        raise ValueError("stage-2 prompt requires a non-empty trace")
    lib = library or _DEFAULT_LIBRARY
    text = _fill(lib.text(PromptKind.ICOT_STAGE2), {"task_prompt": task.prompt, "trace": raw})
    return RenderedPrompt(text=text, kind=PromptKind.ICOT_STAGE2, task_id=task.task_id)
