import shutil

import pytest

from routegen import (
    Ablation,
    PromptKind,
    PromptVariant,
    TemplateLibrary,
    render_classifier_prompt,
    render_direct_prompt,
    render_icot_stage1_prompt,
    render_icot_stage2_prompt,
)
from routegen.prompts import DEFAULT_DIRECT_EXEMPLARS

from .conftest import make_task

TASK = make_task(
    "t/braces",
    prompt='def winner(scores):\n    """Return {"name": best} for the best score. Uses {} literals."""\n',
    entry_point="winner",
)


class TestClassifierPrompt:
    def test_contains_task_and_answer_contract(self):
        rendered = render_classifier_prompt(TASK)
        assert TASK.prompt in rendered.text
        assert "Simple, because" in rendered.text
        assert "Complex, because" in rendered.text
        assert rendered.kind is PromptKind.CLASSIFIER
        assert rendered.task_id == TASK.task_id

    def test_no_unfilled_slots(self):
        assert "{{" not in render_classifier_prompt(TASK).text


class TestDirectPrompt:
    def test_default_exemplars_appear_verbatim(self):
        rendered = render_direct_prompt(TASK)
        for problem, solution in DEFAULT_DIRECT_EXEMPLARS:
            assert problem.rstrip() in rendered.text
            assert solution.rstrip() in rendered.text
        assert TASK.prompt in rendered.text

    def test_exemplars_precede_task(self):
        rendered = render_direct_prompt(TASK)
        last_exemplar_end = rendered.text.rindex(DEFAULT_DIRECT_EXEMPLARS[-1][1].rstrip())
        assert last_exemplar_end < rendered.text.index(TASK.prompt)

    def test_custom_exemplars_replace_defaults(self):
        custom = (("def probe():\n", "def probe():\n    return 7\n"),)
        rendered = render_direct_prompt(TASK, exemplars=custom)
        assert "def probe():" in rendered.text
        assert "binary_Search" not in rendered.text

    def test_empty_exemplars_rejected(self):
        with pytest.raises(ValueError):
            render_direct_prompt(TASK, exemplars=())

    def test_braces_in_task_prompt_survive(self):
        rendered = render_direct_prompt(TASK)
        assert '{"name": best}' in rendered.text
        assert "{}" in rendered.text


class TestStage1Prompt:
    def test_full_variant_requests_both_sections(self):
        text = render_icot_stage1_prompt(TASK).text
        assert "1: Specification" in text
        assert "2: Idea" in text
        assert TASK.prompt in text

    def test_no_specification_variant_drops_only_that_heading(self):
        text = render_icot_stage1_prompt(TASK, ablation=Ablation.NO_SPECIFICATION).text
        assert "Specification" not in text
        assert "Idea" in text

    def test_no_idea_variant_drops_only_that_heading(self):
        text = render_icot_stage1_prompt(TASK, ablation=Ablation.NO_IDEA).text
        assert "Idea" not in text
        assert "Specification" in text

    def test_variants_differ_pairwise(self):
        texts = {
            ablation: render_icot_stage1_prompt(TASK, ablation=ablation).text
            for ablation in Ablation
        }
        assert len(set(texts.values())) == 3


class TestStage2Prompt:
    def test_quotes_trace_and_carries_caution(self):
        trace = "1: Specification\n  - list in, list out.\n2: Idea: sort ascending, O(n log n)."
        text = render_icot_stage2_prompt(TASK, trace).text
        assert "may contain errors" in text
        assert f'"""\n{trace}\n"""' in text
        assert TASK.prompt in text

    def test_accepts_trace_object_with_raw(self):
        class TraceLike:
            raw = "2: Idea: scan once."

        text = render_icot_stage2_prompt(TASK, TraceLike()).text
        assert "2: Idea: scan once." in text

    def test_empty_trace_rejected(self):
        with pytest.raises(ValueError):
            render_icot_stage2_prompt(TASK, "")

    def test_same_template_for_every_ablation(self):
        library = TemplateLibrary()
        full = library.text(PromptKind.ICOT_STAGE2, Ablation.FULL)
        assert full == library.text(PromptKind.ICOT_STAGE2, Ablation.NO_SPECIFICATION)
        assert full == library.text(PromptKind.ICOT_STAGE2, Ablation.NO_IDEA)


class TestPromptVariant:
    def test_ablation_limited_to_staged_kinds(self):
        with pytest.raises(ValueError):
            PromptVariant(kind=PromptKind.CLASSIFIER, ablation=Ablation.NO_IDEA)
        PromptVariant(kind=PromptKind.ICOT_STAGE1, ablation=Ablation.NO_IDEA)

    def test_direct_needs_exemplars(self):
        with pytest.raises(ValueError):
            PromptVariant(kind=PromptKind.DIRECT_FEW_SHOT)
        PromptVariant(kind=PromptKind.DIRECT_FEW_SHOT, exemplars=(("p", "s"),))


class TestTemplateLibrary:
    def test_fingerprint_tracks_asset_content(self, tmp_path):
        packaged = TemplateLibrary()
        custom_dir = tmp_path / "templates"
        shutil.copytree(packaged._directory, custom_dir)
        custom = TemplateLibrary(custom_dir)
        assert custom.fingerprint() == packaged.fingerprint()
        (custom_dir / "classifier.txt").write_text("changed {{task_prompt}}", encoding="utf-8")
        assert TemplateLibrary(custom_dir).fingerprint() != packaged.fingerprint()

    def test_custom_directory_overrides_rendering(self, tmp_path):
        custom_dir = tmp_path / "templates"
        custom_dir.mkdir()
        (custom_dir / "classifier.txt").write_text(
            "Rate this:\n{{task_prompt}}\nAnswer Simple, because ... or Complex, because ...",
            encoding="utf-8",
        )
        rendered = render_classifier_prompt(TASK, library=TemplateLibrary(custom_dir))
        assert rendered.text.startswith("Rate this:")
        assert TASK.prompt in rendered.text

    def test_unknown_combination_rejected(self):
        with pytest.raises(ValueError):
            TemplateLibrary().text(PromptKind.CLASSIFIER, Ablation.NO_IDEA)

    def test_rendering_is_deterministic(self):
        first = render_icot_stage1_prompt(TASK).text
        second = render_icot_stage1_prompt(TASK).text
        assert first == second
