"""Command-line surface: ingest, route, run, eval, report.

Configuration lives in a YAML file; a handful of flags override the
fields that vary between experiments (mode, sample count, ablation,
replay). Exit codes: 0 clean, 1 when per-task failures were recorded,
2 for fatal configuration problems.
"""

from __future__ import annotations

import json
import logging
import os
import sys
from pathlib import Path

import click
import yaml

from . import __version__
from .backends import BackendConfig, ReplayMode
from .corpus import attach_external_labels, load_benchmark, serialize_benchmark
from .errors import ConfigError, RoutegenError
from .generator import DEFAULT_STAGE_BUDGETS, SamplingConfig
from .pipeline import RunConfig, RunMode, run_pipeline
from .prompts import Ablation
from .reporting import distribution_line, report as build_report

logger = logging.getLogger(__name__)

DEFAULT_AUTH_ENV = "ROUTEGEN_AUTH_TOKEN"

_MODE_ALIASES = {
    "externalclassifier": RunMode.EXTERNAL_CLASSIFIER,
    "selfrouting": RunMode.SELF_ROUTING,
    "externallabel": RunMode.EXTERNAL_LABEL,
    "forceddirect": RunMode.FORCED_DIRECT,
    "forcedicot": RunMode.FORCED_ICOT,
}
_REPLAY_ALIASES = {
    "live": ReplayMode.LIVE,
    "record": ReplayMode.RECORD,
    "replay": ReplayMode.REPLAY,
}
_ABLATION_ALIASES = {
    "full": Ablation.FULL,
    "nospecification": Ablation.NO_SPECIFICATION,
    "noidea": Ablation.NO_IDEA,
}


def _normalize(token: str) -> str:
    return "".join(ch for ch in token.lower() if ch.isalnum())


def _parse_enum(aliases: dict, raw: str, what: str):
    key = _normalize(str(raw))
    if key not in aliases:
        choices = ", ".join(sorted({v.value for v in aliases.values()}))
        raise ConfigError(f"unknown {what} {raw!r}; expected one of: {choices}")
    return aliases[key]


def _backend_from_section(section: dict | None, what: str) -> BackendConfig | None:
    if section is None:
        return None
    if not isinstance(section, dict):
        raise ConfigError(f"{what} section must be a mapping")
    try:
        endpoint = section["endpoint"]
        model = section["model"]
    except KeyError as exc:
        raise ConfigError(f"{what} section missing {exc.args[0]!r}") from None
    auth_env = section.get("auth_token_env", DEFAULT_AUTH_ENV)
    kwargs = {}
    for field_name in ("max_retries", "max_in_flight", "multi_sample", "request_timeout_s"):
        if field_name in section:
            kwargs[field_name] = section[field_name]
    if "backoff_s" in section:
        kwargs["backoff_s"] = tuple(float(v) for v in section["backoff_s"])
    return BackendConfig(
        endpoint=endpoint,
        model_name=model,
        auth_token=os.environ.get(auth_env, ""),
        **kwargs,
    )


def _sampling_from_config(raw: dict, n_override: int | None) -> SamplingConfig:
    section = raw.get("sampling") or {}
    if not isinstance(section, dict):
        raise ConfigError("sampling section must be a mapping")
    budgets = dict(DEFAULT_STAGE_BUDGETS)
    for stage, value in (section.get("budgets") or {}).items():
        if stage not in budgets:
            raise ConfigError(f"unknown sampling budget stage {stage!r}")
        budgets[stage] = int(value)
    n = n_override if n_override is not None else int(raw.get("n", section.get("n", 20)))
    try:
        return SamplingConfig(
            n=n,
            temperature=float(section.get("temperature", 0.8)),
            top_p=float(section.get("top_p", 0.95)),
            max_new_tokens_stage=budgets,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def load_run_config(
    config_path: str,
    mode: str | None = None,
    n: int | None = None,
    ablation: str | None = None,
    replay: str | None = None,
    output_dir: str | None = None,
) -> RunConfig:
    """Read a YAML run config, applying any command-line overrides."""
    path = Path(config_path)
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping at the top level")
    if "benchmark" not in raw:
        raise ConfigError("config missing 'benchmark'")
    resolved_output = output_dir or raw.get("output_dir")
    if not resolved_output:
        raise ConfigError("config missing 'output_dir'")
    run_mode = _parse_enum(_MODE_ALIASES, mode or raw.get("mode", "ExternalClassifier"), "mode")
    replay_mode = _parse_enum(_REPLAY_ALIASES, replay or raw.get("replay", "live"), "replay mode")
    ablation_variant = _parse_enum(_ABLATION_ALIASES, ablation or raw.get("ablation", "Full"), "ablation")
    runner_cmd = raw.get("runner_cmd")
    if runner_cmd is not None:
        if not isinstance(runner_cmd, (list, tuple)) or not runner_cmd:
            raise ConfigError("runner_cmd must be a nonempty list of argv strings")
        runner_cmd = tuple(str(part) for part in runner_cmd)
    k_values = raw.get("k", [1])
    if isinstance(k_values, int):
        k_values = [k_values]
    try:
        return RunConfig(
            benchmark_path=str(raw["benchmark"]),
            output_dir=str(resolved_output),
            mode=run_mode,
            replay=replay_mode,
            replay_store_path=raw.get("replay_store"),
            classifier_backend=_backend_from_section(raw.get("classifier"), "classifier"),
            generator_backend=_backend_from_section(raw.get("generator"), "generator"),
            sampling=_sampling_from_config(raw, n),
            ablation=ablation_variant,
            classifier_max_new_tokens=int(raw.get("classifier_max_new_tokens", 128)),
            k_values=tuple(int(k) for k in k_values),
            runner_cmd=runner_cmd,
            sandbox_workers=int(raw.get("sandbox_workers", 4)),
            timeout_s=float(raw.get("timeout_s", 10.0)),
            memory_limit_mb=int(raw.get("memory_limit_mb", 512)),
            template_dir=raw.get("template_dir"),
            benchmark_format=str(raw.get("benchmark_format", "jsonl")),
            run_name=str(raw.get("run_name", path.stem)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def _fail_config(exc: Exception) -> None:
    click.echo(f"error: {exc}", err=True)
    sys.exit(2)


def _print_run_summary(record: dict) -> None:
    click.echo(f"run: {record['run_name']}  benchmark: {record['benchmark']}  tasks: {record['task_count']}")
    distribution = record.get("distribution")
    if distribution:
        click.echo("routing: " + distribution_line(distribution["Simple"], distribution["Complex"]))
    for k, entry in sorted(record.get("scores", {}).items(), key=lambda kv: int(kv[0])):
        click.echo(f"pass@{k}: {entry['mean']:.4f}")
    totals = record.get("totals", {})
    if totals.get("total"):
        click.echo(
            f"tokens: c_in {totals['c_in']}  c_out {totals['c_out']}"
            f"  routing {totals['routing_total']}  total {totals['total']}"
        )
    if record.get("failures"):
        click.echo(f"failures: {record['failures']}", err=True)
    click.echo(f"digest: {record['digest']}")


@click.group()
@click.version_option(version=__version__, prog_name="routegen")
@click.option("-v", "--verbose", count=True, help="Repeat for more log detail.")
def main(verbose: int) -> None:
    """Difficulty-aware routed code generation."""
    level = [logging.WARNING, logging.INFO, logging.DEBUG][min(verbose, 2)]
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


@main.command()
@click.argument("benchmark", type=click.Path(exists=True, dir_okay=False))
@click.option("--format", "format_hint", default="jsonl", show_default=True)
@click.option("--name", default=None, help="Benchmark name (defaults to the file stem).")
@click.option("--labels", type=click.Path(exists=True, dir_okay=False), default=None,
              help="JSON object mapping task_id to a difficulty label.")
@click.option("--output", type=click.Path(dir_okay=False), default=None,
              help="Write the validated benchmark back out in canonical form.")
def ingest(benchmark: str, format_hint: str, name: str | None, labels: str | None, output: str | None) -> None:
    """Validate a benchmark file and report its shape."""
    try:
        bench = load_benchmark(benchmark, format_hint, name=name)
        if labels:
            mapping = json.loads(Path(labels).read_text(encoding="utf-8"))
            if not isinstance(mapping, dict):
                raise ConfigError("labels file must be a JSON object")
            bench = attach_external_labels(bench, mapping)
        if output:
            serialize_benchmark(bench, output)
    except (RoutegenError, json.JSONDecodeError) as exc:
        _fail_config(exc)
    labeled = sum(1 for task in bench if task.external_label is not None)
    with_tests = sum(1 for task in bench if task.test_suite.strip())
    click.echo(f"benchmark: {bench.name}")
    click.echo(f"tasks: {len(bench)}  with tests: {with_tests}  with labels: {labeled}")
    if output:
        click.echo(f"wrote: {output}")


_CONFIG_OPT = click.option("--config", "config_path", required=True,
                           type=click.Path(exists=True, dir_okay=False))
_MODE_OPT = click.option("--mode", default=None, help="Routing mode override.")
_N_OPT = click.option("--n", type=int, default=None, help="Samples per task override.")
_ABLATION_OPT = click.option("--ablation", default=None, help="Stage-1 ablation override.")
_REPLAY_OPT = click.option("--replay", default=None, type=click.Choice(["live", "record", "replay"]),
                           help="Backend replay mode override.")
_OUTPUT_OPT = click.option("--output-dir", default=None, help="Output directory override.")


def _run_command(config_path, mode, n, ablation, replay, output_dir, do_generate, do_evaluate) -> None:
    try:
        config = load_run_config(config_path, mode=mode, n=n, ablation=ablation,
                                 replay=replay, output_dir=output_dir)
    except ConfigError as exc:
        _fail_config(exc)
    try:
        run_record = run_pipeline(config, do_generate=do_generate, do_evaluate=do_evaluate)
    except RoutegenError as exc:
        _fail_config(exc)
    _print_run_summary(run_record.record)
    sys.exit(1 if run_record.record.get("failures") else 0)


@main.command()
@_CONFIG_OPT
@_MODE_OPT
@_N_OPT
@_ABLATION_OPT
@_REPLAY_OPT
@_OUTPUT_OPT
def run(config_path, mode, n, ablation, replay, output_dir) -> None:
    """Full pipeline: route, generate, execute, score, account."""
    _run_command(config_path, mode, n, ablation, replay, output_dir, True, True)


@main.command()
@_CONFIG_OPT
@_MODE_OPT
@_REPLAY_OPT
@_OUTPUT_OPT
def route(config_path, mode, replay, output_dir) -> None:
    """Routing-only pass: classify and record decisions, no generation."""
    _run_command(config_path, mode, None, None, replay, output_dir, False, False)


@main.command(name="eval")
@_CONFIG_OPT
@click.option("--timeout-s", type=float, default=None, help="Per-candidate timeout override.")
@click.option("--memory-limit-mb", type=int, default=None, help="Sandbox memory cap override.")
def eval_command(config_path, timeout_s, memory_limit_mb) -> None:
    """Re-run evaluation and scoring from persisted generation events.

    Tasks whose generation output is not already in the event log are
    recorded as failures; no model backend is contacted.
    """
    try:
        config = load_run_config(config_path)
        overrides = {}
        if timeout_s is not None:
            overrides["timeout_s"] = timeout_s
        if memory_limit_mb is not None:
            overrides["memory_limit_mb"] = memory_limit_mb
        if overrides:
            from dataclasses import replace

            config = replace(config, **overrides)
    except ConfigError as exc:
        _fail_config(exc)
    try:
        run_record = run_pipeline(config, generator_backend=_RefusingBackend(),
                                  classifier_backend=_RefusingBackend())
    except RoutegenError as exc:
        _fail_config(exc)
    _print_run_summary(run_record.record)
    sys.exit(1 if run_record.record.get("failures") else 0)


class _RefusingBackend:
    """Stands in for a model backend when none should be contacted."""

    model_name = "none"

    def generate(self, request):
        raise ConfigError("eval does not contact backends; generation output missing from the event log")


@main.command(name="report")
@click.argument("records", nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--baseline", default=None, help="Run name to diff pass@k against.")
@click.option("--baseline-totals", type=click.Path(exists=True, dir_okay=False), default=None,
              help="JSON object {baseline name: {benchmark: token total}}.")
@click.option("--k", "k_values", type=int, multiple=True, default=(1,), show_default=True)
def report_command(records, baseline, baseline_totals, k_values) -> None:
    """Render routing, accuracy, and token-economics tables from run records."""
    try:
        loaded = [json.loads(Path(p).read_text(encoding="utf-8")) for p in records]
        totals = None
        if baseline_totals:
            totals = json.loads(Path(baseline_totals).read_text(encoding="utf-8"))
            if not isinstance(totals, dict):
                raise ConfigError("baseline totals file must be a JSON object")
        text = build_report(loaded, baseline_name=baseline, baseline_totals=totals,
                            k_values=tuple(k_values))
    except (RoutegenError, json.JSONDecodeError) as exc:
        _fail_config(exc)
    click.echo(text)


if __name__ == "__main__":
    main()
