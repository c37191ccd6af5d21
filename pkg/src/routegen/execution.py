"""Run candidate programs against test suites through an external runner.

The runner is an opaque executable speaking a one-record protocol: it reads
one UTF-8 JSON object {code, test, entry_point, timeout_s, memory_limit_mb}
on stdin and writes one {status, detail, wall_time_s} object to stdout,
exiting 0 whenever the protocol was honored, whatever the verdict. This
module never executes candidate code in-process; tests that need verdicts
without a runner use :class:`ScriptedExecutor`.
"""

from __future__ import annotations

import json
import logging
import subprocess
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Mapping, Sequence

from .errors import ProtocolError, RunnerUnavailable

logger = logging.getLogger(__name__)

# Outer margin past the runner's own timeout before we declare it hung.
_RUNNER_GRACE_S = 5.0


class VerdictStatus(str, Enum):
    PASS = "Pass"
    FAIL = "Fail"
    RUNTIME_ERROR = "RuntimeError"
    TIMEOUT = "Timeout"
    NO_CODE = "NoCode"


@dataclass(frozen=True)
class ExecutionJob:
    code: str
    test_suite: str
    entry_point: str
    timeout_s: float = 10.0
    memory_limit_mb: int = 512

    def __post_init__(self) -> None:
        if self.timeout_s <= 0:
            raise ValueError("timeout_s must be positive")
        if self.memory_limit_mb <= 0:
            raise ValueError("memory_limit_mb must be positive")

    def to_record(self) -> dict:
        return {
            "code": self.code,
            "test": self.test_suite,
            "entry_point": self.entry_point,
            "timeout_s": self.timeout_s,
            "memory_limit_mb": self.memory_limit_mb,
        }


@dataclass(frozen=True)
class ExecutionVerdict:
    status: VerdictStatus
    detail: str = ""
    wall_time_s: float = 0.0

    def to_record(self) -> dict:
        return {"status": self.status.value, "detail": self.detail, "wall_time_s": self.wall_time_s}


_NO_CODE_VERDICT = ExecutionVerdict(status=VerdictStatus.NO_CODE, detail="no code extracted")


class SubprocessRunnerExecutor:
    """Executes jobs by spawning one runner process per job.

    Empty candidate code short-circuits to a NoCode verdict without touching
    the runner. A missing runner raises RunnerUnavailable; a runner that
    exits nonzero, emits unparseable output, or stops responding raises
    ProtocolError (the process is killed first, so callers never hang).
    """

    def __init__(self, runner_cmd: Sequence[str], workers: int = 4) -> None:
        if not runner_cmd:
            raise ValueError("runner_cmd must name an executable")
        if workers < 1:
            raise ValueError("workers must be >= 1")
        self._cmd = list(runner_cmd)
        self._workers = workers

    def execute(self, job: ExecutionJob) -> ExecutionVerdict:
        if not job.code.strip():
            return _NO_CODE_VERDICT
        payload = json.dumps(job.to_record(), ensure_ascii=False)
        try:
            proc = subprocess.Popen(
                self._cmd,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.PIPE,
                text=True,
            )
        except OSError as exc:
            raise RunnerUnavailable(f"cannot start runner {self._cmd!r}: {exc}") from exc
        try:
            stdout, stderr = proc.communicate(payload, timeout=job.timeout_s + _RUNNER_GRACE_S)
        except subprocess.TimeoutExpired:
            proc.kill()
            proc.communicate()
            raise ProtocolError(f"runner unresponsive past {job.timeout_s + _RUNNER_GRACE_S:.0f}s")
        if proc.returncode != 0:
            raise ProtocolError(
                f"runner exited {proc.returncode}: {stderr.strip()[:200] or stdout.strip()[:200]}"
            )
        return self._parse_verdict(stdout)

    @staticmethod
    def _parse_verdict(stdout: str) -> ExecutionVerdict:
        try:
            record = json.loads(stdout)
        except json.JSONDecodeError as exc:
            raise ProtocolError(f"unparseable runner output: {stdout[:200]!r}") from exc
        if not isinstance(record, dict):
            raise ProtocolError(f"runner output is not a record: {stdout[:200]!r}")
        try:
            status = VerdictStatus(record["status"])
            detail = str(record.get("detail", ""))
            wall_time_s = float(record.get("wall_time_s", 0.0))
        except (KeyError, ValueError) as exc:
            raise ProtocolError(f"bad verdict record: {exc!r}") from exc
        return ExecutionVerdict(status=status, detail=detail, wall_time_s=wall_time_s)

    def execute_batch(self, jobs: Sequence[ExecutionJob]) -> list[ExecutionVerdict]:
        """Verdicts aligned with jobs; one failing job never sinks the batch.

        Protocol breakage on a single job is embedded as a RuntimeError
        verdict; an unavailable runner aborts, since no job could ever run.
        """
        if not jobs:
            return []

        def one(job: ExecutionJob) -> ExecutionVerdict:
            try:
                return self.execute(job)
            except ProtocolError as exc:
                logger.warning("runner protocol failure: %s", exc)
                return ExecutionVerdict(status=VerdictStatus.RUNTIME_ERROR, detail=f"runner protocol: {exc}")

        with ThreadPoolExecutor(max_workers=self._workers) as pool:
            return list(pool.map(one, jobs))


class ScriptedExecutor:
    """Verdict oracle for tests: maps exact candidate code to a status.

    Unknown code falls back to ``default``; empty code is always NoCode.
    Wall times are fixed at zero so scripted runs stay byte-deterministic.
    """

    def __init__(
        self,
        script: Mapping[str, VerdictStatus | str] | None = None,
        default: VerdictStatus = VerdictStatus.FAIL,
        oracle: Callable[[ExecutionJob], VerdictStatus] | None = None,
    ) -> None:
        self._script = dict(script or {})
        self._default = default
        self._oracle = oracle
        self.jobs_seen: list[ExecutionJob] = []

    def execute(self, job: ExecutionJob) -> ExecutionVerdict:
        self.jobs_seen.append(job)
        if not job.code.strip():
            return _NO_CODE_VERDICT
        if self._oracle is not None:
            status = VerdictStatus(self._oracle(job))
        else:
            status = VerdictStatus(self._script.get(job.code, self._default))
        return ExecutionVerdict(status=status, detail="scripted")

    def execute_batch(self, jobs: Sequence[ExecutionJob]) -> list[ExecutionVerdict]:
        return [self.execute(job) for job in jobs]
