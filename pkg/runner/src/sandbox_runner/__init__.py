"""Execute one candidate program against its test suite, safely.

The runner is a single-shot executable: one JSON job record on stdin, one
JSON verdict on stdout, exit code 0 whenever the protocol was honored (the
verdict itself may well be Fail). Anything the candidate does wrong becomes
a verdict, never a hang and never a crash of the runner:

  Pass          the test suite's check procedure ran to completion
  Fail          an assertion in the check procedure failed
  RuntimeError  any other exception, a syntax error, or a silent crash
  Timeout       no verdict within timeout_s; the process is killed
  NoCode        empty candidate, refused without spawning anything

The candidate runs in a fresh isolated interpreter with its address space
capped and all three standard streams detached, so prints, reads, and
runaway allocations stay inside the child.
"""

import json
import subprocess
import sys
import time

__version__ = "0.1.0"

DEFAULT_TIMEOUT_S = 10.0
DEFAULT_MEMORY_LIMIT_MB = 512

STATUSES = ("Pass", "Fail", "RuntimeError", "Timeout", "NoCode")

_DETAIL_LIMIT = 500

# Runs inside `python -I -c`: reads the job from stdin, seals the process,
# executes candidate then tests, and writes the verdict to a duplicate of
# the original stdout so candidate prints cannot corrupt the channel.
_CHILD_SOURCE = r"""
import json, os, resource, sys, time

job = json.loads(sys.stdin.read())
verdict_fd = os.dup(1)
devnull = os.open(os.devnull, os.O_RDWR)
for fd in (0, 1, 2):
    os.dup2(devnull, fd)

limit = int(job["memory_limit_mb"]) * 1024 * 1024
resource.setrlimit(resource.RLIMIT_AS, (limit, limit))

started = time.monotonic()

def emit(status, detail):
    verdict = {
        "status": status,
        "detail": detail[:500],
        "wall_time_s": round(time.monotonic() - started, 6),
    }
    os.write(verdict_fd, json.dumps(verdict).encode("utf-8"))
    os._exit(0)

scope = {}
try:
    exec(compile(job["code"], "<candidate>", "exec"), scope)
    exec(compile(job["test"], "<tests>", "exec"), scope)
    scope["check"](scope[job["entry_point"]])
except AssertionError as exc:
    emit("Fail", f"assertion failed: {exc}")
except MemoryError:
    emit("RuntimeError", "memory limit exceeded")
except BaseException as exc:
    emit("RuntimeError", f"{type(exc).__name__}: {exc}")
emit("Pass", "")
"""


def validate_job(job: object) -> str | None:
    """Return a diagnostic for a malformed job record, None when well-formed."""
    if not isinstance(job, dict):
        return f"job record must be a JSON object, got {type(job).__name__}"
    for field in ("code", "test", "entry_point"):
        if field not in job:
            return f"job record is missing {field!r}"
        if not isinstance(job[field], str):
            return f"job field {field!r} must be a string"
    timeout = job.get("timeout_s", DEFAULT_TIMEOUT_S)
    if not isinstance(timeout, (int, float)) or timeout <= 0:
        return f"timeout_s must be a positive number, got {timeout!r}"
    memory = job.get("memory_limit_mb", DEFAULT_MEMORY_LIMIT_MB)
    if not isinstance(memory, int) or memory <= 0:
        return f"memory_limit_mb must be a positive integer, got {memory!r}"
    return None


def run_job(job: dict) -> dict:
    """Execute one validated job and return its verdict record.

    Empty candidate code short-circuits; everything else runs in a fresh
    child interpreter that is killed hard at timeout_s.
    """
    if not job["code"].strip():
        return {"status": "NoCode", "detail": "", "wall_time_s": 0.0}

    timeout_s = float(job.get("timeout_s", DEFAULT_TIMEOUT_S))
    child_job = {
        "code": job["code"],
        "test": job["test"],
        "entry_point": job["entry_point"],
        "memory_limit_mb": int(job.get("memory_limit_mb", DEFAULT_MEMORY_LIMIT_MB)),
    }
    started = time.monotonic()
    process = subprocess.Popen(
        [sys.executable, "-I", "-c", _CHILD_SOURCE],
        stdin=subprocess.PIPE,
        stdout=subprocess.PIPE,
        stderr=subprocess.DEVNULL,
        text=True,
    )
    try:
        stdout, _ = process.communicate(json.dumps(child_job), timeout=timeout_s)
    except subprocess.TimeoutExpired:
        process.kill()
        process.communicate()
        return {
            "status": "Timeout",
            "detail": f"no verdict within {timeout_s:g}s",
            "wall_time_s": round(time.monotonic() - started, 6),
        }

    verdict = _parse_verdict(stdout)
    if verdict is not None:
        return verdict
    # The child died without reporting: a hard crash is the candidate's fault.
    return {
        "status": "RuntimeError",
        "detail": f"candidate process ended without a verdict (exit {process.returncode})"[:_DETAIL_LIMIT],
        "wall_time_s": round(time.monotonic() - started, 6),
    }


def _parse_verdict(stdout: str) -> dict | None:
    if not stdout:
        return None
    try:
        verdict = json.loads(stdout)
    except ValueError:
        return None
    if not isinstance(verdict, dict) or verdict.get("status") not in STATUSES:
        return None
    return verdict
