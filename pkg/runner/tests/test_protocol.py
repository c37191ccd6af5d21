"""Wire-protocol conformance: one record in, one record out, no hangs."""

import json
import subprocess
import sys

from sandbox_runner import STATUSES, validate_job

RUNNER = [sys.executable, "-m", "sandbox_runner"]


def run_raw(stdin_text: str, timeout: float = 15.0) -> subprocess.CompletedProcess:
    return subprocess.run(
        RUNNER,
        input=stdin_text,
        capture_output=True,
        text=True,
        timeout=timeout,
    )


def test_exactly_one_verdict_record_per_invocation():
    job = {
        "code": "def f():\n    print('candidate noise')\n    return 7\n",
        "test": "def check(candidate):\n    print('test noise')\n    assert candidate() == 7\n",
        "entry_point": "f",
        "timeout_s": 5.0,
        "memory_limit_mb": 256,
    }
    completed = run_raw(json.dumps(job))
    assert completed.returncode == 0
    # Candidate prints are swallowed; stdout holds one parseable record.
    verdict = json.loads(completed.stdout)
    assert verdict["status"] == "Pass"
    assert set(verdict) == {"status", "detail", "wall_time_s"}


def test_candidate_reading_stdin_sees_eof_not_the_job():
    job = {
        "code": "import sys\ndef f():\n    return sys.stdin.read()\n",
        "test": "def check(candidate):\n    assert candidate() == ''\n",
        "entry_point": "f",
        "timeout_s": 5.0,
        "memory_limit_mb": 256,
    }
    assert json.loads(run_raw(json.dumps(job)).stdout)["status"] == "Pass"


def test_malformed_json_exits_nonzero_without_hanging():
    completed = run_raw("this is not a job record")
    assert completed.returncode != 0
    assert completed.stdout == ""
    assert "malformed" in completed.stderr


def test_missing_field_exits_nonzero():
    completed = run_raw(json.dumps({"code": "def f(): pass"}))
    assert completed.returncode != 0
    assert "test" in completed.stderr


def test_non_object_record_exits_nonzero():
    completed = run_raw(json.dumps(["not", "a", "job"]))
    assert completed.returncode != 0


def test_statuses_are_the_published_vocabulary():
    assert STATUSES == ("Pass", "Fail", "RuntimeError", "Timeout", "NoCode")


def test_validate_job_diagnostics():
    assert validate_job({"code": "x", "test": "y", "entry_point": "z"}) is None
    assert "entry_point" in validate_job({"code": "x", "test": "y"})
    assert "timeout_s" in validate_job(
        {"code": "x", "test": "y", "entry_point": "z", "timeout_s": -1}
    )
    assert "memory_limit_mb" in validate_job(
        {"code": "x", "test": "y", "entry_point": "z", "memory_limit_mb": 0}
    )
    assert "string" in validate_job({"code": 3, "test": "y", "entry_point": "z"})
