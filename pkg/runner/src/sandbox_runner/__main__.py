"""Protocol shell: one job record on stdin, one verdict on stdout."""

import json
import sys

from . import run_job, validate_job


def main() -> int:
    raw = sys.stdin.read()
    try:
        job = json.loads(raw)
    except ValueError as exc:
        print(f"malformed job record: {exc}", file=sys.stderr)
        return 2
    problem = validate_job(job)
    if problem is not None:
        print(problem, file=sys.stderr)
        return 2
    verdict = run_job(job)
    json.dump(verdict, sys.stdout)
    sys.stdout.write("\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
