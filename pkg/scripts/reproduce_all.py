#!/usr/bin/env python3
"""Run every built-in example and report pass/fail against its known limit."""

import sys

from graphlv.fixtures import reproduce_ids, run_reproduce


def main() -> int:
    failures = 0
    for case_id in reproduce_ids():
        result = run_reproduce(case_id)
        status = "PASS" if result.passed else "FAIL"
        print(f"{case_id:12s} {status}  sup-error {result.error:.3e}  "
              f"t={result.t_reached:<6g} limit {result.expected}")
        failures += (not result.passed)
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
