"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line that the terminal summary prints at the end
of the run (see ``conftest.pytest_terminal_summary``).
"""

import subprocess
import sys
import time

import pytest

from chernflow import verify

from .conftest import ACCEPTANCE_RESULTS

SEED = 42


def record(key, passed, detail):
    ACCEPTANCE_RESULTS[key] = (passed, detail)
    print(f"{'PASS' if passed else 'FAIL'} {key}: {detail}")


@pytest.mark.parametrize("index", range(1, 10), ids=[f"C{i}" for i in range(1, 10)])
def test_criterion(index):
    check = verify.CRITERIA[index - 1](SEED)
    record(check.key, check.passed, f"{check.title}: {check.detail}")
    assert check.passed, check.detail


def test_criterion_10_verify_is_deterministic():
    cmd = [sys.executable, "-m", "chernflow.cli", "verify", "--seed", str(SEED)]
    outputs, codes, times = [], [], []
    for _ in range(2):
        start = time.perf_counter()
        proc = subprocess.run(cmd, capture_output=True, timeout=300)
        times.append(time.perf_counter() - start)
        outputs.append(proc.stdout)
        codes.append(proc.returncode)
    identical = outputs[0] == outputs[1]
    passed = identical and codes == [0, 0] and max(times) <= 60.0
    record("C10", passed, f"verify --seed {SEED}: exit codes {codes}, identical bytes {identical}, "
                          f"slowest run {max(times):.1f}s (limit 60s)")
    assert identical
    assert codes == [0, 0], outputs[0].decode()
    assert max(times) <= 60.0
