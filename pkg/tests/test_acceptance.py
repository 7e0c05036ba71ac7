"""End-to-end acceptance gate.

One test per criterion of the built-in verification suite, in suite
order, each reporting its own pass/fail line, plus the command-line
entry point run as a real subprocess.
"""

import subprocess
import sys

import pytest

from nilmat.cli import run_verify_paper


@pytest.fixture(scope="session")
def suite():
    rc, records = run_verify_paper()
    return rc, {r["index"]: r for r in records}


def _criterion(suite, index):
    _, records = suite
    r = records[index]
    assert r["passed"], (
        f"criterion {index} ({r['label']}) failed after "
        f"{r['seconds']:.2f}s of {r['limit']:g}s: {r['detail']}"
    )
    print(
        f"criterion {index}: PASS {r['label']} "
        f"({r['seconds']:.2f}s < {r['limit']:g}s): {r['detail']}"
    )


def test_criterion_01_golden_matrices(suite):
    _criterion(suite, 1)


def test_criterion_02_weight_lex_image(suite):
    _criterion(suite, 2)


def test_criterion_03_perturbed_order(suite):
    _criterion(suite, 3)


def test_criterion_04_freenil_image(suite):
    _criterion(suite, 4)


def test_criterion_05_declared_orderings(suite):
    _criterion(suite, 5)


def test_criterion_06_heisenberg_survey(suite):
    _criterion(suite, 6)


def test_criterion_07_target_ratio_construction(suite):
    _criterion(suite, 7)


def test_criterion_08_depth_power_oracle(suite):
    _criterion(suite, 8)


def test_criterion_09_relators_and_injectivity(suite):
    _criterion(suite, 9)


def test_criterion_10_empirical_table(suite):
    _criterion(suite, 10)


def test_criterion_11_cli_verify_paper_exits_0(suite):
    rc, _ = suite
    assert rc == 0
    proc = subprocess.run(
        [sys.executable, "-m", "nilmat.cli", "verify-paper"],
        capture_output=True, text=True, timeout=600,
    )
    assert proc.returncode == 0, proc.stdout + proc.stderr
    lines = [l for l in proc.stdout.splitlines() if l.startswith("PASS")]
    assert len(lines) == 10
    print("criterion 11: PASS verify-paper exits 0")
