import functools
from pathlib import Path

import pytest

from fuzzagg.pipeline import fit_dataset

ROOT = Path(__file__).resolve().parent.parent
DATASETS = ROOT / "datasets"
NAMES = ("breast-cancer-wisconsin", "lymphography", "hepatitis", "echocardiogram")


def paths(name):
    return DATASETS / name / f"{name}.data", DATASETS / name / f"{name}.schema"


@functools.lru_cache(maxsize=None)
def fitted(name):
    """Default-config fit of a bundled dataset, shared between test modules."""
    return fit_dataset(*paths(name))


@pytest.fixture
def toy_paths():
    return paths("toy")


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: (int(k.rstrip("abcd")), k)):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {key}: {detail}")
