import functools

import pytest

from siccat.catalogue import lookup
from siccat.evaluation import build_fiducial, certified_recipe
from siccat.verification import verify_fiducial

LABELS = ["4a", "7b", "12b", "19e", "28c", "39i", "52d", "124a"]


@functools.lru_cache(maxsize=None)
def certified(label: str, digits: int):
    """(recipe with canonical branches, certificates); cached for the session."""
    return certified_recipe(lookup(label).recipe, digits)


@functools.lru_cache(maxsize=None)
def fiducial(label: str, digits: int):
    recipe, _ = certified(label, digits)
    return build_fiducial(recipe, None, digits)


@functools.lru_cache(maxsize=None)
def report(label: str, digits: int):
    recipe, _ = certified(label, digits)
    return verify_fiducial(fiducial(label, digits), recipe)


@pytest.fixture
def labels():
    return list(LABELS)


# acceptance lines, printed at the end of the run
ACCEPTANCE: dict[int, str] = {}


def record(number: int, ok: bool, detail: str) -> bool:
    ACCEPTANCE[number] = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(ACCEPTANCE[number])
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
