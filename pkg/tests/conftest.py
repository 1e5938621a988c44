import numpy as np
import pytest

from ambiguity_lab.pmf import JointPMF

_CRITERIA: list[str] = []


@pytest.fixture
def criterion():
    """Record one pass/fail line per acceptance criterion."""

    def record(label: str, ok: bool, detail: str = "") -> bool:
        _CRITERIA.append(f"{'PASS' if ok else 'FAIL'}  {label}" + (f"  [{detail}]" if detail else ""))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERIA:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20141015)


def uniform(n: int) -> JointPMF:
    return JointPMF(np.full((n, 1), 1.0 / n))


def point_mass(n: int, at: int = 0) -> JointPMF:
    m = np.zeros((n, 1))
    m[at, 0] = 1.0
    return JointPMF(m)


def column(p) -> JointPMF:
    return JointPMF(np.asarray(p, dtype=float)[:, None])
