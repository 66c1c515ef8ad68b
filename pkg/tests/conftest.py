import numpy as np
import pytest

from umtk.hierarchy import minmax_path_closure
from umtk.matrices import DissimilarityMatrix

_ACCEPTANCE: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        _ACCEPTANCE[report.nodeid] = report.outcome


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for nodeid in sorted(_ACCEPTANCE):
        short = nodeid.split("::")[-1]
        verdict = "PASS" if _ACCEPTANCE[nodeid] == "passed" else "FAIL"
        terminalreporter.write_line(f"{short}: {verdict}")


def random_dissimilarity(rng: np.random.Generator, n: int) -> DissimilarityMatrix:
    vals = rng.uniform(0.1, 10.0, size=(n, n))
    d = np.triu(vals, 1)
    d = d + d.T
    return DissimilarityMatrix(d)


def random_ultrametric(rng: np.random.Generator, n: int) -> DissimilarityMatrix:
    """Random ultrametric: min-max path closure of a random dissimilarity."""
    u = minmax_path_closure(random_dissimilarity(rng, n))
    return DissimilarityMatrix(u.values, list(u.labels))


def random_points(rng: np.random.Generator, n: int, dim: int) -> np.ndarray:
    return rng.normal(size=(n, dim))


@pytest.fixture
def rng():
    return np.random.default_rng(20260816)
