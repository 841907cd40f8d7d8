import itertools
import os

import numpy as np
import pytest

from simcomm.graph import Graph, Partition

DATA_DIR = os.path.abspath(os.environ.get("SIMCOMM_DATA", os.path.join(os.path.dirname(__file__), "..", "data")))


def two_cliques(a: int, b: int) -> tuple[Graph, Partition]:
    """Cliques of sizes ``a`` and ``b`` joined by one bridge link."""
    edges = list(itertools.combinations(range(a), 2))
    edges += list(itertools.combinations(range(a, a + b), 2))
    edges.append((a - 1, a))
    return Graph(a + b, edges), Partition(np.array([0] * a + [1] * b))


def random_graph(rng: np.random.Generator, n: int, p: float, weighted: bool = False) -> Graph:
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    w = rng.uniform(0.1, 3.0, len(pairs)) if weighted else None
    return Graph(n, pairs, w)


def random_partition(rng: np.random.Generator, n: int, k: int | None = None) -> Partition:
    k = k or int(rng.integers(1, n + 1))
    return Partition(rng.integers(0, k, n))


def _find(name: str) -> str | None:
    for cand in (name, name + ".gz"):
        path = os.path.join(DATA_DIR, cand)
        if os.path.exists(path):
            return path
    return None


def email_paths() -> tuple[str, str] | None:
    """Edge list and department labels of the email network, if present."""
    edges = _find("email-Eu-core.txt")
    labels = _find("email-Eu-core-department-labels.txt")
    return (edges, labels) if edges and labels else None


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# -- acceptance summary -------------------------------------------------------

_CRITERIA: dict[int, tuple[str, str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion gate")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or not (rep.when == "call" or rep.failed):
        return
    number, title = mark.args
    detail = ""
    if rep.failed:
        msg = getattr(rep.longrepr, "reprcrash", None)
        detail = msg.message.splitlines()[0] if msg is not None else str(rep.longrepr).splitlines()[-1]
    _CRITERIA[number] = (title, "PASS" if rep.passed else "FAIL", detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, verdict, detail = _CRITERIA[number]
        line = f"criterion {number:>2}: {verdict}  {title}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)
