"""Shared fixtures and the per-criterion acceptance summary."""

from __future__ import annotations

import sys
from collections import OrderedDict
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from oracles import exhaustive_corpus, random_graph  # noqa: E402

CRITERIA = OrderedDict(
    [
        (1, "Mermin-Peres end-to-end"),
        (2, "Union analysis"),
        (3, "Circulant example"),
        (4, "Strongly connected suite"),
        (5, "Oracle equivalence"),
        (6, "Soundness"),
    ]
)

_outcomes: dict[int, list[tuple[str, str]]] = {k: [] for k in CRITERIA}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.fixture(scope="session")
def corpus():
    """Exhaustive small corpus plus 200 random graphs on 6 or 7 vertices."""
    graphs = exhaustive_corpus(4, 5)
    rng = np.random.default_rng(20240611)
    for _ in range(200):
        graphs.append(random_graph(rng, int(rng.integers(6, 8)), p=float(rng.uniform(0.2, 0.6))))
    return graphs


def pytest_runtest_logreport(report):
    marker = getattr(report, "criterion", None)
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _outcomes[marker].append((report.nodeid.split("::")[-1], report.outcome))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is not None:
        report.criterion = m.args[0]


def pytest_terminal_summary(terminalreporter):
    if not any(_outcomes.values()):
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for k, title in CRITERIA.items():
        results = _outcomes[k]
        if not results:
            tr.write_line(f"criterion {k} ({title}): NOT RUN")
            continue
        failed = [name for name, out in results if out != "passed"]
        status = "PASS" if not failed else "FAIL"
        detail = f"{len(results) - len(failed)}/{len(results)} checks"
        if failed:
            detail += "; failing: " + ", ".join(failed)
        tr.write_line(f"criterion {k} ({title}): {status} [{detail}]")
