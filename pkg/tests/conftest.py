from __future__ import annotations

from collections import defaultdict

import pytest

CRITERIA = {
    1: "d o d = 0 on coordinate + 20 random arrangements, all contexts, < 10 s",
    2: "stalk exactness; unaugmented top slot has dimension 1",
    3: "combinatorial star equals half-space star for every cell",
    4: "duality with the signed simplicial boundary",
    5: "flag and twist orientation identities",
    6: "refinement lifts commute; star differences acyclic",
    7: "dim H-hat = dim cokernel and b, rho mutually inverse",
    8: "witness, stratification and lift-choice independence",
    9: "negative controls fail where expected",
}

_outcomes: dict[int, list[bool]] = defaultdict(list)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    _outcomes[marker.args[0]].append(call.excinfo is None)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n, text in CRITERIA.items():
        results = _outcomes.get(n)
        if not results:
            status = "NOT RUN"
        else:
            status = "PASS" if all(results) else "FAIL"
        terminalreporter.write_line(f"criterion {n}: {status} - {text}")
