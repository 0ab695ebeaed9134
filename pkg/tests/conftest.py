from collections import defaultdict

import pytest

from nilpack import packing

_ACCEPTANCE: dict[int, list[tuple[str, bool, str]]] = defaultdict(list)
CRITERIA = {
    1: "balanced optimum radius and density",
    2: "21 table rows by prism-volume targeting",
    3: "(6,3) kissing number 14, depth-stable",
    4: "tiling enumeration for 3 <= p, q <= 100",
    5: "group relations and fibre condition",
    6: "ball volume: small-R limit, Monte Carlo, monotone",
    7: "distance axis values, symmetry, invariance, arc length",
    8: "sphere/geodesic phase identity on 20^3 grid",
    9: "density maximum at the balanced parameter",
}


def record_acceptance(criterion: int, label: str, passed: bool, detail: str = ""):
    _ACCEPTANCE[criterion].append((label, bool(passed), detail))


@pytest.fixture
def acceptance():
    return record_acceptance


@pytest.fixture(scope="session")
def balanced():
    """Balanced solutions keyed by (p, q), solved once per session."""
    cache = {}

    def get(p, q):
        if (p, q) not in cache:
            cache[(p, q)] = packing.solve_balanced(p, q)
        return cache[(p, q)]

    return get


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for crit in sorted(_ACCEPTANCE):
        checks = _ACCEPTANCE[crit]
        n_ok = sum(ok for _, ok, _ in checks)
        verdict = "PASS" if n_ok == len(checks) else "FAIL"
        tr.write_line(f"{verdict}  criterion {crit}: {CRITERIA.get(crit, '')} "
                      f"({n_ok}/{len(checks)} checks)")
        for label, ok, detail in checks:
            if not ok:
                tr.write_line(f"        failed: {label}  {detail}".rstrip())
