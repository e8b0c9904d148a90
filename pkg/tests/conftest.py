import pytest

CRITERIA = {
    1: "operator closure and basic reduction laws",
    2: "lexicographic revision compliance",
    3: "soundness of the lexicographic revision system",
    4: "representation biconditionals on table operators",
    5: "modally equivalent operators that differ on DP1",
    6: "lexicographic contraction",
    7: "mu/degree coherence",
    8: "conditional-belief facts under revision",
    9: "preorder enumeration counts",
}

_outcomes: dict[int, str] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    n = marker.args[0]
    if rep.failed:
        _outcomes[n] = "FAIL"
    elif rep.when == "call" and rep.passed:
        _outcomes.setdefault(n, "PASS")


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n, label in CRITERIA.items():
        status = _outcomes.get(n, "NOT RUN")
        terminalreporter.write_line(f"criterion {n}: {status}  {label}")
