import pytest

from ltlprogress import measure

CRITERIA = {
    1: "triad table: 24 exact progress values on the triad model",
    2: "lower bound <= exact on the table, equal on the G a column",
    3: "gap example: X a on the straight line, exact 1 and bound 0",
    4: "half-loop model: G a has progress 0 and no violation",
    5: "F goal / G safe agree with direct reachability on 100 random chains",
    6: "release elimination agrees with its until rewrite on 50 random chains",
    7: "finite-prefix satisfaction extends to all continuations (exhaustive)",
    8: "positive formulas are monotone under label domination (exhaustive)",
    9: "tableau automaton membership equals direct evaluation (exhaustive)",
    10: "every elimination step keeps rows and initial mass summing to 1",
    11: "sampled interval for F b contains 1, no unknowns, reproducible",
    12: "200-state exact progress and 2000-state bound each under 5 s",
}

_outcomes: dict[int, list[bool]] = {}


class StepAudit:
    """Records every elimination step and checks its result independently
    of the checks built into the chain constructor."""

    def __init__(self):
        self.steps = 0
        self.failures: list[str] = []

    def wrap(self, fn):
        def checked(chain, *args):
            try:
                out = fn(chain, *args)
            except measure.ChainError as exc:
                self.failures.append(f"{fn.__name__}: {exc}")
                raise
            self.steps += 1
            for s, row in enumerate(out.rows):
                if sum(p for _, p in row) != 1 or any(p <= 0 for _, p in row):
                    self.failures.append(f"{fn.__name__}: row {out.names[s]!r} is not stochastic")
            if sum(out.init) != 1:
                self.failures.append(f"{fn.__name__}: initial mass {sum(out.init)}")
            return out
        checked.__name__ = fn.__name__
        return checked


AUDIT = StepAudit()


@pytest.fixture(scope="session", autouse=True)
def audit_eliminations():
    names = ("eliminate_next", "eliminate_until", "eliminate_release")
    saved = {n: getattr(measure, n) for n in names}
    for n in names:
        setattr(measure, n, AUDIT.wrap(saved[n]))
    yield AUDIT
    for n, fn in saved.items():
        setattr(measure, n, fn)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        _outcomes.setdefault(mark.args[0], []).append(rep.passed)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n, text in CRITERIA.items():
        runs = _outcomes.get(n)
        status = "NOT RUN" if runs is None else ("PASS" if all(runs) else "FAIL")
        terminalreporter.write_line(f"criterion {n:2d} {status:7s} {text}")
