"""Exploration strategies, progress curves and sampled interval estimates."""
from __future__ import annotations

import csv
import heapq
import math
import random
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence, TextIO

from .formula import Formula, UpWord, eval_up_word, is_positive, to_text
from .measure import (
    Chain, NonPositiveFormulaError, ViolationFoundError, prog_exact, prog_lower_bound,
)
from .pts import Pts

__all__ = [
    "Strategy", "explore", "ProgressRow", "progress_curve", "write_curve_csv",
    "IntervalEstimate", "interval_estimate", "hoeffding_slack",
    "exhaustive_bracket", "RNG_NAME", "VIOLATION",
]

RNG_NAME = "MT19937"  # random.Random
VIOLATION = "VIOLATION"


class Strategy(str, Enum):
    BFS = "bfs"
    DFS = "dfs"
    GREEDY = "greedy"


def explore(model: Pts, strategy: Strategy | str, budget: int) -> frozenset[str]:
    """Transitions explored after ``budget`` steps of the given strategy.

    The frontier holds unexplored transitions leaving reached states.  A
    newly reached state contributes its outgoing transitions in id order.
    ``bfs`` takes the oldest frontier entry, ``dfs`` the newest and
    ``greedy`` the most probable one (ties broken by id).
    """
    strategy = Strategy(strategy)
    if budget < 0:
        raise ValueError("budget must be non-negative")
    explored: list[str] = []
    reached = set()
    frontier: list = []
    serial = 0

    def reach(state):
        nonlocal serial
        if state in reached:
            return
        reached.add(state)
        for t in sorted(model.outgoing(state), key=lambda t: t.id):
            if strategy is Strategy.GREEDY:
                heapq.heappush(frontier, (-t.prob, t.id, t))
            else:
                frontier.append((serial, t))
            serial += 1

    reach(model.initial)
    head = 0
    while len(explored) < budget:
        if strategy is Strategy.GREEDY:
            if not frontier:
                break
            t = heapq.heappop(frontier)[2]
        elif strategy is Strategy.BFS:
            if head == len(frontier):
                break
            t = frontier[head][1]
            head += 1
        else:
            if not frontier:
                break
            t = frontier.pop()[1]
        explored.append(t.id)
        reach(t.target)
    return frozenset(explored)


@dataclass(frozen=True)
class ProgressRow:
    budget: int
    search_size: int
    lower_bound: Fraction
    exact: Fraction | str  # VIOLATION when the search refutes the formula


def progress_curve(model: Pts, phi: Formula, strategy: Strategy | str,
                   budgets: Sequence[int]) -> list[ProgressRow]:
    if not is_positive(phi):
        raise NonPositiveFormulaError(f"negation-free formula required: {to_text(phi)}")
    if list(budgets) != sorted(budgets):
        raise ValueError("budgets must be ascending")
    rows = []
    for b in budgets:
        search = explore(model, strategy, b)
        bound = prog_lower_bound(model, search)
        try:
            exact: Fraction | str = prog_exact(model, search, phi)
        except ViolationFoundError:
            exact = VIOLATION
        rows.append(ProgressRow(b, len(search), bound, exact))
    return rows


def write_curve_csv(rows: Iterable[ProgressRow], out: TextIO) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["budget", "search_size", "lower_bound", "exact"])
    for r in rows:
        w.writerow([r.budget, r.search_size, str(r.lower_bound), str(r.exact)])


@dataclass(frozen=True)
class IntervalEstimate:
    n_samples: int
    n_definitely_sat: int
    n_definitely_unsat: int
    n_unknown: int
    lo: Fraction
    hi: Fraction
    confidence_delta: Fraction
    slack: Fraction
    seed: int
    rng: str = RNG_NAME


def hoeffding_slack(n: int, delta: Fraction) -> Fraction:
    """Rational upper bound on ``sqrt(ln(2/delta) / (2n))``."""
    eps = math.sqrt(math.log(2 / float(delta)) / (2 * n))
    # one part in 10^9 dominates any float rounding error here
    return Fraction(math.ceil(eps * 10**9) + 1, 10**9)


def _sample_prefix(chain: Chain, rng: random.Random, horizon: int, cum):
    s = _draw(rng, cum[-1])
    trace = [chain.labels[s]]
    for _ in range(horizon - 1):
        s = _draw(rng, cum[s])
        trace.append(chain.labels[s])
    return tuple(trace)


def _draw(rng: random.Random, table):
    # exact sampling: integer weights over a common denominator
    den, points, targets = table
    x = rng.randrange(den)
    lo, hi = 0, len(points) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if x < points[mid]:
            hi = mid
        else:
            lo = mid + 1
    return targets[lo]


def _cumulative(pairs):
    pairs = [(j, p) for j, p in pairs if p]
    den = math.lcm(*(p.denominator for _, p in pairs))
    acc, points, targets = 0, [], []
    for j, p in pairs:
        acc += p.numerator * (den // p.denominator)
        points.append(acc)
        targets.append(j)
    return den, points, targets


def interval_estimate(chain: Chain, phi: Formula, n: int, horizon: int, seed: int,
                      delta: Fraction = Fraction(1, 20),
                      ap: Iterable[str] | None = None) -> IntervalEstimate:
    """Bracket ``ltl_measure(chain, phi)`` from ``n`` sampled trace prefixes.

    A prefix is definitely satisfying if it satisfies ``phi`` when followed by
    empty letters forever, and definitely violating if it fails even when
    followed by the letter holding every proposition.  Both classifications
    are sound for negation-free formulas.  The bracket is widened by the
    two-sided Hoeffding slack for confidence ``1 - delta`` per side.
    ``ap`` defaults to the union of the chain's labels.
    """
    if not is_positive(phi):
        raise NonPositiveFormulaError(f"negation-free formula required: {to_text(phi)}")
    if n < 1 or horizon < 1:
        raise ValueError("need n >= 1 and horizon >= 1")
    delta = Fraction(delta)
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    everything = frozenset(ap) if ap is not None else frozenset().union(*chain.labels)
    cum = [_cumulative(row) for row in chain.rows]
    cum.append(_cumulative(enumerate(chain.init)))
    rng = random.Random(seed)
    memo: dict[tuple, int] = {}
    counts = [0, 0, 0]  # sat, unsat, unknown
    for _ in range(n):
        sigma = _sample_prefix(chain, rng, horizon, cum)
        verdict = memo.get(sigma)
        if verdict is None:
            verdict = _classify(sigma, phi, everything)
            memo[sigma] = verdict
        counts[verdict] += 1
    sat, unsat, unknown = counts
    slack = hoeffding_slack(n, delta)
    lo = max(Fraction(0), Fraction(sat, n) - slack)
    hi = min(Fraction(1), 1 - Fraction(unsat, n) + slack)
    return IntervalEstimate(n, sat, unsat, unknown, lo, hi, delta, slack, seed)


def _classify(sigma, phi, everything) -> int:
    if eval_up_word(UpWord(sigma, (frozenset(),)), phi):
        return 0
    if not eval_up_word(UpWord(sigma, (everything,)), phi):
        return 1
    return 2


def exhaustive_bracket(chain: Chain, phi: Formula, horizon: int) -> tuple[Fraction, Fraction]:
    """Exact probabilities of the definitely-satisfying prefixes and of the
    prefixes not definitely violating, over all prefixes of length ``horizon``.

    ``ltl_measure(chain, phi)`` lies between the two values.
    """
    everything = frozenset().union(*chain.labels)
    dist: dict[tuple[int, tuple], Fraction] = {}
    for s, m in enumerate(chain.init):
        if m:
            key = (s, (chain.labels[s],))
            dist[key] = dist.get(key, Fraction(0)) + m
    for _ in range(horizon - 1):
        nxt: dict[tuple[int, tuple], Fraction] = {}
        for (s, trace), m in dist.items():
            for t, p in chain.rows[s]:
                key = (t, trace + (chain.labels[t],))
                nxt[key] = nxt.get(key, Fraction(0)) + m * p
        dist = nxt
    by_trace: dict[tuple, Fraction] = {}
    for (_, trace), m in dist.items():
        by_trace[trace] = by_trace.get(trace, Fraction(0)) + m
    sat = unsat = Fraction(0)
    for trace, m in by_trace.items():
        verdict = _classify(trace, phi, everything)
        if verdict == 0:
            sat += m
        elif verdict == 1:
            unsat += m
    return sat, 1 - unsat
