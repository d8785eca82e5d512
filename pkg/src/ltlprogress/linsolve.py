"""Exact constrained-reachability probabilities.

The unknowns are split off by graph analysis first (probability 0 and 1
states need no arithmetic), the remaining states are grouped into strongly
connected components and each component is solved by sparse Gaussian
elimination over GMP rationals, successors first.
"""
from __future__ import annotations

import heapq
from fractions import Fraction
from typing import Sequence

from gmpy2 import mpq

from .graph import backward_reachable, tarjan_scc

__all__ = ["constrained_reachability", "solve_sparse"]

Row = Sequence[tuple[int, Fraction]]


def _to_mpq(x: Fraction) -> mpq:
    return mpq(x.numerator, x.denominator)


def _to_fraction(x: mpq) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


def constrained_reachability(rows: Sequence[Row], target: Sequence[bool],
                             allowed: Sequence[bool]) -> list[Fraction]:
    """Probability, from each state, of reaching a target state while every
    earlier state is allowed.

    ``rows[s]`` lists ``(successor, probability)`` pairs of a stochastic matrix.
    """
    n = len(rows)
    succ = [[j for j, _ in row] for row in rows]
    inner = [allowed[s] and not target[s] for s in range(n)]
    can = backward_reachable(succ, [s for s in range(n) if target[s]], inner)
    zero = [not c for c in can]
    maybe = [inner[s] and can[s] for s in range(n)]
    risky = backward_reachable(succ, [s for s in range(n) if zero[s]], maybe)

    value: list[mpq | None] = [None] * n
    for s in range(n):
        if target[s]:
            value[s] = mpq(1)
        elif zero[s]:
            value[s] = mpq(0)
        elif not risky[s]:
            value[s] = mpq(1)
    unknown = [s for s in range(n) if value[s] is None]
    if not unknown:
        return [_to_fraction(v) for v in value]

    local = {s: k for k, s in enumerate(unknown)}
    sub = [[local[j] for j in succ[s] if j in local] for s in unknown]
    for comp in tarjan_scc(sub):
        members = {unknown[k] for k in comp}
        matrix: dict[int, dict[int, mpq]] = {}
        rhs: dict[int, mpq] = {}
        for s in members:
            row = {s: mpq(1)}
            b = mpq(0)
            for j, p in rows[s]:
                p = _to_mpq(p)
                if j in members:
                    row[j] = row.get(j, mpq(0)) - p
                else:
                    b += p * value[j]
            matrix[s] = {j: v for j, v in row.items() if v != 0}
            rhs[s] = b
        for s, x in solve_sparse(matrix, rhs).items():
            value[s] = x
    return [_to_fraction(v) for v in value]


def solve_sparse(matrix: dict[int, dict[int, mpq]], rhs: dict[int, mpq]) -> dict[int, mpq]:
    """Solve ``matrix @ x = rhs`` exactly, pivoting on the diagonal.

    Diagonal pivots are safe for the nonsingular M-matrices ``I - P``
    produced above.  Pivots are chosen by smallest Markowitz count.
    """
    if len(matrix) == 1:
        (k, row), = matrix.items()
        return {k: rhs[k] / row[k]}
    rows = {i: dict(r) for i, r in matrix.items()}
    b = dict(rhs)
    cols: dict[int, set[int]] = {i: set() for i in rows}
    for i, r in rows.items():
        for j in r:
            cols[j].add(i)

    def cost(k):
        return (len(rows[k]) - 1) * (len(cols[k]) - 1)

    heap = [(cost(k), k) for k in rows]
    heapq.heapify(heap)
    done: set[int] = set()
    order: list[int] = []
    while heap:
        c, k = heapq.heappop(heap)
        if k in done or c != cost(k):
            continue
        pivot_row = rows[k]
        piv = pivot_row[k]
        if piv == 0:
            raise ZeroDivisionError("singular system")
        bk = b[k]
        for j in pivot_row:
            if j != k:
                cols[j].discard(k)
        for i in list(cols[k]):
            if i == k or i in done:
                continue
            ri = rows[i]
            f = ri.pop(k) / piv
            for j, v in pivot_row.items():
                if j == k:
                    continue
                new = ri.get(j, 0) - f * v
                if new == 0:
                    if j in ri:
                        del ri[j]
                        cols[j].discard(i)
                else:
                    if j not in ri:
                        cols[j].add(i)
                    ri[j] = new
            b[i] -= f * bk
            heapq.heappush(heap, (cost(i), i))
        for j in pivot_row:
            if j != k and j not in done:
                heapq.heappush(heap, (cost(j), j))
        cols[k] = set()
        done.add(k)
        order.append(k)
    x: dict[int, mpq] = {}
    for k in reversed(order):
        acc = b[k]
        for j, v in rows[k].items():
            if j != k:
                acc -= v * x[j]
        x[k] = acc / rows[k][k]
    return x
