"""Exact LTL measures on finite Markov chains and the progress measure.

Temporal operators are removed one at a time, innermost first, by refining
the chain so that a fresh atomic proposition marks exactly the positions at
which the removed subformula holds:

* ``X xi`` refines states into edges ``(s, t)``;
* ``xi1 U xi2`` and ``xi1 R xi2`` attach a truth bit to each state and
  condition transitions on the successor's bit where the current state
  defers to it.

Once the formula is propositional its measure is read off the initial
distribution.  All arithmetic is exact.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import count
from typing import Hashable, Sequence

from .formula import (
    And, Atom, Formula, Next, Not, Or, Release, Until, holds_in,
    is_pnf, is_positive, is_propositional, subformulas, to_text,
)
from .linsolve import constrained_reachability
from .pts import Pts, build_minimal_extension, check_search

__all__ = [
    "Chain", "ChainError", "NonPositiveFormulaError", "ViolationFoundError",
    "chain_of", "until_prob", "eliminate_next", "eliminate_until",
    "eliminate_release", "ltl_measure", "prog_exact", "prog_exact_unchecked",
    "prog_lower_bound", "fresh_atom",
]

StatePredicate = Formula

ONE = Fraction(1)
ZERO = Fraction(0)


class ChainError(ValueError):
    pass


class NonPositiveFormulaError(ValueError):
    pass


class ViolationFoundError(Exception):
    """The search already refutes the formula on every extension."""

    def __init__(self, formula: Formula, witness=None):
        super().__init__(f"the search has found a violation of {to_text(formula)}")
        self.formula = formula
        self.witness = witness


@dataclass(frozen=True, eq=False)
class Chain:
    """Finite Markov chain with labelled states and an initial distribution.

    ``rows[s]`` holds ``(successor index, probability)`` pairs with positive
    probabilities summing to exactly one; ``init`` sums to exactly one.  Both
    are checked on construction.
    """

    names: tuple[Hashable, ...]
    labels: tuple[frozenset[str], ...]
    rows: tuple[tuple[tuple[int, Fraction], ...], ...]
    init: tuple[Fraction, ...]

    def __post_init__(self):
        n = len(self.names)
        if not (len(self.labels) == len(self.rows) == len(self.init) == n):
            raise ChainError("names, labels, rows and init differ in length")
        for s, row in enumerate(self.rows):
            total = ZERO
            for j, p in row:
                if not 0 <= j < n:
                    raise ChainError(f"state {self.names[s]!r}: successor index {j} out of range")
                if p <= 0:
                    raise ChainError(f"state {self.names[s]!r}: non-positive entry {p}")
                total += p
            if total != 1:
                raise ChainError(f"state {self.names[s]!r}: row sums to {total}")
        if any(x < 0 for x in self.init):
            raise ChainError("negative initial mass")
        if sum(self.init, ZERO) != 1:
            raise ChainError(f"initial distribution sums to {sum(self.init, ZERO)}")

    def __len__(self):
        return len(self.names)

    def index(self, name: Hashable) -> int:
        return self.names.index(name)

    def row_dict(self, s: int) -> dict[int, Fraction]:
        return dict(self.rows[s])


def chain_of(model: Pts) -> Chain:
    """Markov chain of a PTS; parallel transitions between two states are merged."""
    names = tuple(model.states)
    pos = {s: i for i, s in enumerate(names)}
    rows = []
    for s in names:
        acc: dict[int, Fraction] = {}
        for t in model.outgoing(s):
            j = pos[t.target]
            acc[j] = acc.get(j, ZERO) + t.prob
        rows.append(tuple(acc.items()))
    init = tuple(ONE if s == model.initial else ZERO for s in names)
    return Chain(names, tuple(model.states[s] for s in names), tuple(rows), init)


def until_prob(chain: Chain, a: StatePredicate, b: StatePredicate) -> list[Fraction]:
    """Per-state probability of ``a U b`` with ``a`` and ``b`` read on state labels."""
    target = [holds_in(b, l) for l in chain.labels]
    allowed = [holds_in(a, l) for l in chain.labels]
    return constrained_reachability(chain.rows, target, allowed)


def _check_fresh(chain: Chain, p: str):
    if any(p in l for l in chain.labels):
        raise ChainError(f"atom {p!r} already labels a state")


def eliminate_next(chain: Chain, xi: StatePredicate, p: str) -> Chain:
    """Refine states into edges; ``p`` labels ``(s, t)`` iff ``xi`` holds at ``t``."""
    _check_fresh(chain, p)
    edges: list[tuple[int, int, Fraction]] = []
    first_edge: list[int] = []
    for s, row in enumerate(chain.rows):
        first_edge.append(len(edges))
        for t, prob in row:
            edges.append((s, t, prob))
    holds = [holds_in(xi, l) for l in chain.labels]
    names, labels, rows, init = [], [], [], []
    for s, t, prob in edges:
        names.append((chain.names[s], chain.names[t]))
        labels.append(chain.labels[s] | {p} if holds[t] else chain.labels[s])
        base = first_edge[t]
        rows.append(tuple((base + k, pu) for k, (_, pu) in enumerate(chain.rows[t])))
        init.append(chain.init[s] * prob)
    return Chain(tuple(names), tuple(labels), tuple(rows), tuple(init))


def _bit_refine(chain: Chain, q: Sequence[Fraction], defer: Sequence[bool], p: str) -> Chain:
    # states (s, True) exist iff q_s > 0, (s, False) iff q_s < 1
    idx: dict[tuple[int, bool], int] = {}
    names, labels = [], []
    for s in range(len(chain)):
        for bit in (True, False):
            if (q[s] > 0) if bit else (q[s] < 1):
                idx[(s, bit)] = len(names)
                names.append((chain.names[s], bit))
                labels.append(chain.labels[s] | {p} if bit else chain.labels[s])
    rows, init = [], []
    for (s, bit), _ in idx.items():
        row = []
        if defer[s]:
            w = q[s] if bit else 1 - q[s]
            for t, prob in chain.rows[s]:
                wt = q[t] if bit else 1 - q[t]
                if wt:
                    row.append((idx[(t, bit)], prob * wt / w))
        else:
            for t, prob in chain.rows[s]:
                if q[t] > 0:
                    row.append((idx[(t, True)], prob * q[t]))
                if q[t] < 1:
                    row.append((idx[(t, False)], prob * (1 - q[t])))
        rows.append(tuple(row))
        init.append(chain.init[s] * (q[s] if bit else 1 - q[s]))
    return Chain(tuple(names), tuple(labels), tuple(rows), tuple(init))


def eliminate_until(chain: Chain, xi1: StatePredicate, xi2: StatePredicate, p: str) -> Chain:
    """Refine by the truth of ``xi1 U xi2``; ``p`` marks the states where it holds."""
    _check_fresh(chain, p)
    q = until_prob(chain, xi1, xi2)
    defer = [holds_in(xi1, l) and not holds_in(xi2, l) for l in chain.labels]
    return _bit_refine(chain, q, defer, p)


def eliminate_release(chain: Chain, xi1: StatePredicate, xi2: StatePredicate, p: str) -> Chain:
    """Refine by the truth of ``xi1 R xi2``, the dual of ``!xi1 U !xi2``."""
    _check_fresh(chain, p)
    q = [1 - x for x in until_prob(chain, Not(xi1), Not(xi2))]
    defer = [holds_in(xi2, l) and not holds_in(xi1, l) for l in chain.labels]
    return _bit_refine(chain, q, defer, p)


def fresh_atom(chain: Chain, counter) -> str:
    used = set().union(*chain.labels) if len(chain) else set()
    while True:
        name = f"__p{next(counter)}"
        if name not in used:
            return name


def _substitute(f: Formula, old: Formula, new: Formula) -> Formula:
    if f == old:
        return new
    if isinstance(f, (And, Or, Until, Release)):
        return type(f)(_substitute(f.left, old, new), _substitute(f.right, old, new))
    if isinstance(f, Next):
        return Next(_substitute(f.arg, old, new))
    return f


def ltl_measure(chain: Chain, phi: Formula) -> Fraction:
    """Probability that a path of ``chain`` satisfies ``phi`` (negation only on atoms)."""
    if not is_pnf(phi):
        raise ValueError(f"formula is not in positive normal form: {to_text(phi)}")
    counter = count()
    while not is_propositional(phi):
        node = next(g for g in subformulas(phi) if isinstance(g, (Next, Until, Release)))
        p = fresh_atom(chain, counter)
        if isinstance(node, Next):
            chain = eliminate_next(chain, node.arg, p)
        elif isinstance(node, Until):
            chain = eliminate_until(chain, node.left, node.right, p)
        else:
            chain = eliminate_release(chain, node.left, node.right, p)
        phi = _substitute(phi, node, Atom(p))
    return sum((m for m, l in zip(chain.init, chain.labels) if m and holds_in(phi, l)), ZERO)


def _require_positive(phi: Formula):
    if not is_positive(phi):
        raise NonPositiveFormulaError(
            f"progress is only defined here for negation-free formulas: {to_text(phi)}")


def prog_exact_unchecked(model: Pts, search, phi: Formula) -> Fraction:
    """Measure of the paths of the minimal extension that satisfy ``phi``.

    This equals the progress measure only when the search has not found a
    violation of ``phi``; otherwise it is a diagnostic value.
    """
    _require_positive(phi)
    ext, _ = build_minimal_extension(model, search)
    return ltl_measure(chain_of(ext), phi)


def prog_exact(model: Pts, search, phi: Formula) -> Fraction:
    """Exact progress of ``search`` towards verifying the negation-free ``phi``.

    Raises :class:`ViolationFoundError` if no extension of the search can
    satisfy ``phi`` on all paths.
    """
    from .qualitative import violation_witness

    _require_positive(phi)
    search = check_search(model, search)
    witness = violation_witness(model, search, phi)
    if witness is not None:
        raise ViolationFoundError(phi, witness)
    return prog_exact_unchecked(model, search, phi)


def prog_lower_bound(model: Pts, search) -> Fraction:
    """Probability of never leaving the explored transitions; formula independent."""
    ext, sink = build_minimal_extension(model, search)
    chain = chain_of(ext)
    target = [name == sink for name in chain.names]
    reach = constrained_reachability(chain.rows, target, [True] * len(chain))
    return 1 - reach[chain.index(model.initial)]
