"""Buchi automata for formulas in positive normal form and universal path checks.

Automaton states are sets of formulas that must hold at the current
position; a state reads exactly the letters consistent with the literals it
contains, and its successors are the expansions of its ``X`` obligations.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .formula import (
    And, Atom, FalseF, Formula, Next, Not, Or, Release, TrueF, Until, UpWord,
    is_pnf, is_positive, negate_to_pnf, subformulas, to_text,
)
from .graph import nontrivial, tarjan_scc
from .pts import Pts, build_top_extension, check_search

__all__ = [
    "Gnba", "Nba", "gnba_of", "degeneralize", "nba_of", "universal_sat",
    "counterexample", "has_found_violation", "violation_witness", "Lasso", "lasso_words",
]


@dataclass(frozen=True, eq=False)
class Gnba:
    """Generalized Buchi automaton with state-based letter constraints.

    ``require[q]`` / ``forbid[q]`` are the atoms that must / must not be in
    the letter read in state ``q``.  ``acceptance`` has one set of states
    per ``U`` subformula; a run is accepting if it visits each set
    infinitely often.
    """

    states: tuple[frozenset, ...]
    require: tuple[frozenset[str], ...]
    forbid: tuple[frozenset[str], ...]
    succ: tuple[tuple[int, ...], ...]
    initial: frozenset[int]
    acceptance: tuple[frozenset[int], ...]

    def __len__(self):
        return len(self.states)

    def enabled(self, q: int, letter: frozenset[str]) -> bool:
        return self.require[q] <= letter and not (self.forbid[q] & letter)

    def accepts(self, word: UpWord) -> bool:
        """Lasso membership via the product with the word's position graph."""
        n = len(word)
        letters = [word.letter(i) for i in range(n)]
        nodes: dict[tuple[int, int], int] = {}
        succ: list[list[int]] = []
        order: list[tuple[int, int]] = []

        def node(q, i):
            key = (q, i)
            if key not in nodes:
                nodes[key] = len(order)
                order.append(key)
                succ.append([])
            return nodes[key]

        roots = [node(q, 0) for q in sorted(self.initial) if self.enabled(q, letters[0])]
        k = 0
        while k < len(order):
            q, i = order[k]
            j = word.next_position(i)
            for r in self.succ[q]:
                if self.enabled(r, letters[j]):
                    succ[k].append(node(r, j))
            k += 1
        for comp in tarjan_scc(succ, roots):
            if nontrivial(comp, succ):
                qs = {order[v][0] for v in comp}
                if all(qs & acc for acc in self.acceptance):
                    return True
        return False

    def accepts_all(self, alphabet: Sequence[frozenset[str]], max_prefix: int,
                    loops: Sequence[tuple[frozenset[str], ...]]) -> np.ndarray:
        """Membership of every word ``u v^omega`` with ``|u| <= max_prefix``.

        The result is ordered like :func:`lasso_words`.  Good-state sets
        (states with an accepting run on the rest of the word) are computed
        once per loop and pulled back one letter at a time for all
        prefixes of the same length together.
        """
        nq = len(self)
        step = np.zeros((nq, nq), dtype=np.int64)
        for q, rs in enumerate(self.succ):
            step[q, list(rs)] = 1
        enabled = [np.array([self.enabled(q, l) for q in range(nq)], dtype=bool)
                   for l in alphabet]
        init = np.zeros(nq, dtype=bool)
        init[list(self.initial)] = True
        out = []
        for v in loops:
            good = self._loop_good(v)[None, :]
            out.append((good & init).any(axis=1))
            for _ in range(max_prefix):
                reach = (good.astype(np.int64) @ step.T) > 0
                good = np.concatenate([reach & e for e in enabled])
                out.append((good & init).any(axis=1))
        return np.concatenate(out) if out else np.zeros(0, dtype=bool)

    def _loop_good(self, v: Sequence[frozenset[str]]) -> np.ndarray:
        # states at loop position 0 from which v^omega has an accepting run
        m, nq = len(v), len(self)
        index = {}
        keys = []
        for i in range(m):
            for q in range(nq):
                if self.enabled(q, v[i]):
                    index[(q, i)] = len(keys)
                    keys.append((q, i))
        succ = [[index[(r, (i + 1) % m)] for r in self.succ[q] if (r, (i + 1) % m) in index]
                for q, i in keys]
        good = [False] * len(keys)
        for comp in tarjan_scc(succ):
            # successors' components are finished before this one
            ok = nontrivial(comp, succ) and all(
                {keys[x][0] for x in comp} & acc for acc in self.acceptance)
            if not ok:
                ok = any(good[w] for x in comp for w in succ[x])
            for x in comp:
                good[x] = ok
        res = np.zeros(nq, dtype=bool)
        for (q, i), x in index.items():
            if i == 0 and good[x]:
                res[q] = True
        return res


class Nba(Gnba):
    """A :class:`Gnba` with exactly one acceptance set."""

    @property
    def accepting(self) -> frozenset[int]:
        return self.acceptance[0]


def lasso_words(alphabet: Sequence[frozenset[str]], max_prefix: int,
                loops: Iterable[tuple[frozenset[str], ...]]) -> list[UpWord]:
    """Words in the order used by :meth:`Gnba.accepts_all`: by loop, then by
    prefix length, then prefixes in ``itertools.product`` order."""
    return [UpWord(u, v) for v in loops for k in range(max_prefix + 1)
            for u in product(alphabet, repeat=k)]


def _expand(pending: Iterable[Formula]) -> list[frozenset]:
    """All locally consistent closures of ``pending`` under the expansion laws."""
    results: list[frozenset] = []
    seen: set[frozenset] = set()
    stack = [(tuple(pending), frozenset())]
    while stack:
        todo, cur = stack.pop()
        while todo:
            f, todo = todo[0], todo[1:]
            if f in cur:
                continue
            if isinstance(f, FalseF):
                break
            if isinstance(f, Atom) and Not(f) in cur:
                break
            if isinstance(f, Not) and f.arg in cur:
                break
            cur = cur | {f}
            if isinstance(f, And):
                todo = (f.left, f.right) + todo
            elif isinstance(f, Or):
                stack.append(((f.right,) + todo, cur))
                todo = (f.left,) + todo
            elif isinstance(f, Until):
                stack.append(((f.left, Next(f)) + todo, cur))
                todo = (f.right,) + todo
            elif isinstance(f, Release):
                stack.append(((f.right, Next(f)) + todo, cur))
                todo = (f.right, f.left) + todo
        else:
            if cur not in seen:
                seen.add(cur)
                results.append(cur)
    return results


def gnba_of(phi: Formula) -> Gnba:
    """Tableau automaton accepting exactly the words satisfying ``phi``."""
    if not is_pnf(phi):
        raise ValueError(f"formula is not in positive normal form: {to_text(phi)}")
    untils = []
    for g in subformulas(phi):
        if isinstance(g, Until) and g not in untils:
            untils.append(g)
    index: dict[frozenset, int] = {}
    states: list[frozenset] = []
    succ: list[list[int]] = []

    def add(b):
        if b not in index:
            index[b] = len(states)
            states.append(b)
            succ.append(None)
        return index[b]

    initial = frozenset(add(b) for b in _expand([phi]))
    k = 0
    while k < len(states):
        obligations = [g.arg for g in states[k] if isinstance(g, Next)]
        obligations.sort(key=to_text)
        succ[k] = tuple(add(b) for b in _expand(obligations))
        k += 1
    require = tuple(frozenset(g.name for g in b if isinstance(g, Atom)) for b in states)
    forbid = tuple(frozenset(g.arg.name for g in b if isinstance(g, Not)) for b in states)
    acceptance = tuple(
        frozenset(i for i, b in enumerate(states) if u not in b or u.right in b)
        for u in untils)
    return Gnba(tuple(states), require, forbid, tuple(succ), initial, acceptance)


def degeneralize(g: Gnba) -> Nba:
    """Counter construction: copy ``i`` waits for acceptance set ``i``."""
    k = max(1, len(g.acceptance))
    sets = g.acceptance or (frozenset(range(len(g))),)

    def idx(q, i):
        return q * k + i

    states, require, forbid, succ = [], [], [], []
    for q in range(len(g)):
        for i in range(k):
            states.append((g.states[q], i))
            require.append(g.require[q])
            forbid.append(g.forbid[q])
            j = (i + 1) % k if q in sets[i] else i
            succ.append(tuple(idx(r, j) for r in g.succ[q]))
    accepting = frozenset(idx(q, 0) for q in sets[0])
    return Nba(tuple(states), tuple(require), tuple(forbid), tuple(succ),
               frozenset(idx(q, 0) for q in g.initial), (accepting,))


def nba_of(phi: Formula) -> Nba:
    return degeneralize(gnba_of(phi))


@dataclass(frozen=True)
class Lasso:
    """A path of model states: ``prefix`` followed by ``cycle`` repeated forever."""

    prefix: tuple[str, ...]
    cycle: tuple[str, ...]


def counterexample(model: Pts, phi: Formula) -> Lasso | None:
    """A path of ``model`` violating ``phi``, or ``None`` if every path satisfies it.

    Probabilities are ignored: every transition is a possible step.
    """
    nba = nba_of(negate_to_pnf(phi))
    names = list(model.states)
    pos = {s: i for i, s in enumerate(names)}
    post = [sorted({pos[t.target] for t in model.outgoing(s)}) for s in names]
    labels = [model.states[s] for s in names]

    nodes: dict[tuple[int, int], int] = {}
    order: list[tuple[int, int]] = []
    succ: list[list[int]] = []

    def node(s, q):
        key = (s, q)
        if key not in nodes:
            nodes[key] = len(order)
            order.append(key)
            succ.append([])
        return nodes[key]

    s0 = pos[model.initial]
    roots = [node(s0, q) for q in sorted(nba.initial) if nba.enabled(q, labels[s0])]
    k = 0
    while k < len(order):
        s, q = order[k]
        for t in post[s]:
            for r in nba.succ[q]:
                if nba.enabled(r, labels[t]):
                    succ[k].append(node(t, r))
        k += 1
    for comp in tarjan_scc(succ, roots):
        if not nontrivial(comp, succ):
            continue
        hits = [v for v in comp if order[v][1] in nba.accepting]
        if not hits:
            continue
        target = hits[0]
        stem = _bfs_path(succ, roots, {target}, None)
        members = set(comp)
        loop = _bfs_path(succ, succ[target], {target}, members)
        prefix = tuple(names[order[v][0]] for v in stem[:-1])
        cycle = tuple(names[order[v][0]] for v in [target] + loop[:-1])
        return Lasso(prefix, cycle)
    return None


def _bfs_path(succ, sources, goals, within) -> list[int]:
    parent: dict[int, int | None] = {}
    queue = deque()
    for v in sources:
        if within is not None and v not in within:
            continue
        if v not in parent:
            parent[v] = None
            queue.append(v)
    while queue:
        v = queue.popleft()
        if v in goals:
            path = [v]
            while parent[path[-1]] is not None:
                path.append(parent[path[-1]])
            return path[::-1]
        for w in succ[v]:
            if (within is None or w in within) and w not in parent:
                parent[w] = v
                queue.append(w)
    raise AssertionError("goal unreachable")


def universal_sat(model: Pts, phi: Formula) -> bool:
    """Does every execution path of ``model`` satisfy ``phi``."""
    return counterexample(model, phi) is None


def violation_witness(model: Pts, search, phi: Formula) -> Lasso | None:
    """A violating path of the top extension, or ``None`` if no violation was found."""
    if not is_positive(phi):
        raise ValueError(f"violation checking needs a negation-free formula: {to_text(phi)}")
    search = check_search(model, search)
    top, _ = build_top_extension(model, search)
    return counterexample(top, phi)


def has_found_violation(model: Pts, search, phi: Formula) -> bool:
    """True iff no extension of ``search`` satisfies ``phi`` on all of its paths.

    For negation-free ``phi`` the extension whose sink carries every
    proposition is the most permissive one, so checking it alone decides
    the question.
    """
    return violation_witness(model, search, phi) is not None
