"""Reference models and seeded random generators for tests and demos."""
from __future__ import annotations

import random
from fractions import Fraction

from .measure import Chain
from .pts import Pts

__all__ = [
    "triad", "half_loop", "straight_line", "diamond", "random_pts", "random_chain", "drift_pts",
]

HALF = Fraction(1, 2)


def triad() -> Pts:
    """Four states, six transitions; every state has ``a``, ``s1`` and ``s2`` also ``b``."""
    return Pts.build(
        {"a", "b"},
        {"s0": {"a"}, "s1": {"a", "b"}, "s2": {"a", "b"}, "s3": {"a"}},
        "s0",
        [("t01", "s0", "s1", HALF), ("t02", "s0", "s2", HALF),
         ("t10", "s1", "s0", HALF), ("t13", "s1", "s3", HALF),
         ("t22", "s2", "s2", 1), ("t33", "s3", "s3", 1)],
    )


def half_loop() -> Pts:
    """``s0`` (labelled ``a``) loops with 1/2 and moves to the unlabelled ``s1`` with 1/2."""
    return Pts.build(
        {"a"}, {"s0": {"a"}, "s1": set()}, "s0",
        [("t00", "s0", "s0", HALF), ("t01", "s0", "s1", HALF), ("t11", "s1", "s1", 1)],
    )


def straight_line() -> Pts:
    """``s0`` moves to ``s1`` (labelled ``a``), which loops forever."""
    return Pts.build(
        {"a"}, {"s0": set(), "s1": {"a"}}, "s0",
        [("t01", "s0", "s1", 1), ("t11", "s1", "s1", 1)],
    )


def diamond() -> Pts:
    """An extension of the triad's search ``{t01, t02}`` that joins both branches in ``s3``."""
    return Pts.build(
        {"a", "b"},
        {"s0": {"a"}, "s1": {"a", "b"}, "s2": {"a", "b"}, "s3": {"a"}},
        "s0",
        [("t01", "s0", "s1", HALF), ("t02", "s0", "s2", HALF),
         ("t13", "s1", "s3", 1), ("t23", "s2", "s3", 1), ("t33", "s3", "s3", 1)],
    )


def _split(rng: random.Random, k: int) -> list[Fraction]:
    weights = [rng.randint(1, 4) for _ in range(k)]
    total = sum(weights)
    return [Fraction(w, total) for w in weights]


def random_pts(n_states: int, seed: int, max_out: int = 3, atoms=("a", "b", "c"),
               locality: int | None = None, label_density: float = 0.5,
               everywhere=()) -> Pts:
    """Seeded random PTS with states ``s0 .. s{n-1}``.

    With ``locality`` set, successors of ``s_i`` are drawn from
    ``s_{i-locality} .. s_{i+locality}``, which mimics the mostly local
    control flow of programs; otherwise they are uniform.  Atoms in
    ``everywhere`` label every state.
    """
    rng = random.Random(seed)
    names = [f"s{i}" for i in range(n_states)]
    states = {s: {a for a in atoms if rng.random() < label_density} | set(everywhere)
              for s in names}
    transitions = []
    for i, s in enumerate(names):
        k = rng.randint(1, max_out)
        if locality is None:
            pool = range(n_states)
        else:
            pool = range(max(0, i - locality), min(n_states, i + locality + 1))
        targets = rng.sample(list(pool), min(k, len(pool)))
        for j, p in zip(targets, _split(rng, len(targets))):
            transitions.append((f"t{i}_{j}", s, names[j], p))
    return Pts.build(set(atoms), states, names[0], transitions)


def random_chain(seed: int, max_states: int = 8, atoms=("a", "b", "c")) -> Chain:
    """Seeded random chain with at most ``max_states`` states and a point initial state."""
    rng = random.Random(seed)
    n = rng.randint(1, max_states)
    labels = tuple(frozenset(a for a in atoms if rng.random() < 0.5) for _ in range(n))
    rows = []
    for _ in range(n):
        k = rng.randint(1, min(3, n))
        targets = rng.sample(range(n), k)
        rows.append(tuple(zip(targets, _split(rng, k))))
    init = tuple(Fraction(int(i == 0)) for i in range(n))
    return Chain(tuple(range(n)), labels, tuple(rows), init)


def drift_pts(n_states: int, seed: int, back: int = 3, atoms=("a", "b", "c"),
              everywhere=(), uniform_back: bool = False, exit_chance: float = 0.05) -> Pts:
    """Seeded program-like PTS: ``s_i`` steps forward to ``s_{i+1}``, jumps
    back to one of the previous ``back`` states and may terminate in the
    absorbing state ``end``.

    Every state is reachable and all states but ``end`` form one strongly
    connected component, so partial searches give genuinely fractional
    progress values that need a full linear solve.  With ``uniform_back``
    the backward jump target is uniform over all earlier states.  Each
    state gets an edge to ``end`` with probability ``exit_chance``.
    """
    rng = random.Random(seed)
    names = [f"s{i}" for i in range(n_states)]
    states = {s: {a for a in atoms if rng.random() < 0.5} | set(everywhere) for s in names}
    states["end"] = set(everywhere)
    transitions = []
    for i, s in enumerate(names):
        targets = [names[i + 1] if i + 1 < n_states else "end"]
        if i > 0:
            lo = 0 if uniform_back else max(0, i - back)
            j = rng.randrange(lo, i)
            targets.append(names[j])
        if targets[0] != "end" and rng.random() < exit_chance:
            targets.append("end")
        for t, p in zip(targets, _split(rng, len(targets))):
            transitions.append((f"t_{s}_{t}", s, t, p))
    transitions.append(("t_end", "end", "end", 1))
    return Pts.build(set(atoms) | set(everywhere), states, names[0], transitions)
