"""Probabilistic transition systems, searches and their extensions."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

__all__ = [
    "Transition", "Pts", "PtsError", "SINK", "SINK_LOOP", "completion_id",
    "validate", "check_search", "trace_prefix", "build_minimal_extension",
    "build_top_extension", "check_extends", "complete_final_states",
]

SINK = "__sink"
SINK_LOOP = "__t_sink"
RESERVED_PREFIX = "__"

_AP_NAME = re.compile(r"[A-Za-z0-9_]+")


class PtsError(ValueError):
    """Raised for malformed searches and execution prefixes."""


def completion_id(state: str) -> str:
    return f"__t_{state}"


@dataclass(frozen=True)
class Transition:
    id: str
    source: str
    target: str
    prob: Fraction


@dataclass(frozen=True, eq=False)
class Pts:
    """A finite labelled probabilistic transition system.

    ``states`` maps each state id to its label set and ``transitions`` maps
    each transition id to its :class:`Transition`.  Both keep insertion
    order, which fixes the order of derived chains and reports.
    Construction does not check well-formedness; see :func:`validate`.
    """

    ap: frozenset[str]
    states: Mapping[str, frozenset[str]]
    initial: str
    transitions: Mapping[str, Transition]
    _out: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "ap", frozenset(self.ap))
        object.__setattr__(self, "states", {s: frozenset(l) for s, l in self.states.items()})
        object.__setattr__(self, "transitions", dict(self.transitions))
        out: dict[str, list[Transition]] = {s: [] for s in self.states}
        for t in self.transitions.values():
            out.setdefault(t.source, []).append(t)
        object.__setattr__(self, "_out", out)

    @classmethod
    def build(cls, ap: Iterable[str], states: Mapping[str, Iterable[str]], initial: str,
              transitions: Iterable[tuple]) -> "Pts":
        """Convenience constructor: ``transitions`` holds ``(id, source, target, prob)`` tuples."""
        ts = {}
        for tid, src, dst, prob in transitions:
            ts[tid] = Transition(tid, src, dst, Fraction(prob))
        return cls(frozenset(ap), {s: frozenset(l) for s, l in states.items()}, initial, ts)

    def outgoing(self, state: str) -> list[Transition]:
        return self._out.get(state, [])

    def label(self, state: str) -> frozenset[str]:
        return self.states[state]

    def __eq__(self, other):
        if not isinstance(other, Pts):
            return NotImplemented
        return (self.ap == other.ap and self.initial == other.initial
                and list(self.states.items()) == list(other.states.items())
                and list(self.transitions.items()) == list(other.transitions.items()))

    __hash__ = None


def validate(model: Pts, *, allow_generated: bool = False) -> list[str]:
    """Return the list of well-formedness violations (empty when the model is valid).

    Ids starting with ``__`` are reserved for generated sinks and completion
    transitions; they are rejected unless ``allow_generated`` is set.
    """
    problems: list[str] = []
    for a in sorted(model.ap):
        if not _AP_NAME.fullmatch(a):
            problems.append(f"atomic proposition {a!r} is not a name over [a-zA-Z0-9_]")
        elif a.startswith(RESERVED_PREFIX):
            problems.append(f"atomic proposition {a!r} uses the reserved prefix '__'")
    if model.initial not in model.states:
        problems.append(f"initial state {model.initial!r} is not a state")
    for s, label in model.states.items():
        if not s:
            problems.append("state with empty id")
        if s.startswith(RESERVED_PREFIX) and not allow_generated:
            problems.append(f"state {s} uses the reserved prefix '__'")
        extra = sorted(label - model.ap)
        if extra:
            problems.append(f"state {s} label {extra} not in the declared propositions")
    mass: dict[str, Fraction] = {s: Fraction(0) for s in model.states}
    for tid, t in model.transitions.items():
        if tid != t.id:
            problems.append(f"transition key {tid} does not match its id {t.id}")
        if tid.startswith(RESERVED_PREFIX) and not allow_generated:
            problems.append(f"transition {tid} uses the reserved prefix '__'")
        if t.source not in model.states:
            problems.append(f"transition {tid} source {t.source!r} is not a state")
        if t.target not in model.states:
            problems.append(f"transition {tid} target {t.target!r} is not a state")
        if not (0 < t.prob <= 1):
            problems.append(f"transition {tid} prob {t.prob} out of (0,1]")
        if t.source in mass:
            mass[t.source] += t.prob
    for s, m in mass.items():
        if m != 1:
            problems.append(f"state {s} outgoing mass {m} ≠ 1")
    return problems


def check_search(model: Pts, search: Iterable[str]) -> frozenset[str]:
    search = frozenset(search)
    unknown = sorted(search - model.transitions.keys())
    if unknown:
        raise PtsError(f"search mentions unknown transitions: {', '.join(unknown)}")
    return search


def trace_prefix(model: Pts, prefix: Sequence[str]) -> tuple[frozenset[str], ...]:
    """Labels visited by the finite execution prefix (``len(prefix) + 1`` of them)."""
    state = model.initial
    trace = [model.label(state)]
    for i, tid in enumerate(prefix):
        t = model.transitions.get(tid)
        if t is None:
            raise PtsError(f"prefix position {i}: unknown transition {tid}")
        if t.source != state:
            raise PtsError(
                f"prefix position {i}: transition {tid} leaves {t.source}, expected {state}")
        state = t.target
        trace.append(model.label(state))
    return tuple(trace)


def _extension(model: Pts, search: Iterable[str], sink_label: frozenset[str]) -> tuple[Pts, str]:
    search = check_search(model, search)
    explored = [t for tid, t in model.transitions.items() if tid in search]
    keep = {model.initial}
    for t in explored:
        keep.add(t.source)
        keep.add(t.target)
    states = {s: l for s, l in model.states.items() if s in keep}
    out = {s: Fraction(0) for s in states}
    for t in explored:
        out[t.source] += t.prob
    transitions = {t.id: t for t in explored}
    for s in states:
        if out[s] < 1:
            tid = completion_id(s)
            transitions[tid] = Transition(tid, s, SINK, 1 - out[s])
    states[SINK] = sink_label
    transitions[SINK_LOOP] = Transition(SINK_LOOP, SINK, SINK, Fraction(1))
    return Pts(model.ap, states, model.initial, transitions), SINK


def build_minimal_extension(model: Pts, search: Iterable[str]) -> tuple[Pts, str]:
    """Explored part of ``model`` plus an unlabelled sink taking all unexplored mass."""
    return _extension(model, search, frozenset())


def build_top_extension(model: Pts, search: Iterable[str]) -> tuple[Pts, str]:
    """Like :func:`build_minimal_extension` but the sink carries every proposition."""
    return _extension(model, search, model.ap)


def check_extends(base: Pts, search: Iterable[str], candidate: Pts) -> bool:
    search = check_search(base, search)
    if validate(candidate, allow_generated=True):
        return False
    if candidate.initial != base.initial:
        return False
    if candidate.states.get(base.initial) != base.label(base.initial):
        return False
    for tid in search:
        t, c = base.transitions[tid], candidate.transitions.get(tid)
        if c is None or (c.source, c.target, c.prob) != (t.source, t.target, t.prob):
            return False
        if candidate.states.get(c.source) != base.label(t.source):
            return False
        if candidate.states.get(c.target) != base.label(t.target):
            return False
    return True


def complete_final_states(model: Pts) -> tuple[Pts, list[str]]:
    """Give every state without outgoing transitions a probability-one self loop.

    Returns the repaired model and the ids of the states that were repaired.
    """
    transitions = dict(model.transitions)
    repaired = []
    for s in model.states:
        if model.outgoing(s):
            continue
        tid = f"{s}_selfloop"
        while tid in transitions:
            tid += "_"
        transitions[tid] = Transition(tid, s, s, Fraction(1))
        repaired.append(s)
    return Pts(model.ap, model.states, model.initial, transitions), repaired
