"""LTL syntax trees, the text grammar, negation normal form and lasso evaluation.

Surface formulas use ``true``, ``false``, atoms, ``X``, ``F``, ``G``, ``U``,
``R``, ``W``, ``!``, ``&`` and ``|``.  ``F``, ``G`` and ``W`` are expanded at
parse time, so trees only ever contain the nodes defined below.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Union

__all__ = [
    "TrueF", "FalseF", "Atom", "Not", "And", "Or", "Next", "Until", "Release",
    "Formula", "TRUE", "FALSE", "FormulaSyntaxError", "UpWord",
    "parse", "to_text", "is_positive", "is_pnf", "is_propositional",
    "to_pnf", "negate_to_pnf", "atoms", "size", "subformulas",
    "holds_in", "eval_up_word", "dominates", "eventually", "always",
    "weak_until",
]


@dataclass(frozen=True)
class TrueF:
    pass


@dataclass(frozen=True)
class FalseF:
    pass


@dataclass(frozen=True)
class Atom:
    name: str


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Next:
    arg: "Formula"


@dataclass(frozen=True)
class Until:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Release:
    left: "Formula"
    right: "Formula"


Formula = Union[TrueF, FalseF, Atom, Not, And, Or, Next, Until, Release]

TRUE = TrueF()
FALSE = FalseF()

_BINARY = (And, Or, Until, Release)
_TEMPORAL = (Next, Until, Release)


def eventually(f: Formula) -> Formula:
    return Until(TRUE, f)


def always(f: Formula) -> Formula:
    return Release(FALSE, f)


def weak_until(f: Formula, g: Formula) -> Formula:
    return Or(Until(f, g), always(f))


# ---------------------------------------------------------------- parsing

class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, position: int, text: str):
        super().__init__(f"{message} at position {position}: {text!r}")
        self.position = position
        self.text = text


_TOKEN = re.compile(r"\s*(?:(?P<word>[A-Za-z0-9_]+)|(?P<sym>[!&|()]))")
_UNARY_KW = {"X", "F", "G"}
_BINARY_KW = {"U", "R", "W"}


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            bad = len(text) - len(text[pos:].lstrip())
            raise FormulaSyntaxError(f"unknown token {text[bad]!r}", bad, text)
        tok = m.group("word") or m.group("sym")
        tokens.append((tok, m.start(m.lastindex)))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i][0] if self.i < len(self.tokens) else None

    def where(self):
        return self.tokens[self.i][1] if self.i < len(self.tokens) else len(self.text)

    def take(self):
        tok = self.tokens[self.i][0]
        self.i += 1
        return tok

    def fail(self, message):
        raise FormulaSyntaxError(message, self.where(), self.text)

    def parse(self) -> Formula:
        if not self.tokens:
            self.fail("empty formula")
        f = self.disjunction()
        if self.peek() is not None:
            self.fail(f"unexpected {self.peek()!r}")
        return f

    def disjunction(self):
        f = self.conjunction()
        while self.peek() == "|":
            self.take()
            f = Or(f, self.conjunction())
        return f

    def conjunction(self):
        f = self.binary_temporal()
        while self.peek() == "&":
            self.take()
            f = And(f, self.binary_temporal())
        return f

    def binary_temporal(self):
        left = self.unary()
        op = self.peek()
        if op in _BINARY_KW:
            self.take()
            right = self.binary_temporal()
            if op == "U":
                return Until(left, right)
            if op == "R":
                return Release(left, right)
            return weak_until(left, right)
        return left

    def unary(self):
        tok = self.peek()
        if tok in _UNARY_KW or tok == "!":
            self.take()
            arg = self.unary()
            if tok == "X":
                return Next(arg)
            if tok == "F":
                return eventually(arg)
            if tok == "G":
                return always(arg)
            return Not(arg)
        return self.primary()

    def primary(self):
        tok = self.peek()
        if tok is None:
            self.fail("unexpected end of formula")
        if tok == "(":
            self.take()
            f = self.disjunction()
            if self.peek() != ")":
                self.fail("expected ')'")
            self.take()
            return f
        if tok in ("true", "false"):
            self.take()
            return TRUE if tok == "true" else FALSE
        if tok in _BINARY_KW or not re.fullmatch(r"[A-Za-z0-9_]+", tok):
            self.fail(f"unexpected {tok!r}")
        self.take()
        return Atom(tok)


def parse(text: str) -> Formula:
    """Parse formula text.

    Precedence from tightest to loosest: ``X F G !``, then the
    right-associative ``U R W``, then ``&``, then ``|``.

    >>> parse("G a")
    Release(left=FalseF(), right=Atom(name='a'))
    """
    return _Parser(text).parse()


_PREC = {Or: 1, And: 2, Until: 3, Release: 3, Next: 4, Not: 4}


def _prec(f: Formula) -> int:
    if (isinstance(f, Until) and f.left == TRUE) or (isinstance(f, Release) and f.left == FALSE):
        return 4
    return _PREC.get(type(f), 5)


def to_text(f: Formula) -> str:
    """Print ``f`` in the parser's grammar with minimal parentheses."""
    if isinstance(f, TrueF):
        return "true"
    if isinstance(f, FalseF):
        return "false"
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Until) and f.left == TRUE:
        return "F " + _wrap(f.right, 4)
    if isinstance(f, Release) and f.left == FALSE:
        return "G " + _wrap(f.right, 4)
    if isinstance(f, Not):
        return "!" + _wrap(f.arg, 4)
    if isinstance(f, Next):
        return "X " + _wrap(f.arg, 4)
    if isinstance(f, (Until, Release)):
        op = "U" if isinstance(f, Until) else "R"
        return f"{_wrap(f.left, 4)} {op} {_wrap(f.right, 3)}"
    op = "&" if isinstance(f, And) else "|"
    p = _prec(f)
    return f"{_wrap(f.left, p)} {op} {_wrap(f.right, p + 1)}"


def _wrap(f: Formula, min_prec: int) -> str:
    s = to_text(f)
    return s if _prec(f) >= min_prec else f"({s})"


# ------------------------------------------------------------ structure

def subformulas(f: Formula) -> Iterator[Formula]:
    """Post-order, left to right."""
    if isinstance(f, _BINARY):
        yield from subformulas(f.left)
        yield from subformulas(f.right)
    elif isinstance(f, (Not, Next)):
        yield from subformulas(f.arg)
    yield f


def size(f: Formula) -> int:
    return sum(1 for _ in subformulas(f))


def atoms(f: Formula) -> frozenset[str]:
    return frozenset(g.name for g in subformulas(f) if isinstance(g, Atom))


def is_positive(f: Formula) -> bool:
    return not any(isinstance(g, Not) for g in subformulas(f))


def is_pnf(f: Formula) -> bool:
    return all(isinstance(g.arg, Atom) for g in subformulas(f) if isinstance(g, Not))


def is_propositional(f: Formula) -> bool:
    return not any(isinstance(g, _TEMPORAL) for g in subformulas(f))


def to_pnf(f: Formula) -> Formula:
    """Equivalent formula with negation only directly above atoms."""
    return _push(f, False)


def negate_to_pnf(f: Formula) -> Formula:
    return _push(f, True)


def _push(f: Formula, neg: bool) -> Formula:
    if isinstance(f, Not):
        return _push(f.arg, not neg)
    if isinstance(f, TrueF):
        return FALSE if neg else TRUE
    if isinstance(f, FalseF):
        return TRUE if neg else FALSE
    if isinstance(f, Atom):
        return Not(f) if neg else f
    if isinstance(f, Next):
        return Next(_push(f.arg, neg))
    left, right = _push(f.left, neg), _push(f.right, neg)
    if not neg:
        return type(f)(left, right)
    dual = {And: Or, Or: And, Until: Release, Release: Until}[type(f)]
    return dual(left, right)


# ----------------------------------------------------------- semantics

def holds_in(f: Formula, label: frozenset[str]) -> bool:
    """Evaluate a propositional formula on one label set."""
    if isinstance(f, TrueF):
        return True
    if isinstance(f, FalseF):
        return False
    if isinstance(f, Atom):
        return f.name in label
    if isinstance(f, Not):
        return not holds_in(f.arg, label)
    if isinstance(f, And):
        return holds_in(f.left, label) and holds_in(f.right, label)
    if isinstance(f, Or):
        return holds_in(f.left, label) or holds_in(f.right, label)
    raise ValueError(f"not propositional: {to_text(f)}")


@dataclass(frozen=True)
class UpWord:
    """The ultimately periodic word ``u v v v ...``."""

    u: tuple[frozenset[str], ...]
    v: tuple[frozenset[str], ...]

    def __post_init__(self):
        if not self.v:
            raise ValueError("loop part of an ultimately periodic word must be nonempty")
        object.__setattr__(self, "u", tuple(frozenset(x) for x in self.u))
        object.__setattr__(self, "v", tuple(frozenset(x) for x in self.v))

    def __len__(self):
        return len(self.u) + len(self.v)

    def letter(self, i: int) -> frozenset[str]:
        return self.u[i] if i < len(self.u) else self.v[i - len(self.u)]

    def next_position(self, i: int) -> int:
        return i + 1 if i + 1 < len(self) else len(self.u)


def eval_up_word(w: UpWord, f: Formula) -> bool:
    """Decide ``u v^omega |= f``.

    Truth values are tabulated per (position, subformula) over the positions
    ``0 .. |u|+|v|-1``; successors of the last position wrap to ``|u|``.
    """
    n = len(w)
    nxt = [w.next_position(i) for i in range(n)]
    letters = [w.letter(i) for i in range(n)]
    table: dict[Formula, list[bool]] = {}
    for g in subformulas(f):
        if g in table:
            continue
        if isinstance(g, TrueF):
            val = [True] * n
        elif isinstance(g, FalseF):
            val = [False] * n
        elif isinstance(g, Atom):
            val = [g.name in letters[i] for i in range(n)]
        elif isinstance(g, Not):
            val = [not x for x in table[g.arg]]
        elif isinstance(g, And):
            a, b = table[g.left], table[g.right]
            val = [a[i] and b[i] for i in range(n)]
        elif isinstance(g, Or):
            a, b = table[g.left], table[g.right]
            val = [a[i] or b[i] for i in range(n)]
        elif isinstance(g, Next):
            a = table[g.arg]
            val = [a[nxt[i]] for i in range(n)]
        else:
            a, b = table[g.left], table[g.right]
            until = isinstance(g, Until)
            # least fixpoint for U, greatest for R; the first backward pass
            # settles position |u|, the second propagates it around the loop
            val = [not until] * n
            for _ in range(2):
                for i in range(n - 1, -1, -1):
                    if until:
                        val[i] = b[i] or (a[i] and val[nxt[i]])
                    else:
                        val[i] = b[i] and (a[i] or val[nxt[i]])
        table[g] = val
    return table[f][0]


def dominates(w1: UpWord, w2: UpWord) -> bool:
    """True iff every letter of ``w1`` is a subset of the matching letter of ``w2``."""
    if len(w1.u) != len(w2.u) or len(w1.v) != len(w2.v):
        raise ValueError("words have different shapes")
    return all(w1.letter(i) <= w2.letter(i) for i in range(len(w1)))
