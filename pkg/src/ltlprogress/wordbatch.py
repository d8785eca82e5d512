"""Evaluate formulas on many ultimately periodic words at once.

Every word is stored as one int64 per atom: bit ``i`` is set when the atom
holds at position ``i``.  A formula's value on the batch is again one int64
per word holding the set of positions where it is satisfied, so boolean
connectives are bitwise operations and ``X`` is a shift that wraps the last
position back to the loop start.  Words may mix shapes freely (up to 62
positions).
"""
from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .formula import (
    And, Atom, FalseF, Formula, Next, Not, Or, Release, TrueF, Until, UpWord,
    subformulas,
)

__all__ = ["WordBatch"]


class WordBatch:
    def __init__(self, words: Sequence[UpWord]):
        words = list(words)
        self.words = words
        lengths = np.array([len(w) for w in words], dtype=np.int64)
        if len(words) and lengths.max() > 62:
            raise ValueError("words longer than 62 positions are not supported")
        self.length = lengths
        self.loop_start = np.array([len(w.u) for w in words], dtype=np.int64)
        self.full = (np.int64(1) << lengths) - 1
        self._one = np.ones(len(words), dtype=np.int64)
        self._atoms: dict[str, np.ndarray] = {}
        names = set()
        for w in words:
            for i in range(len(w)):
                names |= w.letter(i)
        for name in sorted(names):
            bits = np.zeros(len(words), dtype=np.int64)
            for k, w in enumerate(words):
                m = 0
                for i in range(len(w)):
                    if name in w.letter(i):
                        m |= 1 << i
                bits[k] = m
            self._atoms[name] = bits
        self._max_len = int(lengths.max()) if len(words) else 0

    def __len__(self):
        return len(self.words)

    # position-set algebra -------------------------------------------------

    def true(self) -> np.ndarray:
        return self.full.copy()

    def false(self) -> np.ndarray:
        return np.zeros(len(self.words), dtype=np.int64)

    def atom(self, name: str) -> np.ndarray:
        bits = self._atoms.get(name)
        return self.false() if bits is None else bits.copy()

    def neg(self, x: np.ndarray) -> np.ndarray:
        return ~x & self.full

    def next(self, x: np.ndarray) -> np.ndarray:
        wrap = (x >> self.loop_start) & self._one
        return (x >> 1) | (wrap << (self.length - 1))

    def until(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        val = b
        for _ in range(self._max_len):
            new = b | (a & self.next(val))
            if np.array_equal(new, val):
                break
            val = new
        return val

    def release(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        val = b
        for _ in range(self._max_len):
            new = b & (a | self.next(val))
            if np.array_equal(new, val):
                break
            val = new
        return val

    # whole formulas -------------------------------------------------------

    def positions(self, f: Formula) -> np.ndarray:
        """Bitmask of satisfying positions for every word."""
        table: dict[Formula, np.ndarray] = {}
        for g in subformulas(f):
            if g in table:
                continue
            if isinstance(g, TrueF):
                val = self.true()
            elif isinstance(g, FalseF):
                val = self.false()
            elif isinstance(g, Atom):
                val = self.atom(g.name)
            elif isinstance(g, Not):
                val = self.neg(table[g.arg])
            elif isinstance(g, And):
                val = table[g.left] & table[g.right]
            elif isinstance(g, Or):
                val = table[g.left] | table[g.right]
            elif isinstance(g, Next):
                val = self.next(table[g.arg])
            elif isinstance(g, Until):
                val = self.until(table[g.left], table[g.right])
            else:
                val = self.release(table[g.left], table[g.right])
            table[g] = val
        return table[f]

    @staticmethod
    def at_start(positions: np.ndarray) -> np.ndarray:
        return (positions & 1).astype(bool)

    def holds(self, f: Formula) -> np.ndarray:
        """Boolean array: does word ``k`` satisfy ``f``."""
        return self.at_start(self.positions(f))


def all_words(alphabet: Iterable[frozenset[str]], max_prefix: int, loop_lengths: Iterable[int]):
    """Every ``UpWord`` over ``alphabet`` with ``|u| <= max_prefix`` and ``|v|`` in ``loop_lengths``."""
    from itertools import product

    alphabet = list(alphabet)
    out = []
    for lv in loop_lengths:
        for v in product(alphabet, repeat=lv):
            for lu in range(max_prefix + 1):
                for u in product(alphabet, repeat=lu):
                    out.append(UpWord(u, v))
    return out
