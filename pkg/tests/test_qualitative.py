import random
from itertools import product

import numpy as np
import pytest

from formula_enum import ALPHABET, all_formulas
from ltlprogress import corpus
from ltlprogress.formula import (
    Until, UpWord, eval_up_word, negate_to_pnf, parse, subformulas,
)
from ltlprogress.pts import SINK, build_minimal_extension, build_top_extension
from ltlprogress.qualitative import (
    counterexample, degeneralize, gnba_of, has_found_violation, lasso_words, nba_of,
    universal_sat, violation_witness,
)
from ltlprogress.sim import Strategy, explore
from ltlprogress.wordbatch import WordBatch

A, B, AB, E = frozenset("a"), frozenset("b"), frozenset("ab"), frozenset()
LOOPS = [v for lv in (1, 2) for v in product(ALPHABET, repeat=lv)]


def test_atom_automaton():
    g = gnba_of(parse("a"))
    assert g.accepts(UpWord((A,), (E,)))
    assert not g.accepts(UpWord((B,), (AB,)))
    assert g.acceptance == ()


def test_eventually_automaton():
    g = gnba_of(parse("F b"))
    assert len(g.acceptance) == 1
    assert g.accepts(UpWord((A, AB), (A,)))
    assert not g.accepts(UpWord((A,), (E,)))


def test_always_automaton():
    g = gnba_of(parse("G a"))
    assert not g.accepts(UpWord((A, E), (A,)))
    assert not g.accepts(UpWord((A,), (A, E)))
    assert g.accepts(UpWord((AB,), (A,)))


def test_one_acceptance_set_per_until():
    f = parse("(a U b) R (F a | X (b U a))")
    g = gnba_of(f)
    assert len(g.acceptance) == len({s for s in subformulas(f) if isinstance(s, Until)})


def test_non_pnf_rejected():
    with pytest.raises(ValueError):
        gnba_of(parse("!(a U b)"))


def test_single_word_check_matches_batch_check():
    words = lasso_words(ALPHABET, 2, LOOPS)
    rng = random.Random(3)
    for f in rng.sample(all_formulas(4, pnf=True), 40):
        g = gnba_of(f)
        batch = g.accepts_all(ALPHABET, 2, LOOPS)
        assert list(batch) == [g.accepts(w) for w in words]


def test_degeneralization_preserves_language():
    words = lasso_words(ALPHABET, 3, LOOPS)
    batch = WordBatch(words)
    for f in all_formulas(4, pnf=True):
        nba = degeneralize(gnba_of(f))
        assert len(nba.acceptance) == 1
        assert np.array_equal(nba.accepts_all(ALPHABET, 3, LOOPS), batch.holds(f))


def test_larger_formulas_sampled():
    words = lasso_words(ALPHABET, 3, LOOPS)
    batch = WordBatch(words)
    rng = random.Random(8)
    formulas = all_formulas(7, pnf=True)
    for f in rng.sample(formulas, 150):
        assert np.array_equal(nba_of(f).accepts_all(ALPHABET, 3, LOOPS), batch.holds(f))


# --------------------------------------------------------- universal checks

def test_universal_sat_examples():
    top, _ = build_top_extension(corpus.triad(), {"t01", "t02"})
    assert universal_sat(top, parse("F b"))
    assert not universal_sat(corpus.half_loop(), parse("G a"))
    assert universal_sat(corpus.triad(), parse("true"))
    assert universal_sat(corpus.triad(), parse("G a"))
    assert universal_sat(corpus.triad(), parse("F b"))
    assert not universal_sat(corpus.triad(), parse("F G b"))


def test_has_found_violation_examples():
    assert has_found_violation(corpus.half_loop(), {"t00"}, parse("G a")) is False
    assert has_found_violation(corpus.triad(), {"t01"}, parse("b")) is True
    assert has_found_violation(corpus.triad(), {"t01", "t02"}, parse("F b")) is False
    assert has_found_violation(corpus.triad(), {"t01", "t13", "t33"}, parse("F b")) is False
    assert has_found_violation(corpus.triad(), {"t01", "t13", "t33"}, parse("F G b")) is True
    with pytest.raises(ValueError):
        has_found_violation(corpus.triad(), {"t01"}, parse("!b"))


def _lasso_word(model, lasso):
    return UpWord(tuple(model.states[s] for s in lasso.prefix),
                  tuple(model.states[s] for s in lasso.cycle))


def _is_path(model, states):
    return all(any(t.target == y for t in model.outgoing(x)) for x, y in zip(states, states[1:]))


def test_witnesses_are_violating_paths():
    rng = random.Random(4)
    formulas = ["G a", "F b", "a U b", "G (a | F b)", "X X b", "b R a", "F G a"]
    for seed in range(30):
        model = corpus.random_pts(rng.randint(2, 7), seed, atoms=("a", "b"))
        search = explore(model, rng.choice(list(Strategy)), rng.randint(0, 8))
        top, _ = build_top_extension(model, search)
        for text in formulas:
            phi = parse(text)
            w = violation_witness(model, search, phi)
            if w is None:
                continue
            states = list(w.prefix) + list(w.cycle) + [w.cycle[0]]
            assert states[0] == model.initial
            assert _is_path(top, states)
            assert not eval_up_word(_lasso_word(top, w), phi)


def _simple_lassos(model, avoid):
    """All lassos that visit each state at most once before closing the cycle."""
    out = []

    def walk(path):
        for t in model.outgoing(path[-1]):
            if t.target in avoid:
                continue
            if t.target in path:
                k = path.index(t.target)
                out.append((tuple(path[:k]), tuple(path[k:])))
            else:
                walk(path + [t.target])

    if model.initial not in avoid:
        walk([model.initial])
    return out


def test_no_violation_means_explored_lassos_satisfy():
    rng = random.Random(5)
    formulas = ["G a", "F b", "a U b", "G (a | F b)", "X b", "b R a", "G F a", "a W b"]
    checked = 0
    for seed in range(40):
        model = corpus.random_pts(rng.randint(2, 7), 100 + seed, atoms=("a", "b"))
        search = explore(model, rng.choice(list(Strategy)), rng.randint(0, 10))
        ext, _ = build_minimal_extension(model, search)
        lassos = _simple_lassos(ext, {SINK})
        for text in formulas:
            phi = parse(text)
            if has_found_violation(model, search, phi):
                continue
            for prefix, cycle in lassos:
                w = UpWord(tuple(ext.states[s] for s in prefix), tuple(ext.states[s] for s in cycle))
                assert eval_up_word(w, phi)
                checked += 1
    assert checked > 50


def test_counterexample_against_lasso_enumeration():
    # on a finite model some violating path, if any exists, is a lasso; for
    # these small models and formulas lassos of six states are enough
    rng = random.Random(6)
    formulas = ["G a", "F b", "a U b", "G (a | F b)", "X b", "b R a", "G F a", "F G b"]
    for seed in range(30):
        model = corpus.random_pts(rng.randint(2, 5), 200 + seed, atoms=("a", "b"))
        lassos = _all_lassos(model, 6)
        for text in formulas:
            phi = parse(text)
            brute = all(eval_up_word(w, phi) for w in lassos)
            assert universal_sat(model, phi) == brute, (text, seed)
            assert (counterexample(model, negate_to_pnf(negate_to_pnf(phi))) is None) == brute


def _all_lassos(model, max_len):
    """Label words of all lassos with at most ``max_len`` states in total."""
    words = set()

    def walk(path):
        if len(path) > max_len:
            return
        for k in range(len(path)):
            if any(t.target == path[k] for t in model.outgoing(path[-1])):
                words.add(UpWord(tuple(model.states[s] for s in path[:k]),
                                 tuple(model.states[s] for s in path[k:])))
        for t in model.outgoing(path[-1]):
            walk(path + [t.target])

    walk([model.initial])
    return words
