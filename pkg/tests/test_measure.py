import random
from fractions import Fraction

import pytest
from gmpy2 import mpq

from ltlprogress import corpus
from ltlprogress.formula import (
    FALSE, TRUE, And, Atom, Next, Not, Or, Release, Until, always, eventually, parse,
)
from ltlprogress.linsolve import constrained_reachability, solve_sparse
from ltlprogress.measure import (
    Chain, ChainError, NonPositiveFormulaError, ViolationFoundError, chain_of,
    eliminate_next, eliminate_release, eliminate_until, ltl_measure, prog_exact,
    prog_exact_unchecked, prog_lower_bound, until_prob,
)
from ltlprogress.pts import Pts, build_minimal_extension
from ltlprogress.qualitative import has_found_violation
from ltlprogress.sim import Strategy, explore

from test_acceptance import _random_predicate

H = Fraction(1, 2)
a, b = Atom("a"), Atom("b")


def st_chain(model, search):
    ext, _ = build_minimal_extension(model, search)
    return chain_of(ext)


def init_mass(chain, atom):
    return sum((m for m, l in zip(chain.init, chain.labels) if atom in l), Fraction(0))


# ----------------------------------------------------------------- chains

def test_chain_of_triad():
    chain = chain_of(corpus.triad())
    assert len(chain) == 4
    assert chain.row_dict(chain.index("s0")) == {1: H, 2: H}
    assert chain.init == (1, 0, 0, 0)


def test_chain_of_minimal_extension():
    chain = st_chain(corpus.triad(), {"t01"})
    s0, s1, sink = (chain.index(x) for x in ("s0", "s1", "__sink"))
    assert chain.row_dict(s0) == {s1: H, sink: H}
    assert chain.row_dict(s1) == {sink: 1}
    assert chain.row_dict(sink) == {sink: 1}


def test_parallel_edges_merge():
    model = Pts.build({"a"}, {"s": set(), "u": set()}, "s", [
        ("x", "s", "u", Fraction(1, 4)), ("y", "s", "u", Fraction(1, 4)),
        ("z", "s", "s", H), ("w", "u", "u", 1)])
    assert chain_of(model).row_dict(0) == {1: H, 0: H}


def test_chain_checks_stochasticity():
    with pytest.raises(ChainError, match="row sums to 1/2"):
        Chain(("x",), (frozenset(),), (((0, H),),), (Fraction(1),))
    with pytest.raises(ChainError, match="initial"):
        Chain(("x",), (frozenset(),), (((0, Fraction(1)),),), (H,))


# ------------------------------------------------------------ reachability

def test_until_prob_examples():
    chain = st_chain(corpus.triad(), {"t01", "t10", "t13", "t33"})
    labels_sink = [name == "__sink" for name in chain.names]
    q = constrained_reachability(chain.rows, labels_sink, [True] * len(chain))
    assert q[chain.index("s0")] == Fraction(2, 3)
    assert until_prob(chain, TRUE, Atom("zzz")) == [0] * len(chain)
    assert until_prob(chain, a, TRUE) == [1] * len(chain)
    full = chain_of(corpus.triad())
    assert until_prob(full, FALSE, b) == [0, 1, 1, 0]


def test_solve_sparse_small_system():
    m = {0: {0: mpq(2), 1: mpq(1)}, 1: {0: mpq(1), 1: mpq(3)}}
    x = solve_sparse(m, {0: mpq(3), 1: mpq(5)})
    assert x == {0: mpq(4, 5), 1: mpq(7, 5)}


def test_reachability_agrees_with_dense_solver():
    from test_acceptance import _dense_reach
    for seed in range(60):
        chain = corpus.random_chain(500 + seed)
        target = [("a" in l) for l in chain.labels]
        assert constrained_reachability(chain.rows, target, [True] * len(chain)) == \
            _dense_reach(chain, target)


# ------------------------------------------------------------- elimination

def test_eliminate_next_deterministic():
    chain = chain_of(corpus.straight_line())
    out = eliminate_next(chain, a, "p")
    first = out.init.index(1)
    assert out.names[first] == ("s0", "s1")
    assert "p" in out.labels[first]


def test_eliminate_next_on_search():
    chain = st_chain(corpus.triad(), {"t01"})
    out = eliminate_next(chain, b, "p")
    by_name = dict(zip(out.names, zip(out.init, out.labels)))
    assert by_name[("s0", "s1")] == (H, frozenset({"a", "p"}))
    assert by_name[("s0", "__sink")] == (H, frozenset({"a"}))


def test_eliminate_next_self_loop():
    chain = Chain(("x",), (frozenset("a"),), (((0, Fraction(1)),),), (Fraction(1),))
    out = eliminate_next(chain, a, "p")
    assert len(out) == 1 and out.labels[0] == {"a", "p"}


def test_eliminate_until_trivial_and_table():
    chain = chain_of(corpus.triad())
    out = eliminate_until(chain, a, TRUE, "p")
    assert len(out) == len(chain) and all("p" in l for l in out.labels)
    assert init_mass(eliminate_until(st_chain(corpus.triad(), {"t01"}), TRUE, b, "p"), "p") == H
    assert init_mass(eliminate_until(st_chain(corpus.triad(), {"t01", "t02"}), TRUE, b, "p"), "p") == 1


def test_eliminate_release_examples():
    chain = chain_of(corpus.triad())
    assert all("p" in l for l in eliminate_release(chain, a, TRUE, "p").labels)
    for search, want in [({"t01", "t13", "t33"}, Fraction(1, 4)),
                         ({"t01", "t10", "t13", "t33"}, Fraction(1, 3))]:
        out = eliminate_release(st_chain(corpus.triad(), search), FALSE, a, "p")
        assert init_mass(out, "p") == want


def test_fresh_atom_must_be_fresh():
    chain = chain_of(corpus.triad())
    with pytest.raises(ChainError, match="already labels"):
        eliminate_next(chain, a, "b")


def _events(rng):
    atoms = ["a", "b", "c"]
    p = _random_predicate
    return [p(rng, atoms), Next(p(rng, atoms)), Next(Next(p(rng, atoms))),
            And(p(rng, atoms), Next(p(rng, atoms)))]


def test_projection_preserves_measures():
    rng = random.Random(21)
    for seed in range(40):
        chain = corpus.random_chain(seed)
        x1, x2 = _random_predicate(rng, ["a", "b", "c"]), _random_predicate(rng, ["a", "b", "c"])
        refined = [eliminate_next(chain, x1, "__q"), eliminate_until(chain, x1, x2, "__q"),
                   eliminate_release(chain, x1, x2, "__q")]
        for ev in _events(rng):
            before = ltl_measure(chain, ev)
            for r in refined:
                assert ltl_measure(r, ev) == before


def test_fresh_atom_marks_subformula():
    # the new atom's initial mass is the measure of the eliminated formula,
    # computed here through a different route
    rng = random.Random(22)
    for seed in range(40):
        chain = corpus.random_chain(100 + seed)
        x1, x2 = _random_predicate(rng, ["a", "b"]), _random_predicate(rng, ["a", "b"])
        u = init_mass(eliminate_until(chain, x1, x2, "__q"), "__q")
        r = init_mass(eliminate_release(chain, x1, x2, "__q"), "__q")
        q = until_prob(chain, x1, x2)
        assert u == sum((m * v for m, v in zip(chain.init, q)), Fraction(0))
        dual = until_prob(chain, Not(x1), Not(x2))
        assert r == 1 - sum((m * v for m, v in zip(chain.init, dual)), Fraction(0))


# ------------------------------------------------------------ ltl_measure

def test_ltl_measure_examples():
    triad = corpus.triad()
    assert ltl_measure(chain_of(triad), parse("F a")) == 1
    assert ltl_measure(st_chain(triad, {"t01", "t02"}), parse("X b")) == 1
    assert ltl_measure(st_chain(triad, set()), parse("F b")) == 0
    assert ltl_measure(chain_of(triad), parse("G F b")) == Fraction(2, 3)


def test_ltl_measure_rejects_non_pnf():
    with pytest.raises(ValueError, match="positive normal form"):
        ltl_measure(chain_of(corpus.triad()), Not(parse("F a")))


def test_ltl_measure_nested_against_enumeration():
    # straight line with a branching start: every path is a lasso
    model = Pts.build({"a", "b"}, {"s0": set(), "s1": {"a"}, "s2": {"b"}, "s3": {"a", "b"}}, "s0", [
        ("t1", "s0", "s1", Fraction(1, 3)), ("t2", "s0", "s2", Fraction(2, 3)),
        ("t3", "s1", "s3", 1), ("t4", "s2", "s2", 1), ("t5", "s3", "s3", 1)])
    chain = chain_of(model)
    assert ltl_measure(chain, parse("X (a U b)")) == 1
    assert ltl_measure(chain, parse("X X (a & b)")) == Fraction(1, 3)
    assert ltl_measure(chain, parse("F (a & X b)")) == Fraction(1, 3)
    assert ltl_measure(chain, parse("G (!a | F b)")) == 1
    assert ltl_measure(chain, parse("(X !a) R (X b | !b)")) == 1
    assert ltl_measure(chain, parse("b R (X a | b)")) == Fraction(1, 3)


# --------------------------------------------------------------- progress

def test_prog_exact_examples():
    triad = corpus.triad()
    assert prog_exact(triad, {"t01", "t13", "t33"}, parse("G a")) == Fraction(1, 4)
    assert prog_exact(triad, {"t01"}, parse("F b")) == H
    assert prog_exact(triad, {"t02"}, parse("F b")) == H
    assert prog_exact(corpus.half_loop(), {"t00"}, parse("G a")) == 0
    assert prog_exact(corpus.straight_line(), {"t01"}, parse("X a")) == 1


def test_prog_exact_errors():
    triad = corpus.triad()
    with pytest.raises(NonPositiveFormulaError):
        prog_exact(triad, {"t01"}, parse("!a"))
    with pytest.raises(ViolationFoundError) as info:
        prog_exact(triad, {"t01"}, parse("b"))
    assert info.value.witness.prefix[:1] == ("s0",) or info.value.witness.cycle[:1] == ("s0",)
    # the unchecked variant returns the diagnostic value
    assert prog_exact_unchecked(triad, {"t01"}, parse("b")) == 0


def test_lower_bound_examples():
    triad = corpus.triad()
    assert prog_lower_bound(triad, {"t01", "t10", "t13", "t33"}) == Fraction(1, 3)
    assert prog_lower_bound(triad, set()) == 0
    assert prog_lower_bound(corpus.straight_line(), {"t01"}) == 0


CORPUS_FORMULAS = ["G a", "F a", "F b", "X b", "a U b", "G (a | b)", "F (a & X b)",
                   "a R (a | b)", "G F b", "true", "X (a U X b)"]


def _corpus():
    models = [corpus.triad(), corpus.half_loop(), corpus.straight_line(), corpus.diamond()]
    models += [corpus.random_pts(n, seed, atoms=("a", "b")) for seed, n in enumerate([3, 4, 5, 6, 7, 8])]
    for model in models:
        for strategy in Strategy:
            for budget in range(len(model.transitions) + 1):
                yield model, strategy, budget


def test_bound_below_exact_below_full_measure():
    seen = 0
    for model, strategy, budget in _corpus():
        search = explore(model, strategy, budget)
        bound = prog_lower_bound(model, search)
        full = chain_of(model)
        for text in CORPUS_FORMULAS:
            phi = parse(text)
            if has_found_violation(model, search, phi):
                continue
            exact = prog_exact_unchecked(model, search, phi)
            assert bound <= exact, (text, sorted(search))
            assert exact <= ltl_measure(full, phi), (text, sorted(search))
            if text in ("G a", "G (a | b)"):
                assert bound == exact, (text, sorted(search))
            seen += 1
    assert seen > 500


def test_lower_bound_monotone_in_nested_searches():
    for model, strategy, budget in _corpus():
        if budget == 0:
            continue
        smaller = explore(model, strategy, budget - 1)
        larger = explore(model, strategy, budget)
        assert smaller <= larger
        assert prog_lower_bound(model, smaller) <= prog_lower_bound(model, larger)
