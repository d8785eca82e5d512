"""Progress measures for partial searches of probabilistic transition systems.

Typical use::

    from ltlprogress import corpus, parse, prog_exact, prog_lower_bound
    model = corpus.triad()
    prog_exact(model, {"t01", "t13", "t33"}, parse("G a"))   # Fraction(1, 4)
"""
__version__ = "0.1.0"

from .formula import (
    Formula, FormulaSyntaxError, UpWord, dominates, eval_up_word, is_pnf, is_positive,
    negate_to_pnf, parse, to_text,
)
from .measure import (
    Chain, ViolationFoundError, chain_of, eliminate_next, eliminate_release,
    eliminate_until, ltl_measure, prog_exact, prog_exact_unchecked, prog_lower_bound,
    until_prob,
)
from .pts import (
    Pts, Transition, build_minimal_extension, build_top_extension, check_extends,
    trace_prefix, validate,
)
from .qualitative import gnba_of, has_found_violation, nba_of, universal_sat
from .sim import Strategy, explore, interval_estimate, progress_curve

__all__ = [
    "Formula", "FormulaSyntaxError", "UpWord", "dominates", "eval_up_word", "is_pnf",
    "is_positive", "negate_to_pnf", "parse", "to_text", "Chain", "ViolationFoundError",
    "chain_of", "eliminate_next", "eliminate_release", "eliminate_until", "ltl_measure",
    "prog_exact", "prog_exact_unchecked", "prog_lower_bound", "until_prob", "Pts",
    "Transition", "build_minimal_extension", "build_top_extension", "check_extends",
    "trace_prefix", "validate", "gnba_of", "has_found_violation", "nba_of",
    "universal_sat", "Strategy", "explore", "interval_estimate", "progress_curve",
]
