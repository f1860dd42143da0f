"""Finite approximations of negative stars.

A negative ``A^*`` is replaced by ``1 \\/ A \\/ ... \\/ A^n``; positive stars
stay.  A sequent is derivable in the omega calculus iff all of its
approximations are, so one underivable approximation refutes it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .formula import Binary, Formula, Imp, Sequent, Star, big_vee, power
from .search import Prover, decide_bool

__all__ = ["neg_approx", "pos_approx", "approximate_sequent", "refute",
           "Refuted", "AllDerivableUpTo", "ApproxResult"]


def _approx(f: Formula, n: int, negative: bool, memo: dict) -> Formula:
    key = (f, negative)
    hit = memo.get(key)
    if hit is not None:
        return hit
    if isinstance(f, Star):
        body = _approx(f.body, n, negative, memo)
        out = big_vee(power(body, i) for i in range(n + 1)) if negative else Star(body)
    elif isinstance(f, Imp):
        out = Imp(_approx(f.lhs, n, not negative, memo), _approx(f.rhs, n, negative, memo))
    elif isinstance(f, Binary):
        out = type(f)(_approx(f.lhs, n, negative, memo), _approx(f.rhs, n, negative, memo))
    else:
        out = f
    memo[key] = out
    return out


def neg_approx(f: Formula, n: int) -> Formula:
    if n < 0:
        raise ValueError("n must be non-negative")
    return _approx(f, n, True, {})


def pos_approx(f: Formula, n: int) -> Formula:
    if n < 0:
        raise ValueError("n must be non-negative")
    return _approx(f, n, False, {})


def approximate_sequent(s: Sequent, n: int) -> Sequent:
    if n < 0:
        raise ValueError("n must be non-negative")
    memo: dict = {}
    return Sequent([_approx(f, n, True, memo) for f in s.antecedent],
                   _approx(s.succedent, n, False, memo))


@dataclass(frozen=True)
class Refuted:
    witness_n: int
    refuting_sequent: Sequent


@dataclass(frozen=True)
class AllDerivableUpTo:
    max_n: int


ApproxResult = Union[Refuted, AllDerivableUpTo]


def refute(s: Sequent, max_n: int, prover: Optional[Prover] = None) -> ApproxResult:
    """Least n <= max_n whose approximation is not derivable, if any."""
    prover = prover or Prover(emit_proof=False)
    for n in range(max_n + 1):
        approx = approximate_sequent(s, n)
        if not decide_bool(approx, prover):
            return Refuted(n, approx)
    return AllDerivableUpTo(max_n)
