"""Cut-free backward proof search for sequents without negative stars.

Without negative stars the infinitary *L rule never applies, and every other
rule strictly lowers the rank of the sequent, so exhaustive memoized search
terminates.  The search saturates the invertible rules (0L, 1L, .L, \\/L, -oR,
/\\R) first and then branches over the remaining choices.
"""

from __future__ import annotations

import sys
import time
from collections import Counter
from dataclasses import dataclass, field
from itertools import product
from typing import Optional, Union

from .formula import (ONE, ZERO, Dot, Formula, Imp, One, Sequent, Star, Var,
                      Vee, Wedge, compare_rank, rank)
from .proof import Derivation, Inference

__all__ = ["decide", "decide_bool", "Prover", "SearchStats", "Derivable",
           "NotDerivable", "Refused", "SearchOutcome", "BudgetExceeded"]


class BudgetExceeded(RuntimeError):
    """Raised when a Prover with a deadline runs out of time."""


@dataclass
class SearchStats:
    nodes_expanded: int = 0
    memo_hits: int = 0
    max_depth: int = 0
    elapsed: float = 0.0


@dataclass
class Derivable:
    proof: Optional[Derivation]
    stats: SearchStats


@dataclass
class NotDerivable:
    stats: SearchStats


@dataclass
class Refused:
    reason: str = "negative-star-present"


SearchOutcome = Union[Derivable, NotDerivable, Refused]

_IN_PROGRESS = object()
_MISSING = object()
_TRUE = True


def _sub_multisets(items: list[tuple[Formula, int]]):
    """Yield (chosen, rest) pairs of formula lists over all sub-multisets."""
    for counts in product(*(range(n + 1) for _, n in items)):
        chosen, rest = [], []
        for (f, n), k in zip(items, counts):
            chosen.extend([f] * k)
            rest.extend([f] * (n - k))
        yield chosen, rest


def _text(f: Formula) -> str:
    return f.text


def _minus(avail: tuple, left: tuple) -> list:
    """Multiset difference of two sorted tuples."""
    out = []
    j = 0
    for f in avail:
        if j < len(left) and left[j] is f:
            j += 1
        else:
            out.append(f)
    return out


def _grouped(formulas) -> list[tuple[Formula, int]]:
    return list(Counter(formulas).items())


class Prover:
    """Memoized prover.  Reusing one instance shares the memo table between
    queries, which pays off for families of related sequents."""

    def __init__(self, emit_proof: bool = True, debug: bool = False,
                 deadline: Optional[float] = None, strategy: str = "focused"):
        if strategy not in ("focused", "plain"):
            raise ValueError(f"unknown strategy {strategy!r}")
        self.focused = strategy == "focused"
        self.rmemo: dict = {}
        self.lmemo: dict = {}
        self.emit = emit_proof
        self.debug = debug
        self.deadline = deadline
        self.memo: dict = {}
        self.star_memo: dict = {}
        self.stats = SearchStats()
        self._depth = 0

    # node construction; in boolean mode proofs collapse to True
    def _node(self, rule, seq, *prems):
        if self.debug and prems and self.emit:
            r = rank(seq)
            for p in prems:
                assert compare_rank(rank(p.conclusion), r) == "less", (rule, seq)
        if not self.emit:
            return _TRUE
        return Inference(rule, seq, tuple(prems))

    def prove(self, seq: Sequent):
        if seq.has_negative_star():
            raise ValueError("sequent has a negative star occurrence")
        old = sys.getrecursionlimit()
        sys.setrecursionlimit(max(old, 100_000))
        t0 = time.perf_counter()
        try:
            return self._solve(seq)
        finally:
            self.stats.elapsed += time.perf_counter() - t0
            sys.setrecursionlimit(old)

    def _solve(self, seq: Sequent):
        r = self.memo.get(seq, _MISSING)
        if r is not _MISSING:
            assert r is not _IN_PROGRESS, f"search revisited {seq} (rank did not decrease)"
            self.stats.memo_hits += 1
            return r
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise BudgetExceeded()
        self.memo[seq] = _IN_PROGRESS
        self.stats.nodes_expanded += 1
        self._depth += 1
        if self._depth > self.stats.max_depth:
            self.stats.max_depth = self._depth
        try:
            res = self._expand(seq)
        except BaseException:
            del self.memo[seq]
            raise
        finally:
            self._depth -= 1
        self.memo[seq] = res
        return res

    def _expand(self, seq: Sequent):
        ante, C = seq.antecedent, seq.succedent
        if len(ante) == 1 and ante[0] is C:
            return self._node("Id", seq)
        if ZERO in ante:
            return self._node("ZeroL", seq)
        if not self._relevant(ante, C):
            return None

        # invertible left rules
        for i, f in enumerate(ante):
            if isinstance(f, One):
                rest = ante[:i] + ante[i + 1:]
                p = self._solve(Sequent(rest, C))
                return p and self._node("OneL", seq, p)
            if isinstance(f, Dot):
                rest = ante[:i] + ante[i + 1:] + (f.lhs, f.rhs)
                p = self._solve(Sequent(rest, C))
                return p and self._node("DotL", seq, p)
            if isinstance(f, Vee):
                rest = ante[:i] + ante[i + 1:]
                p1 = self._solve(Sequent(rest + (f.lhs,), C))
                if not p1:
                    return None
                p2 = self._solve(Sequent(rest + (f.rhs,), C))
                return p2 and self._node("VeeL", seq, p1, p2)
        # invertible right rules
        if isinstance(C, Imp):
            p = self._solve(Sequent(ante + (C.lhs,), C.rhs))
            return p and self._node("ImpR", seq, p)
        if isinstance(C, Wedge):
            p1 = self._solve(Sequent(ante, C.lhs))
            if not p1:
                return None
            p2 = self._solve(Sequent(ante, C.rhs))
            return p2 and self._node("WedgeR", seq, p1, p2)

        if self.focused:
            return self._stable(seq)

        # right rules
        if C is ONE and not ante:
            return self._node("OneR", seq)
        if isinstance(C, Star):
            if not ante:
                return self._node("StarRN", seq)
            parts = self._star_parts(C.body, ante)
            if parts is not None:
                return self._node("StarRN", seq, *parts)
        elif isinstance(C, Vee):
            p = self._solve(Sequent(ante, C.lhs))
            if p:
                return self._node("VeeR1", seq, p)
            p = self._solve(Sequent(ante, C.rhs))
            if p:
                return self._node("VeeR2", seq, p)
        elif isinstance(C, Dot):
            for chosen, rest in _sub_multisets(_grouped(ante)):
                p1 = self._solve(Sequent(chosen, C.lhs))
                if not p1:
                    continue
                p2 = self._solve(Sequent(rest, C.rhs))
                if p2:
                    return self._node("DotR", seq, p1, p2)

        # non-invertible left rules
        seen = set()
        for i, f in enumerate(ante):
            if f in seen:
                continue
            seen.add(f)
            rest = ante[:i] + ante[i + 1:]
            if isinstance(f, Wedge):
                p = self._solve(Sequent(rest + (f.lhs,), C))
                if p:
                    return self._node("WedgeL1", seq, p)
                p = self._solve(Sequent(rest + (f.rhs,), C))
                if p:
                    return self._node("WedgeL2", seq, p)
            elif isinstance(f, Imp):
                for chosen, other in _sub_multisets(_grouped(rest)):
                    p1 = self._solve(Sequent(chosen, f.lhs))
                    if not p1:
                        continue
                    p2 = self._solve(Sequent(other + [f.rhs], C))
                    if p2:
                        return self._node("ImpL", seq, p1, p2)
        return None

    # -- focused phase ------------------------------------------------------
    #
    # Once no invertible rule applies, a focused proof picks one formula and
    # keeps decomposing it while it stays synchronous: the succedent through
    # ., \/, 1, atoms and stars, or an antecedent -o or /\ down to its target.
    # Right focus is computed as a map from leftover antecedents to proofs,
    # so the splits of .R, -oL and *R_n follow from the formula instead of
    # being enumerated.

    def _stable(self, seq: Sequent):
        ante, C = seq.antecedent, seq.succedent
        res = self._rfocus(C, ante)
        if () in res:
            return res[()]
        seen = set()
        for i, f in enumerate(ante):
            if isinstance(f, (Imp, Wedge)) and f not in seen:
                seen.add(f)
                p = self._lfocus(f, ante[:i] + ante[i + 1:], C)
                if p:
                    return p
        return None

    def _rfocus(self, A: Formula, avail: tuple) -> dict:
        """Map each leftover L to a proof of ``avail - L |- A`` focused on A."""
        key = (A, avail)
        hit = self.rmemo.get(key)
        if hit is not None:
            return hit
        out: dict = {}
        if isinstance(A, Var):
            if A in avail:
                i = avail.index(A)
                out[avail[:i] + avail[i + 1:]] = self._node("Id", Sequent([A], A))
        elif A is ONE:
            out[avail] = self._node("OneR", Sequent((), A))
        elif isinstance(A, Dot):
            for l1, p1 in self._rfocus(A.lhs, avail).items():
                for l2, p2 in self._rfocus(A.rhs, l1).items():
                    if l2 not in out:
                        out[l2] = self._node("DotR", Sequent(_minus(avail, l2), A), p1, p2)
        elif isinstance(A, Vee):
            for rule, side in (("VeeR1", A.lhs), ("VeeR2", A.rhs)):
                for l, p in self._rfocus(side, avail).items():
                    if l not in out:
                        out[l] = self._node(rule, Sequent(_minus(avail, l), A), p)
        elif isinstance(A, Star):
            parts = {avail: []}
            stack = [avail]
            while stack:
                l = stack.pop()
                for l2, p in self._rfocus(A.body, l).items():
                    if len(l2) < len(l) and l2 not in parts:
                        parts[l2] = parts[l] + [p]
                        stack.append(l2)
            for l, ps in parts.items():
                out[l] = self._node("StarRN", Sequent(_minus(avail, l), A), *ps)
        elif isinstance(A, (Imp, Wedge)):
            # negative formula: drop focus and prove it from a sub-multiset
            for chosen, rest in _sub_multisets(_grouped(avail)):
                p = self._solve(Sequent(chosen, A))
                if p:
                    out.setdefault(tuple(sorted(rest, key=_text)), p)
        # 0 has no right rule
        self.rmemo[key] = out
        return out

    def _lfocus(self, N: Formula, ctx: tuple, C: Formula):
        """Proof of ``ctx, N |- C`` focused on the negative formula N."""
        key = (N, ctx, C)
        hit = self.lmemo.get(key, _MISSING)
        if hit is not _MISSING:
            return hit
        self.lmemo[key] = None
        seq = Sequent(ctx + (N,), C)
        res = None
        if isinstance(N, Imp):
            for left, p1 in self._rfocus(N.lhs, ctx).items():
                p2 = self._lblur(N.rhs, left, C)
                if p2:
                    res = self._node("ImpL", seq, p1, p2)
                    break
        else:
            for rule, side in (("WedgeL1", N.lhs), ("WedgeL2", N.rhs)):
                p = self._lblur(side, ctx, C)
                if p:
                    res = self._node(rule, seq, p)
                    break
        self.lmemo[key] = res
        return res

    def _lblur(self, F: Formula, ctx: tuple, C: Formula):
        if isinstance(F, (Imp, Wedge)):
            return self._lfocus(F, ctx, C)
        return self._solve(Sequent(ctx + (F,), C))

    @staticmethod
    def _relevant(ante, C) -> bool:
        """Cheap necessary conditions for cut-free provability.

        An atomic succedent must be matched by an antecedent atom of the same
        polarity (or a 0 must be reachable), and every bare atom on the left
        must be consumed by an axiom, so it needs a positive occurrence
        somewhere.
        """
        neg = set(C.atoms_flip)
        for f in ante:
            neg |= f.atoms_same
        if "0" in neg:
            return True
        if isinstance(C, Var) and C.name not in neg:
            return False
        bare = [f.name for f in ante if isinstance(f, Var)]
        if bare:
            pos = set(C.atoms_same)
            for f in ante:
                pos |= f.atoms_flip
            if any(b not in pos for b in bare):
                return False
        return True

    def _star_parts(self, body: Formula, ante: tuple):
        """Split a nonempty antecedent into nonempty parts each deriving body."""
        key = (body, ante)
        r = self.star_memo.get(key, _MISSING)
        if r is not _MISSING:
            self.stats.memo_hits += 1
            return r
        self.star_memo[key] = None
        first, others = ante[0], ante[1:]
        result = None
        for chosen, rest in _sub_multisets(_grouped(others)):
            p = self._solve(Sequent([first] + chosen, body))
            if not p:
                continue
            if not rest:
                result = [p]
                break
            tail = self._star_parts(body, tuple(sorted(rest, key=lambda f: f.text)))
            if tail is not None:
                result = [p] + tail
                break
        self.star_memo[key] = result
        return result


def decide(s: Sequent, emit_proof: bool = True, prover: Optional[Prover] = None,
           debug: bool = False) -> SearchOutcome:
    if s.has_negative_star():
        return Refused()
    if prover is None:
        prover = Prover(emit_proof=emit_proof, debug=debug)
    before = SearchStats(prover.stats.nodes_expanded, prover.stats.memo_hits,
                         prover.stats.max_depth, prover.stats.elapsed)
    res = prover.prove(s)
    st = prover.stats
    stats = SearchStats(st.nodes_expanded - before.nodes_expanded,
                        st.memo_hits - before.memo_hits, st.max_depth,
                        st.elapsed - before.elapsed)
    if res:
        return Derivable(res if prover.emit else None, stats)
    return NotDerivable(stats)


def decide_bool(s: Sequent, prover: Optional[Prover] = None) -> Optional[bool]:
    """True/False, or None when the sequent has a negative star."""
    if s.has_negative_star():
        return None
    if prover is None:
        prover = Prover(emit_proof=False)
    return bool(prover.prove(s))
