"""Proof checking for the finite fragment of CommACT_omega, CommACT and the
circular calculus.

Rule instances are matched under multiset semantics: the checker never needs
to be told which antecedent formula is principal, it finds one that makes the
instance work.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Optional

from .formula import (ONE, ZERO, Dot, Formula, Imp, One, Sequent, Star, Vee,
                      Wedge)
from .proof import Backlink, Calculus, Derivation, Inference, format_path

__all__ = ["CheckReport", "RuleMismatch", "check", "match_rule",
           "principal_formula", "RULES_BY_CALCULUS", "Calculus"]

_COMMON = frozenset({
    "Id", "ZeroL", "OneL", "OneR", "ImpL", "ImpR", "DotL", "DotR", "VeeL",
    "VeeR1", "VeeR2", "WedgeL1", "WedgeL2", "WedgeR", "Cut",
})

RULES_BY_CALCULUS = {
    Calculus.OMEGA_FIN: _COMMON | {"StarRN"},
    Calculus.COMMACT: _COMMON | {"StarR0", "StarRInd", "StarLInd"},
    Calculus.CIRC: _COMMON | {"StarR0", "StarRStep", "StarL2"},
}

_ARITY = {
    "Id": 0, "ZeroL": 0, "OneL": 1, "OneR": 0, "ImpL": 2, "ImpR": 1,
    "DotL": 1, "DotR": 2, "VeeL": 2, "VeeR1": 1, "VeeR2": 1, "WedgeL1": 1,
    "WedgeL2": 1, "WedgeR": 2, "StarR0": 0, "StarRStep": 2, "StarL2": 2,
    "StarLInd": 2, "StarRInd": 0, "Cut": 2,
}


class RuleMismatch(Exception):
    """The conclusion does not follow from the premises by the named rule."""


@dataclass(frozen=True)
class CheckReport:
    valid: bool
    path: Optional[tuple] = None
    reason: Optional[str] = None

    def __bool__(self):
        return self.valid

    def __str__(self):
        if self.valid:
            return "valid"
        return f"invalid at {format_path(self.path)}: {self.reason}"


def _ms(seq: Sequent) -> Counter:
    return Counter(seq.antecedent)


def _left_candidates(concl: Sequent, cls):
    seen = set()
    for f in concl.antecedent:
        if isinstance(f, cls) and f not in seen:
            seen.add(f)
            yield f


def _single_left(concl, prem, cls, parts_of):
    if prem.succedent is not concl.succedent:
        raise RuleMismatch("succedent changed")
    target = _ms(prem)
    base = _ms(concl)
    for f in _left_candidates(concl, cls):
        m = base.copy()
        m[f] -= 1
        m.update(parts_of(f))
        if +m == target:
            return f
    raise RuleMismatch(f"no principal {cls.__name__} formula fits the premise")


def match_rule(rule: str, concl: Sequent, prems: list[Sequent],
               cut_formula: Optional[Formula] = None) -> Optional[Formula]:
    """Check one rule instance.

    Returns the principal antecedent formula for left rules (the cut formula
    for Cut) and None otherwise; raises RuleMismatch when the instance is wrong.
    """
    n = _ARITY.get(rule)
    if rule != "StarRN" and n is not None and len(prems) != n:
        raise RuleMismatch(f"{rule} expects {n} premise(s), got {len(prems)}")
    C = concl.succedent
    ante = concl.antecedent

    if rule == "Id":
        if len(ante) != 1 or ante[0] is not C:
            raise RuleMismatch("Id needs exactly 'A |- A'")
        return None
    if rule == "ZeroL":
        if ZERO not in ante:
            raise RuleMismatch("no 0 in the antecedent")
        return ZERO
    if rule == "OneR":
        if ante or C is not ONE:
            raise RuleMismatch("1R needs '|- 1'")
        return None
    if rule == "OneL":
        return _single_left(concl, prems[0], One, lambda f: ())
    if rule == "DotL":
        return _single_left(concl, prems[0], Dot, lambda f: (f.lhs, f.rhs))
    if rule == "WedgeL1":
        return _single_left(concl, prems[0], Wedge, lambda f: (f.lhs,))
    if rule == "WedgeL2":
        return _single_left(concl, prems[0], Wedge, lambda f: (f.rhs,))
    if rule == "VeeL":
        p1, p2 = prems
        if p1.succedent is not C or p2.succedent is not C:
            raise RuleMismatch("succedent changed")
        base = _ms(concl)
        t1, t2 = _ms(p1), _ms(p2)
        for f in _left_candidates(concl, Vee):
            m = base.copy()
            m[f] -= 1
            m1, m2 = m.copy(), m.copy()
            m1[f.lhs] += 1
            m2[f.rhs] += 1
            if +m1 == t1 and +m2 == t2:
                return f
        raise RuleMismatch("no principal disjunction fits both premises")
    if rule == "ImpL":
        p1, p2 = prems
        if p2.succedent is not C:
            raise RuleMismatch("right premise must keep the succedent")
        base = _ms(concl)
        m1, m2 = _ms(p1), _ms(p2)
        for f in _left_candidates(concl, Imp):
            if f.lhs is not p1.succedent or m2[f.rhs] == 0:
                continue
            m = m1 + m2
            m[f.rhs] -= 1
            m[f] += 1
            if +m == base:
                return f
        raise RuleMismatch("no principal implication fits the premises")
    if rule == "ImpR":
        if not isinstance(C, Imp):
            raise RuleMismatch("-oR needs an implication on the right")
        p = prems[0]
        if p.succedent is not C.rhs or _ms(p) != _ms(concl) + Counter([C.lhs]):
            raise RuleMismatch("premise is not 'A, Pi |- B'")
        return None
    if rule == "DotR":
        if not isinstance(C, Dot):
            raise RuleMismatch(".R needs a product on the right")
        p1, p2 = prems
        if p1.succedent is not C.lhs or p2.succedent is not C.rhs:
            raise RuleMismatch("premise succedents do not match the factors")
        if _ms(p1) + _ms(p2) != _ms(concl):
            raise RuleMismatch("antecedent is not the union of the premises'")
        return None
    if rule in ("VeeR1", "VeeR2"):
        if not isinstance(C, Vee):
            raise RuleMismatch("\\/R needs a disjunction on the right")
        side = C.lhs if rule == "VeeR1" else C.rhs
        p = prems[0]
        if p.succedent is not side or p.antecedent != ante:
            raise RuleMismatch("premise is not 'Pi |- A_i'")
        return None
    if rule == "WedgeR":
        if not isinstance(C, Wedge):
            raise RuleMismatch("/\\R needs a conjunction on the right")
        p1, p2 = prems
        if p1.succedent is not C.lhs or p2.succedent is not C.rhs:
            raise RuleMismatch("premise succedents do not match the conjuncts")
        if p1.antecedent != ante or p2.antecedent != ante:
            raise RuleMismatch("premises must share the antecedent")
        return None
    if rule == "StarRN":
        if not isinstance(C, Star):
            raise RuleMismatch("*R_n needs a star on the right")
        total = Counter()
        for p in prems:
            if p.succedent is not C.body:
                raise RuleMismatch("each premise must derive the star body")
            if not p.antecedent:
                raise RuleMismatch("*R_n parts must be nonempty")
            total.update(p.antecedent)
        if total != _ms(concl):
            raise RuleMismatch("antecedent is not the union of the parts")
        return None
    if rule == "StarR0":
        if ante or not isinstance(C, Star):
            raise RuleMismatch("*R_0 needs '|- A^*'")
        return None
    if rule == "StarRInd":
        if not isinstance(C, Star) or _ms(concl) != Counter([C.body, C]):
            raise RuleMismatch("*R_ind needs 'A, A^* |- A^*'")
        return None
    if rule == "StarRStep":
        if not isinstance(C, Star):
            raise RuleMismatch("*R needs a star on the right")
        p1, p2 = prems
        if p1.succedent is not C.body or p2.succedent is not C:
            raise RuleMismatch("premises must be 'Gamma |- A' and 'Delta |- A^*'")
        if _ms(p1) + _ms(p2) != _ms(concl):
            raise RuleMismatch("antecedent is not the union of the premises'")
        return None
    if rule == "StarL2":
        p1, p2 = prems
        if p1.succedent is not C or p2.succedent is not C:
            raise RuleMismatch("succedent changed")
        base = _ms(concl)
        for f in _left_candidates(concl, Star):
            m = base.copy()
            m[f] -= 1
            if +m == _ms(p1) and base + Counter([f.body]) == _ms(p2):
                return f
        raise RuleMismatch("no principal star formula fits the premises")
    if rule == "StarLInd":
        if len(ante) != 1 or not isinstance(ante[0], Star):
            raise RuleMismatch("*L_ind concludes 'A^* |- B' with nothing else on the left")
        a = ante[0].body
        p1, p2 = prems
        if p1.antecedent or p1.succedent is not C:
            raise RuleMismatch("left premise must be '|- B'")
        if p2.succedent is not C or _ms(p2) != Counter([a, C]):
            raise RuleMismatch("right premise must be 'A, B |- B'")
        return ante[0]
    if rule == "Cut":
        p1, p2 = prems
        a = p1.succedent
        if cut_formula is not None and cut_formula is not a:
            raise RuleMismatch("declared cut formula differs from the left premise")
        m2 = _ms(p2)
        if m2[a] == 0:
            raise RuleMismatch("cut formula missing from the right premise")
        if p2.succedent is not C:
            raise RuleMismatch("succedent changed")
        m2[a] -= 1
        if +(m2 + _ms(p1)) != _ms(concl):
            raise RuleMismatch("antecedent is not Gamma, Pi")
        return a
    raise RuleMismatch(f"unknown rule {rule!r}")


def principal_formula(d: Inference) -> Optional[Formula]:
    return match_rule(d.rule, d.conclusion, [p.conclusion for p in d.premises],
                      d.cut_formula)


class _Violation(Exception):
    def __init__(self, path, reason):
        self.path, self.reason = path, reason


def check(d: Derivation, calculus, *, allow_open: bool = False) -> CheckReport:
    """Validate a derivation in the given calculus.

    With ``allow_open`` unresolved backlinks are treated as open leaves (used
    when checking bounded unravellings of circular proofs).
    """
    calculus = Calculus(calculus)
    rules = RULES_BY_CALCULUS[calculus]
    circular = calculus is Calculus.CIRC
    cycles: list[tuple[list, tuple]] = []
    valid_ids: set[int] = set()

    def concl_of(p: Derivation, path, labels):
        if isinstance(p, Inference):
            return p.conclusion
        if p.target in labels:
            target = labels[p.target][1]
            if p.conclusion is not None and p.conclusion != target.conclusion:
                raise _Violation(path, f"backlink {p.target} has a mismatched sequent")
            return target.conclusion
        if allow_open and p.conclusion is not None:
            return p.conclusion
        raise _Violation(path, f"backlink to non-ancestor {p.target!r}")

    def visit(n: Derivation, path: tuple, labels: dict, stack: list):
        if not isinstance(n, (Inference, Backlink)):
            raise _Violation(path, f"not a derivation node: {type(n).__name__}")
        if isinstance(n, Backlink):
            if not circular and not allow_open:
                raise _Violation(path, f"backlinks are not allowed in {calculus.value}")
            concl_of(n, path, labels)
            if n.target in labels:
                start = labels[n.target][0]
                cycles.append((stack[len(start):], path))
            return
        if not labels and not circular and id(n) in valid_ids:
            return
        if n.rule not in rules:
            raise _Violation(path, f"rule {n.rule} is not part of {calculus.value}")
        if n.label is not None:
            if n.label in labels:
                raise _Violation(path, f"duplicate label {n.label!r}")
            labels = {**labels, n.label: (path, n)}
        prem_concls = [concl_of(p, path + (i,), labels) for i, p in enumerate(n.premises)]
        try:
            match_rule(n.rule, n.conclusion, prem_concls, n.cut_formula)
        except RuleMismatch as e:
            raise _Violation(path, f"{n.rule}: {e}") from None
        stack = stack + [(path, n)]
        for i, p in enumerate(n.premises):
            visit(p, path + (i,), labels, stack)
        if not labels and not circular:
            valid_ids.add(id(n))

    try:
        visit(d, (), {}, [])
        if circular:
            for cycle, back_path in cycles:
                _check_trace(cycle, back_path)
    except _Violation as v:
        return CheckReport(False, v.path, v.reason)
    return CheckReport(True)


def _check_trace(cycle, back_path):
    """A cycle is accepted when some two-premise *L on it is entered through its
    right premise and its principal star stays in every antecedent on the cycle."""
    for i, (path, n) in enumerate(cycle):
        if n.rule != "StarL2":
            continue
        nxt = cycle[i + 1][0] if i + 1 < len(cycle) else back_path
        if nxt[len(path)] != 1:
            continue
        star = principal_formula(n)
        if all(star in m.conclusion.antecedent for _, m in cycle):
            return
    start = cycle[0][0] if cycle else back_path
    raise _Violation(back_path, "cycle from " + format_path(start)
                     + " has no *L whose star persists along it")
