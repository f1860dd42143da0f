"""Derivation builders: small combinators, the Kleene-algebra star schemas of
CommACT, and translations of *R_n into the other calculi."""

from __future__ import annotations

from collections import Counter
from typing import Iterable, Sequence

from .formula import (ONE, Dot, Formula, Imp, Sequent, Star, Vee, Wedge,
                      big_dot, big_vee, power)
from .proof import Backlink, Derivation, Inference

__all__ = [
    "mk", "ident", "vee_into", "wedge_from", "dot_left", "dot_right",
    "imp_left", "cut", "star_unfold_schema", "kleene_split_schema",
    "derived_star_left", "to_commact", "to_circ", "unravel",
    "reconclude",
]


def _swap(ante: Iterable[Formula], old: Formula, new: Sequence[Formula]) -> list:
    out = list(ante)
    out.remove(old)
    out.extend(new)
    return out


def mk(rule: str, ante, succ: Formula, *premises, cut_formula=None, label=None) -> Inference:
    return Inference(rule, Sequent(ante, succ), tuple(premises), cut_formula, label)


def ident(f: Formula) -> Inference:
    return mk("Id", [f], f)


def vee_into(d: Derivation, target: Formula) -> Derivation:
    """Lift a proof of ``Pi |- X`` to ``Pi |- target`` where X sits inside the
    disjunction tree ``target`` (left branch preferred)."""
    x = d.conclusion.succedent

    def reach(t):
        if t is x:
            return True
        return isinstance(t, Vee) and (reach(t.lhs) or reach(t.rhs))

    def go(t):
        if t is x:
            return d
        if reach(t.lhs):
            return mk("VeeR1", d.conclusion.antecedent, t, go(t.lhs))
        return mk("VeeR2", d.conclusion.antecedent, t, go(t.rhs))

    if not reach(target):
        raise ValueError(f"{x} is not a disjunct of {target}")
    return go(target)


def wedge_from(d: Derivation, part: Formula, whole: Formula) -> Derivation:
    """Turn a proof of ``Gamma, part |- C`` into ``Gamma, whole |- C`` by a
    chain of /\\L steps, where ``part`` is a conjunct of ``whole``."""
    def reach(t):
        if t is part:
            return True
        return isinstance(t, Wedge) and (reach(t.lhs) or reach(t.rhs))

    if not reach(whole):
        raise ValueError(f"{part} is not a conjunct of {whole}")

    def go(t):
        if t is part:
            return d
        side = t.lhs if reach(t.lhs) else t.rhs
        inner = go(side)
        c = inner.conclusion
        return mk("WedgeL1" if side is t.lhs else "WedgeL2",
                  _swap(c.antecedent, side, [t]), c.succedent, inner)

    return go(whole)


def dot_left(d: Derivation, items: Sequence[Formula]) -> Derivation:
    """From ``Gamma, f1, ..., fn |- C`` derive ``Gamma, f1 . (... . fn) |- C``."""
    items = list(items)
    c = d.conclusion
    if not items:
        return mk("OneL", list(c.antecedent) + [ONE], c.succedent, d)
    if len(items) == 1:
        return d
    rest = big_dot(items[1:])
    inner = dot_left(d, items[1:])
    ic = inner.conclusion
    ante = list(ic.antecedent)
    ante.remove(items[0])
    ante.remove(rest)
    return mk("DotL", ante + [Dot(items[0], rest)], c.succedent, inner)


def dot_right(proofs: Sequence[Derivation]) -> Derivation:
    """From ``Pi_i |- X_i`` derive ``Pi_1, ..., Pi_n |- X_1 . (... . X_n)``."""
    if not proofs:
        return mk("OneR", [], ONE)
    if len(proofs) == 1:
        return proofs[0]
    rest = dot_right(proofs[1:])
    a, b = proofs[0].conclusion, rest.conclusion
    return mk("DotR", list(a.antecedent) + list(b.antecedent),
              Dot(a.succedent, b.succedent), proofs[0], rest)


def imp_left(imp: Formula, arg: Derivation, body: Derivation) -> Derivation:
    """-oL: from ``Pi |- A`` and ``Gamma, B |- C`` derive ``Gamma, Pi, A -o B |- C``."""
    if not isinstance(imp, Imp):
        raise ValueError("implication expected")
    c = body.conclusion
    ante = _swap(c.antecedent, imp.rhs, []) + list(arg.conclusion.antecedent) + [imp]
    return mk("ImpL", ante, c.succedent, arg, body)


def cut(left: Derivation, right: Derivation) -> Derivation:
    a = left.conclusion.succedent
    c = right.conclusion
    ante = _swap(c.antecedent, a, list(left.conclusion.antecedent))
    return mk("Cut", ante, c.succedent, left, right, cut_formula=a)


def reconclude(d: Inference, conclusion: Sequent) -> Inference:
    return Inference(d.rule, conclusion, d.premises, d.cut_formula, d.label)


# -- star schemas -----------------------------------------------------------

def _star_r_ind(a: Formula) -> Inference:
    return mk("StarRInd", [a, Star(a)], Star(a))


def star_unfold_schema(a: Formula) -> Derivation:
    """``a^* |- 1 \\/ (a . a^*)`` by *L_ind with the unfolding as invariant."""
    s = Star(a)
    unfold = Dot(a, s)
    inv = Vee(ONE, unfold)
    base = mk("VeeR1", [], inv, mk("OneR", [], ONE))
    # a, 1 |- inv
    from_one = mk("OneL", [a, ONE], inv,
                  mk("VeeR2", [a], inv,
                     mk("DotR", [a], unfold, ident(a), mk("StarR0", [], s))))
    # a, a . a^* |- inv
    from_unfold = mk("VeeR2", [a, unfold], inv,
                     mk("DotR", [a, unfold], unfold, ident(a),
                        mk("DotL", [unfold], s, _star_r_ind(a))))
    step = mk("VeeL", [a, inv], inv, from_one, from_unfold)
    return mk("StarLInd", [s], inv, base, step)


def _power_split(e: Formula, k: int) -> Derivation:
    """``e, e^(k-1) |- e^k`` for k >= 1 (``e^0`` is 1)."""
    if k == 1:
        return mk("OneL", [e, ONE], e, ident(e))
    rest = power(e, k - 1)
    return mk("DotR", [e, rest], Dot(e, rest), ident(e), ident(rest))


def kleene_split_schema(e: Formula, k: int) -> Derivation:
    """``e^* |- (1 \\/ e \\/ ... \\/ e^(k-1)) . (e^k)^*`` via *L_ind."""
    if not isinstance(k, int) or k < 1:
        raise ValueError("k must be a positive integer")
    disjuncts = [power(e, i) for i in range(k)]
    head = big_vee(disjuncts)
    block = power(e, k)
    tail = Star(block)
    inv = Dot(head, tail)

    base = mk("DotR", [], inv, vee_into(mk("OneR", [], ONE), head),
              mk("StarR0", [], tail))

    # e, e^i, (e^k)^* |- inv for each disjunct e^i
    branches = []
    for i in range(k):
        if i + 1 < k:
            grown = power(e, i + 1)
            if i == 0:
                mult = mk("OneL", [e, ONE], e, ident(e))
            else:
                mult = mk("DotR", [e, disjuncts[i]], grown, ident(e), ident(disjuncts[i]))
            branches.append(mk("DotR", [e, disjuncts[i], tail], inv,
                               vee_into(mult, head), ident(tail)))
        else:
            # e^k joins the starred block: e, e^(k-1), (e^k)^* |- (e^k)^*
            absorb = cut(_power_split(e, k), _star_r_ind(block))
            one_head = vee_into(mk("OneR", [], ONE), head)
            branches.append(mk("DotR", list(absorb.conclusion.antecedent), inv,
                               one_head, absorb))
    # e, head, tail |- inv by \/L down the disjunction spine
    body = branches[k - 1]
    for i in range(k - 2, -1, -1):
        body = mk("VeeL", [e, big_vee(disjuncts[i:]), tail], inv, branches[i], body)
    step = mk("DotL", [e, inv], inv, body)
    return mk("StarLInd", [Star(e)], inv, base, step)


def derived_star_left(gamma: Iterable[Formula], a: Formula, c: Formula,
                      p1: Derivation, p2: Derivation) -> Derivation:
    """The two-premise *L as a derived rule of CommACT:
    from ``Gamma |- C`` and ``Gamma, a^*, a |- C`` build ``Gamma, a^* |- C``."""
    gamma = list(gamma)
    s = Star(a)
    if p1.conclusion != Sequent(gamma, c):
        raise ValueError(f"left premise should conclude {Sequent(gamma, c)}, "
                         f"got {p1.conclusion}")
    if p2.conclusion != Sequent(gamma + [s, a], c):
        raise ValueError(f"right premise should conclude {Sequent(gamma + [s, a], c)}, "
                         f"got {p2.conclusion}")
    unfold = star_unfold_schema(a)
    inv = unfold.conclusion.succedent
    left = mk("OneL", gamma + [ONE], c, p1)
    right = mk("DotL", gamma + [inv.rhs], c, p2)
    return cut(unfold, mk("VeeL", gamma + [inv], c, left, right))


# -- translations -----------------------------------------------------------

def _rebuild(d, fn, memo):
    key = id(d)
    if key in memo:
        return memo[key]
    if isinstance(d, Backlink):
        out = d
    else:
        prems = tuple(_rebuild(p, fn, memo) for p in d.premises)
        out = fn(d, prems)
    memo[key] = out
    return out


def to_commact(d: Derivation) -> Derivation:
    """Replace every *R_n by Cuts against *R_0 and *R_ind."""
    def fn(n, prems):
        if n.rule != "StarRN":
            if prems == n.premises:
                return n
            return Inference(n.rule, n.conclusion, prems, n.cut_formula, n.label)
        s = n.conclusion.succedent
        acc = mk("StarR0", [], s)
        for p in prems:
            step = cut(p, _star_r_ind(s.body))
            acc = cut(acc, step)
        return Inference(acc.rule, n.conclusion, acc.premises, acc.cut_formula, n.label)
    return _rebuild(d, fn, {})


def to_circ(d: Derivation) -> Derivation:
    """Replace every *R_n by a chain of step *R rules ending in *R_0."""
    def fn(n, prems):
        if n.rule != "StarRN":
            if prems == n.premises:
                return n
            return Inference(n.rule, n.conclusion, prems, n.cut_formula, n.label)
        s = n.conclusion.succedent
        acc = mk("StarR0", [], s)
        for p in reversed(prems):
            acc = mk("StarRStep", list(p.conclusion.antecedent) + list(acc.conclusion.antecedent),
                     s, p, acc)
        return Inference(acc.rule, n.conclusion, acc.premises, None, n.label)
    return _rebuild(d, fn, {})


def unravel(d: Derivation, rounds: int = 2) -> Derivation:
    """Unfold each backlink ``rounds`` times.  Backlinks left over keep their
    conclusion but point nowhere, so the result is a finite tree with open
    leaves (check it with ``allow_open=True``)."""
    def go(n, env):
        if isinstance(n, Backlink):
            if n.target not in env:
                return n
            target, seen = env[n.target]
            if seen >= rounds:
                return Backlink("open:" + n.target, target.conclusion)
            return expand(target, {**env, n.target: (target, seen + 1)})
        if n.label is not None and n.label not in env:
            env = {**env, n.label: (n, 0)}
        return expand(n, env)

    def expand(n, env):
        prems = tuple(go(p, env) for p in n.premises)
        return Inference(n.rule, n.conclusion, prems, n.cut_formula, None)

    return go(d, {})
