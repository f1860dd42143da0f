"""Cut elimination for finite derivations without the omega-rule.

Topmost cuts go first, so ``_reduce`` only ever sees two cut-free premises.
It either commutes the cut upward into one of them or, when both sides
introduce the cut formula, replaces it by cuts on the immediate subformulas.
Every recursive call lowers the cut-formula size or the combined height of
the two premises, which is the usual triple induction.
"""

from __future__ import annotations

import sys
from collections import Counter

from .calculus import Calculus, check, principal_formula
from .formula import Formula, Sequent
from .proof import Derivation, Inference

__all__ = ["eliminate_cuts", "InvalidDerivation"]

_LEFT_RULES = {"OneL", "DotL", "WedgeL1", "WedgeL2", "VeeL", "ImpL"}


class InvalidDerivation(ValueError):
    def __init__(self, report):
        self.report = report
        super().__init__(f"input derivation rejected: {report}")


def eliminate_cuts(d: Derivation) -> Derivation:
    report = check(d, Calculus.OMEGA_FIN)
    if not report.valid:
        raise InvalidDerivation(report)
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 50_000))
    try:
        return _Eliminator().run(d)
    finally:
        sys.setrecursionlimit(limit)


def _minus(ante, f: Formula) -> list:
    out = list(ante)
    out.remove(f)
    return out


def _with(rule: str, conclusion: Sequent, premises) -> Inference:
    return Inference(rule, conclusion, tuple(premises))


class _Eliminator:
    def __init__(self):
        self.memo: dict[int, Derivation] = {}
        self.keep: list = []

    def run(self, d: Inference) -> Derivation:
        key = id(d)
        if key in self.memo:
            return self.memo[key]
        prems = tuple(self.run(p) for p in d.premises)
        if d.rule == "Cut":
            out = self._reduce(prems[0], prems[1])
            assert out.conclusion == d.conclusion
        elif all(a is b for a, b in zip(prems, d.premises)):
            out = d
        else:
            out = Inference(d.rule, d.conclusion, prems, None, d.label)
        self.keep.append(d)
        self.memo[key] = out
        return out

    def _reduce(self, left: Inference, right: Inference) -> Inference:
        """Cut-free proof of ``Gamma, Pi |- C`` from ``Pi |- A`` and ``Gamma, A |- C``."""
        a = left.conclusion.succedent
        goal = Sequent(_minus(right.conclusion.antecedent, a) + list(left.conclusion.antecedent),
                       right.conclusion.succedent)
        if left.rule == "Id":
            return right
        if right.rule == "Id":
            return left
        if left.rule == "ZeroL":
            return _with("ZeroL", goal, ())
        if left.rule in _LEFT_RULES:
            return self._into_left(left, right, goal)
        if right.rule == "ZeroL":
            return _with("ZeroL", goal, ())
        if right.rule in _LEFT_RULES and principal_formula(right) is a:
            return self._principal(left, right, a, goal)
        return self._into_right(left, right, a, goal)

    def _into_left(self, left, right, goal):
        # the cut formula is the succedent of every premise that keeps it
        if left.rule == "ImpL":
            arg, body = left.premises
            return _with("ImpL", goal, (arg, self._reduce(body, right)))
        return _with(left.rule, goal, [self._reduce(p, right) for p in left.premises])

    def _principal(self, left, right, a, goal):
        r = right.rule
        if r == "OneL":
            return right.premises[0]
        if r == "DotL":
            s1, s2 = left.premises
            x = self._reduce(s1, right.premises[0])
            return self._reduce(s2, x)
        if r == "VeeL":
            side = 0 if left.rule == "VeeR1" else 1
            return self._reduce(left.premises[0], right.premises[side])
        if r in ("WedgeL1", "WedgeL2"):
            side = 0 if r == "WedgeL1" else 1
            return self._reduce(left.premises[side], right.premises[0])
        if r == "ImpL":
            body = left.premises[0]
            arg, rest = right.premises
            x = self._reduce(body, rest)
            return self._reduce(arg, x)
        raise AssertionError(f"no principal reduction for {left.rule}/{r}")

    def _into_right(self, left, right, a, goal):
        r = right.rule
        prems = right.premises
        if r in ("OneL", "DotL", "WedgeL1", "WedgeL2", "VeeL", "ImpR",
                 "VeeR1", "VeeR2", "WedgeR"):
            # the cut formula lies in the shared context of every premise
            return _with(r, goal, [self._reduce(left, p) for p in prems])
        if r == "ImpL":
            arg, body = prems
            if a in arg.conclusion.antecedent:
                return _with(r, goal, (self._reduce(left, arg), body))
            return _with(r, goal, (arg, self._reduce(left, body)))
        if r == "DotR":
            p1, p2 = prems
            if a in p1.conclusion.antecedent:
                return _with(r, goal, (self._reduce(left, p1), p2))
            return _with(r, goal, (p1, self._reduce(left, p2)))
        if r == "StarRN":
            out = list(prems)
            for i, p in enumerate(prems):
                if a in p.conclusion.antecedent:
                    q = self._reduce(left, p)
                    if q.conclusion.antecedent:
                        out[i] = q
                    else:
                        # part became empty: drop the redundant premise
                        del out[i]
                    break
            return _with(r, goal, out)
        raise AssertionError(f"cannot commute a cut into {r}")
