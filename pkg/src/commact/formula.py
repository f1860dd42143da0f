"""Formulas and sequents of commutative action logic.

Formulas are hash-consed: constructing the same tree twice returns the same
object, so equality is identity and hashing is cheap.  Every node caches its
printed form, its complexity and a few polarity summaries used by the prover.
"""

from __future__ import annotations

import re
from collections import Counter
from enum import Enum
from functools import total_ordering
from typing import Iterable, Iterator

__all__ = [
    "Formula", "Var", "Zero", "One", "Imp", "Dot", "Vee", "Wedge", "Star",
    "ZERO", "ONE", "Sequent", "Rank", "ParseError",
    "parse_formula", "parse_sequent", "complexity", "rank", "compare_rank",
    "star_polarities", "power", "big_vee", "big_wedge", "big_dot",
    "subformulas", "variables",
]

VAR_RE = re.compile(r"[a-z][a-zA-Z0-9_]*\Z")

PREC_IMP, PREC_VEE, PREC_WEDGE, PREC_DOT, PREC_STAR, PREC_ATOM = 1, 2, 3, 4, 5, 6

_INTERN: dict = {}


class Formula:
    """Base class of the formula AST.  Do not instantiate directly."""

    __slots__ = ("size", "text", "levels", "star_same", "star_flip",
                 "atoms_same", "atoms_flip")
    prec = PREC_ATOM

    def _finish(self, text, levels, star_same, star_flip, atoms_same, atoms_flip):
        self.text = text
        self.levels = levels
        self.star_same = star_same
        self.star_flip = star_flip
        self.atoms_same = atoms_same
        self.atoms_flip = atoms_flip

    def __str__(self):
        return self.text

    def __repr__(self):
        return f"<{type(self).__name__} {self.text}>"

    def __lt__(self, other):
        return self.text < other.text

    @property
    def children(self) -> tuple:
        return ()


def _merge_levels(*parts, own=None):
    acc = Counter()
    for p in parts:
        acc.update(p)
    if own is not None:
        acc[own] += 1
    return acc


class Var(Formula):
    __slots__ = ("name",)
    __match_args__ = ("name",)

    def __new__(cls, name: str):
        key = ("var", name)
        f = _INTERN.get(key)
        if f is None:
            if not isinstance(name, str) or not VAR_RE.match(name):
                raise ValueError(f"invalid variable name {name!r}")
            f = object.__new__(cls)
            f.name = name
            f.size = 1
            f._finish(name, Counter({1: 1}), False, False,
                      frozenset([name]), frozenset())
            _INTERN[key] = f
        return f

    def __reduce__(self):
        return (Var, (self.name,))


class _Const(Formula):
    __slots__ = ()
    symbol = ""

    def __new__(cls):
        f = _INTERN.get(cls)
        if f is None:
            f = object.__new__(cls)
            f.size = 1
            f._finish(cls.symbol, Counter({1: 1}), False, False,
                      frozenset([cls.symbol]), frozenset())
            _INTERN[cls] = f
        return f

    def __reduce__(self):
        return (type(self), ())


class Zero(_Const):
    __slots__ = ()
    symbol = "0"


class One(_Const):
    __slots__ = ()
    symbol = "1"


ZERO = Zero()
ONE = One()


class Binary(Formula):
    __slots__ = ("lhs", "rhs")
    __match_args__ = ("lhs", "rhs")
    op = ""
    right_assoc = False

    def __new__(cls, lhs: Formula, rhs: Formula):
        key = (cls, id(lhs), id(rhs))
        f = _INTERN.get(key)
        if f is None:
            if not isinstance(lhs, Formula) or not isinstance(rhs, Formula):
                raise TypeError("formula operands expected")
            f = object.__new__(cls)
            f.lhs, f.rhs = lhs, rhs
            f.size = 1 + lhs.size + rhs.size
            P = cls.prec
            if cls.right_assoc:
                lp, rp = lhs.prec <= P, rhs.prec < P
            else:
                lp, rp = lhs.prec < P, rhs.prec <= P
            lt = f"({lhs.text})" if lp else lhs.text
            rt = f"({rhs.text})" if rp else rhs.text
            ls, lf, la, lb = lhs.star_same, lhs.star_flip, lhs.atoms_same, lhs.atoms_flip
            if cls is Imp:
                # the left argument of a residual has opposite polarity
                ls, lf, la, lb = lf, ls, lb, la
            f._finish(f"{lt} {cls.op} {rt}",
                      _merge_levels(lhs.levels, rhs.levels, own=f.size),
                      ls or rhs.star_same, lf or rhs.star_flip,
                      la | rhs.atoms_same, lb | rhs.atoms_flip)
            _INTERN[key] = f
        return f

    def __reduce__(self):
        return (type(self), (self.lhs, self.rhs))

    @property
    def children(self):
        return (self.lhs, self.rhs)


class Imp(Binary):
    __slots__ = ()
    op = "-o"
    prec = PREC_IMP
    right_assoc = True


class Vee(Binary):
    __slots__ = ()
    op = "\\/"
    prec = PREC_VEE


class Wedge(Binary):
    __slots__ = ()
    op = "/\\"
    prec = PREC_WEDGE


class Dot(Binary):
    __slots__ = ()
    op = "."
    prec = PREC_DOT


class Star(Formula):
    __slots__ = ("body",)
    __match_args__ = ("body",)
    prec = PREC_STAR

    def __new__(cls, body: Formula):
        key = (cls, id(body))
        f = _INTERN.get(key)
        if f is None:
            if not isinstance(body, Formula):
                raise TypeError("formula operand expected")
            f = object.__new__(cls)
            f.body = body
            f.size = 1 + body.size
            bt = f"({body.text})" if body.prec < PREC_STAR else body.text
            f._finish(bt + "^*", _merge_levels(body.levels, own=f.size),
                      True, body.star_flip, body.atoms_same, body.atoms_flip)
            _INTERN[key] = f
        return f

    def __reduce__(self):
        return (Star, (self.body,))

    @property
    def children(self):
        return (self.body,)


# -- builders ---------------------------------------------------------------

def power(f: Formula, k: int) -> Formula:
    """Right-associated k-fold product; ``power(f, 0)`` is 1."""
    if k < 0:
        raise ValueError("negative exponent")
    if k == 0:
        return ONE
    acc = f
    for _ in range(k - 1):
        acc = Dot(f, acc)
    return acc


def _fold_right(cls, items, empty):
    items = list(items)
    if not items:
        if empty is None:
            raise ValueError("empty connective chain")
        return empty
    acc = items[-1]
    for f in reversed(items[:-1]):
        acc = cls(f, acc)
    return acc


def big_vee(items: Iterable[Formula]) -> Formula:
    return _fold_right(Vee, items, None)


def big_wedge(items: Iterable[Formula]) -> Formula:
    return _fold_right(Wedge, items, None)


def big_dot(items: Iterable[Formula]) -> Formula:
    """Right-associated product; the empty product is 1."""
    return _fold_right(Dot, items, ONE)


def subformulas(f: Formula) -> Iterator[Formula]:
    """Every subformula occurrence, pre-order."""
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        stack.extend(reversed(g.children))


def variables(f: Formula) -> set[str]:
    return {g.name for g in subformulas(f) if isinstance(g, Var)}


def complexity(f: Formula) -> int:
    return f.size


# -- sequents ---------------------------------------------------------------

def _sort_key(f: Formula) -> str:
    return f.text


class Sequent:
    """``antecedent |- succedent`` with a multiset antecedent.

    The antecedent is kept as a tuple sorted by printed form, so equal
    multisets give equal (and equally hashed) sequents.
    """

    __slots__ = ("antecedent", "succedent", "_hash")

    def __init__(self, antecedent: Iterable[Formula], succedent: Formula):
        ante = tuple(sorted(antecedent, key=_sort_key))
        for f in ante:
            if not isinstance(f, Formula):
                raise TypeError(f"not a formula: {f!r}")
        if not isinstance(succedent, Formula):
            raise TypeError(f"not a formula: {succedent!r}")
        object.__setattr__(self, "antecedent", ante)
        object.__setattr__(self, "succedent", succedent)
        object.__setattr__(self, "_hash", hash((ante, succedent)))

    def __setattr__(self, name, value):
        raise AttributeError("Sequent is immutable")

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Sequent):
            return NotImplemented
        return (self._hash == other._hash and self.succedent is other.succedent
                and self.antecedent == other.antecedent)

    def __hash__(self):
        return self._hash

    def __reduce__(self):
        return (Sequent, (self.antecedent, self.succedent))

    def __str__(self):
        if not self.antecedent:
            return f"|- {self.succedent.text}"
        return ", ".join(f.text for f in self.antecedent) + " |- " + self.succedent.text

    def __repr__(self):
        return f"Sequent({str(self)!r})"

    @property
    def multiset(self) -> Counter:
        return Counter(self.antecedent)

    def formulas(self) -> Iterator[Formula]:
        yield from self.antecedent
        yield self.succedent

    def has_negative_star(self) -> bool:
        return self.succedent.star_flip or any(f.star_same for f in self.antecedent)


# -- rank -------------------------------------------------------------------

class Ordering(str, Enum):
    LESS = "less"
    EQUAL = "equal"
    GREATER = "greater"


@total_ordering
class Rank:
    """Sparse count of subformula occurrences per complexity level."""

    __slots__ = ("counts",)

    def __init__(self, counts=None):
        self.counts = {k: v for k, v in dict(counts or {}).items() if v}
        if any(k < 0 or v < 0 for k, v in self.counts.items()):
            raise ValueError("rank entries must be non-negative")

    def __getitem__(self, level):
        return self.counts.get(level, 0)

    def __eq__(self, other):
        return isinstance(other, Rank) and self.counts == other.counts

    def __hash__(self):
        return hash(frozenset(self.counts.items()))

    def __lt__(self, other):
        return compare_rank(self, other) is Ordering.LESS

    def __repr__(self):
        return f"Rank({dict(sorted(self.counts.items()))})"


def rank(s: Sequent) -> Rank:
    acc = Counter()
    for f in s.formulas():
        acc.update(f.levels)
    return Rank(acc)


def compare_rank(r1: Rank, r2: Rank) -> Ordering:
    """Anti-lexicographic comparison: the highest differing level decides."""
    for level in sorted(set(r1.counts) | set(r2.counts), reverse=True):
        a, b = r1[level], r2[level]
        if a != b:
            return Ordering.LESS if a < b else Ordering.GREATER
    return Ordering.EQUAL


def star_polarities(s: Sequent) -> list[tuple[tuple, str]]:
    """Report every star occurrence with its polarity.

    Paths start with ``("ante", i)`` or ``("succ",)`` followed by child
    indices.  Antecedent formulas start negative, the succedent positive,
    and the left argument of ``-o`` flips polarity.
    """
    out = []

    def walk(f, path, positive):
        if isinstance(f, Star):
            out.append((path, "positive" if positive else "negative"))
            walk(f.body, path + (0,), positive)
        elif isinstance(f, Imp):
            walk(f.lhs, path + (0,), not positive)
            walk(f.rhs, path + (1,), positive)
        elif isinstance(f, Binary):
            walk(f.lhs, path + (0,), positive)
            walk(f.rhs, path + (1,), positive)

    for i, f in enumerate(s.antecedent):
        walk(f, ("ante", i), False)
    walk(s.succedent, ("succ",), True)
    return out


# -- parsing ----------------------------------------------------------------

class ParseError(ValueError):
    def __init__(self, message: str, position: int | None = None):
        self.position = position
        where = f" at position {position}" if position is not None else ""
        super().__init__(f"{message}{where}")


_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<op>-o|\\/|/\\|\|-|[.,()^*])
  | (?P<num>\d+)
  | (?P<ident>[a-z][a-zA-Z0-9_]*)
""", re.VERBOSE)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            if text[pos] == "-" and text[pos + 1:pos + 2].isdigit():
                raise ParseError("negative exponent", pos)
            raise ParseError(f"unknown token {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Pow:
    """Unlowered ``F^k``; becomes copies at antecedent top level, a product elsewhere."""

    __slots__ = ("base", "k")

    def __init__(self, base, k):
        self.base, self.k = base, k


def _lower(x) -> Formula:
    return power(x.base, x.k) if isinstance(x, _Pow) else x


class _Parser:
    _BINARY = {"\\/": Vee, "/\\": Wedge, ".": Dot}
    _LEVELS = ("\\/", "/\\", ".")

    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def advance(self):
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect(self, value):
        t = self.tok
        if t[1] != value:
            got = "end of input" if t[0] == "eof" else repr(t[1])
            raise ParseError(f"expected {value!r}, got {got}", t[2])
        return self.advance()

    def formula(self):
        lhs = self.binary(0)
        if self.tok[1] == "-o":
            self.advance()
            return Imp(_lower(lhs), _lower(self.formula()))
        return lhs

    def binary(self, level):
        if level == len(self._LEVELS):
            return self.postfix()
        op = self._LEVELS[level]
        lhs = self.binary(level + 1)
        while self.tok[1] == op:
            self.advance()
            rhs = self.binary(level + 1)
            lhs = self._BINARY[op](_lower(lhs), _lower(rhs))
        return lhs

    def postfix(self):
        node = self.atom()
        while self.tok[1] == "^":
            caret = self.advance()
            t = self.tok
            if t[1] == "*":
                self.advance()
                node = Star(_lower(node))
            elif t[0] == "num":
                self.advance()
                node = _Pow(_lower(node), int(t[1]))
            else:
                raise ParseError("expected '*' or an exponent after '^'", caret[2])
        return node

    def atom(self):
        kind, value, pos = self.tok
        if kind == "ident":
            self.advance()
            return Var(value)
        if kind == "num":
            if value == "0":
                self.advance()
                return ZERO
            if value == "1":
                self.advance()
                return ONE
            raise ParseError(f"unexpected number {value}", pos)
        if value == "(":
            self.advance()
            inner = _lower(self.formula())
            if self.tok[1] != ")":
                raise ParseError("unbalanced parentheses: expected ')'", self.tok[2])
            self.advance()
            return inner
        if value == ")":
            raise ParseError("unbalanced parentheses: unexpected ')'", pos)
        if kind == "eof":
            raise ParseError("unexpected end of input", pos)
        raise ParseError(f"unexpected token {value!r}", pos)

    def finish(self):
        kind, value, pos = self.tok
        if kind != "eof":
            if value == ")":
                raise ParseError("unbalanced parentheses: unexpected ')'", pos)
            raise ParseError(f"unexpected token {value!r}", pos)


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    f = _lower(p.formula())
    p.finish()
    return f


def parse_sequent(text: str) -> Sequent:
    """Parse ``F1, ..., Fn |- G``.

    A top-level ``F^k`` in the antecedent stands for k copies of F.
    """
    p = _Parser(text)
    ante: list[Formula] = []
    if p.tok[1] != "|-":
        while True:
            item = p.formula()
            if isinstance(item, _Pow):
                ante.extend([item.base] * item.k)
            else:
                ante.append(item)
            if p.tok[1] == ",":
                p.advance()
                continue
            break
    p.expect("|-")
    succ = _lower(p.formula())
    p.finish()
    return Sequent(ante, succ)
