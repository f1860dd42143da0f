"""Finite commutative action lattices given by explicit tables.

Used as a soundness oracle: every derivable sequent must hold in every such
lattice under every valuation.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Optional

from .formula import (Dot, Formula, Imp, One, Sequent, Star, Var, Vee, Wedge,
                      Zero, variables)
from .proof import Derivation

__all__ = ["FiniteActionLattice", "boolean_lattice", "parse_lattice",
           "validate_lattice", "is_star_continuous", "evaluate",
           "sequent_holds", "soundness_check", "LatticeError"]

EXHAUSTIVE_CAP = 1024
DEFAULT_TRIALS = 1000


class LatticeError(ValueError):
    pass


@dataclass(frozen=True)
class FiniteActionLattice:
    size: int
    leq: tuple      # leq[x][y]
    dot: tuple
    vee: tuple
    wedge: tuple
    imp: tuple
    star: tuple
    zero: int
    one: int

    def __post_init__(self):
        n = self.size
        for name in ("leq", "dot", "vee", "wedge", "imp"):
            t = getattr(self, name)
            if len(t) != n or any(len(row) != n for row in t):
                raise LatticeError(f"table {name} must be {n}x{n}")
        if len(self.star) != n:
            raise LatticeError(f"star table must have {n} entries")
        cells = [x for name in ("dot", "vee", "wedge", "imp")
                 for row in getattr(self, name) for x in row]
        cells += list(self.star) + [self.zero, self.one]
        if any(not 0 <= x < n for x in cells):
            raise LatticeError("table entry outside the carrier")

    def replace(self, **changes) -> "FiniteActionLattice":
        fields = {k: getattr(self, k) for k in self.__dataclass_fields__}
        fields.update(changes)
        return FiniteActionLattice(**fields)


def boolean_lattice() -> FiniteActionLattice:
    """Two-element Boolean algebra: product is meet and star is constantly 1."""
    return FiniteActionLattice(
        size=2,
        leq=((True, True), (False, True)),
        dot=((0, 0), (0, 1)),
        vee=((0, 1), (1, 1)),
        wedge=((0, 0), (0, 1)),
        imp=((1, 1), (0, 1)),
        star=(1, 1),
        zero=0, one=1,
    )


def parse_lattice(text: str) -> FiniteActionLattice:
    """Read ``size n`` followed by tables ``leq``, ``dot``, ``vee``, ``wedge``,
    ``imp`` (n rows each), ``star`` (one row) and ``zero i`` / ``one j``."""
    lines = [ln.split("#", 1)[0].split() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    n = None
    tables: dict = {}
    scalars: dict = {}
    i = 0
    try:
        while i < len(lines):
            head = lines[i]
            key = head[0]
            if key == "size":
                n = int(head[1])
                i += 1
            elif key in ("zero", "one"):
                scalars[key] = int(head[1])
                i += 1
            elif key == "star":
                row = head[1:] or lines[i + 1]
                tables["star"] = tuple(int(x) for x in row)
                i += 1 if head[1:] else 2
            elif key in ("leq", "dot", "vee", "wedge", "imp"):
                if n is None:
                    raise LatticeError("'size' must come before the tables")
                rows = lines[i + 1:i + 1 + n]
                if len(rows) != n:
                    raise LatticeError(f"table {key} is truncated")
                tables[key] = tuple(tuple(int(x) for x in r) for r in rows)
                i += 1 + n
            else:
                raise LatticeError(f"unknown entry {key!r}")
    except (IndexError, ValueError) as e:
        if isinstance(e, LatticeError):
            raise
        raise LatticeError(f"malformed lattice file: {e}") from None
    missing = {"leq", "dot", "vee", "wedge", "imp", "star"} - set(tables)
    missing |= {"zero", "one"} - set(scalars)
    if n is None or missing:
        raise LatticeError("missing entries: " + ", ".join(sorted(missing | ({"size"} if n is None else set()))))
    leq = tuple(tuple(bool(x) for x in row) for row in tables.pop("leq"))
    return FiniteActionLattice(n, leq, tables["dot"], tables["vee"], tables["wedge"],
                               tables["imp"], tables["star"], scalars["zero"], scalars["one"])


def validate_lattice(L: FiniteActionLattice) -> list[str]:
    """All violated axioms (empty when L is a valid commutative action lattice)."""
    n = L.size
    R = range(n)
    le, dot, vee, wedge, imp, star = L.leq, L.dot, L.vee, L.wedge, L.imp, L.star
    out = []

    def need(cond, msg):
        if not cond:
            out.append(msg)

    for x in R:
        need(le[x][x], f"leq not reflexive at {x}")
        need(le[L.zero][x], f"zero is not below {x}")
        for y in R:
            if x != y:
                need(not (le[x][y] and le[y][x]), f"leq not antisymmetric at {x},{y}")
            for z in R:
                if le[x][y] and le[y][z]:
                    need(le[x][z], f"leq not transitive at {x},{y},{z}")
    for x in R:
        need(dot[x][L.one] == x, f"one is not a unit for {x}")
        for y in R:
            need(dot[x][y] == dot[y][x], f"dot not commutative at {x},{y}")
            for z in R:
                need(dot[dot[x][y]][z] == dot[x][dot[y][z]], f"dot not associative at {x},{y},{z}")
                need(le[dot[x][y]][z] == le[y][imp[x][z]], f"residuation fails at {x},{y},{z}")
    for x in R:
        for y in R:
            j, m = vee[x][y], wedge[x][y]
            need(le[x][j] and le[y][j] and all(le[j][u] for u in R if le[x][u] and le[y][u]),
                 f"vee is not a join at {x},{y}")
            need(le[m][x] and le[m][y] and all(le[u][m] for u in R if le[u][x] and le[u][y]),
                 f"wedge is not a meet at {x},{y}")
    for x in R:
        pre = [y for y in R if le[L.one][y] and le[dot[x][y]][y]]
        s = star[x]
        if s not in pre or any(not le[s][y] for y in pre):
            out.append(f"star({x}) is not the least y with 1 <= y and x.y <= y")
    return out


def is_star_continuous(L: FiniteActionLattice) -> bool:
    """star(x) equals the join of x^0, ..., x^(2n); in a finite monoid the
    powers of x repeat within n steps, so this join is the full supremum."""
    for x in range(L.size):
        acc, p = L.one, L.one
        for _ in range(2 * L.size):
            p = L.dot[p][x]
            acc = L.vee[acc][p]
        if acc != L.star[x]:
            return False
    return True


def evaluate(f: Formula, L: FiniteActionLattice, v: dict) -> int:
    if isinstance(f, Var):
        if f.name not in v:
            raise LatticeError(f"unbound variable {f.name}")
        return v[f.name]
    if isinstance(f, Zero):
        return L.zero
    if isinstance(f, One):
        return L.one
    if isinstance(f, Star):
        return L.star[evaluate(f.body, L, v)]
    x, y = evaluate(f.lhs, L, v), evaluate(f.rhs, L, v)
    table = {Dot: L.dot, Vee: L.vee, Wedge: L.wedge, Imp: L.imp}[type(f)]
    return table[x][y]


def sequent_holds(s: Sequent, L: FiniteActionLattice, v: dict) -> bool:
    acc = L.one
    for f in s.antecedent:
        acc = L.dot[acc][evaluate(f, L, v)]
    return L.leq[acc][evaluate(s.succedent, L, v)]


def soundness_check(d, L: FiniteActionLattice, trials: Optional[int] = None,
                    seed: int = 0, cap: int = EXHAUSTIVE_CAP) -> Optional[dict]:
    """Look for a valuation falsifying the conclusion of d (a derivation or a
    sequent).  Exhaustive when at most ``cap`` valuations exist, otherwise
    ``trials`` random valuations.  Returns None when none is found."""
    s = d if isinstance(d, Sequent) else d.conclusion
    names = sorted(set().union(*(variables(f) for f in s.formulas())))
    total = L.size ** len(names)
    if trials is None and total <= cap:
        pool = itertools.product(range(L.size), repeat=len(names))
    else:
        rng = random.Random(seed)
        pool = (tuple(rng.randrange(L.size) for _ in names)
                for _ in range(trials or DEFAULT_TRIALS))
    for values in pool:
        v = dict(zip(names, values))
        if not sequent_holds(s, L, v):
            return v
    return None
