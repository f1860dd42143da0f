"""Derivation trees and the s-expression proof file format.

A proof file looks like::

    (proof commact
      (node Cut "p |- p" (cutf "p")
        (node Id "p |- p")
        (node Id "p |- p")))

Circular proofs label a node with ``(label L1 <node>)`` and point back to it
with ``(back L1)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Optional, Union

from .formula import Formula, ParseError, Sequent, parse_formula, parse_sequent

RULES = (
    "Id", "ZeroL", "OneL", "OneR", "ImpL", "ImpR", "DotL", "DotR", "VeeL",
    "VeeR1", "VeeR2", "WedgeL1", "WedgeL2", "WedgeR", "StarRN", "StarR0",
    "StarRStep", "StarL2", "StarLInd", "StarRInd", "Cut",
)


class Calculus(str, Enum):
    OMEGA_FIN = "omega-fin"
    COMMACT = "commact"
    CIRC = "circ"

    @classmethod
    def parse(cls, name: str) -> "Calculus":
        key = name.strip().lower().replace("_", "-")
        for c in cls:
            if c.value == key:
                return c
        raise ValueError(f"unknown calculus {name!r}")


@dataclass(frozen=True, eq=False)
class Inference:
    rule: str
    conclusion: Sequent
    premises: tuple = ()
    cut_formula: Optional[Formula] = None
    label: Optional[str] = None

    def __post_init__(self):
        if self.rule not in RULES:
            raise ValueError(f"unknown rule {self.rule!r}")
        if not isinstance(self.premises, tuple):
            object.__setattr__(self, "premises", tuple(self.premises))


@dataclass(frozen=True, eq=False)
class Backlink:
    """Pointer to a labeled ancestor.  ``conclusion`` may be left unset and is
    then taken from the target when the tree is resolved."""

    target: str
    conclusion: Optional[Sequent] = None
    label: Optional[str] = None


Derivation = Union[Inference, Backlink]


def node(rule: str, conclusion, *premises, cut_formula=None, label=None) -> Inference:
    """Shorthand constructor; sequent arguments may be given as text."""
    if isinstance(conclusion, str):
        conclusion = parse_sequent(conclusion)
    if isinstance(cut_formula, str):
        cut_formula = parse_formula(cut_formula)
    return Inference(rule, conclusion, tuple(premises), cut_formula, label)


def relabel(d: Inference, label: Optional[str]) -> Inference:
    return Inference(d.rule, d.conclusion, d.premises, d.cut_formula, label)


def walk(d: Derivation, path: tuple = ()) -> Iterator[tuple[tuple, Derivation]]:
    """Pre-order traversal yielding (path, node)."""
    stack = [(path, d)]
    while stack:
        p, n = stack.pop()
        yield p, n
        if isinstance(n, Inference):
            for i in range(len(n.premises) - 1, -1, -1):
                stack.append((p + (i,), n.premises[i]))


def count_rule(d: Derivation, rule: str) -> int:
    return sum(1 for _, n in walk(d) if isinstance(n, Inference) and n.rule == rule)


def has_cut(d: Derivation) -> bool:
    return count_rule(d, "Cut") > 0


def height(d: Derivation) -> int:
    if isinstance(d, Backlink) or not d.premises:
        return 1
    return 1 + max(height(p) for p in d.premises)


def size(d: Derivation) -> int:
    return sum(1 for _ in walk(d))


def format_path(path: tuple) -> str:
    return ".".join(map(str, path)) if path else "root"


# -- s-expressions ----------------------------------------------------------

_SEXP_RE = re.compile(r'\s+|;[^\n]*|\(|\)|"(?:[^"\\]|\\.)*"|[^\s()"]+')


def _read_sexp(text: str):
    stack: list[list] = [[]]
    for m in _SEXP_RE.finditer(text):
        tok = m.group()
        if tok.isspace() or tok.startswith(";"):
            continue
        if tok == "(":
            stack.append([])
        elif tok == ")":
            if len(stack) == 1:
                raise ParseError("unbalanced parentheses in proof file", m.start())
            done = stack.pop()
            stack[-1].append(done)
        elif tok.startswith('"'):
            stack[-1].append(("str", tok[1:-1].replace('\\"', '"').replace("\\\\", "\\")))
        else:
            stack[-1].append(tok)
    if len(stack) != 1:
        raise ParseError("unbalanced parentheses in proof file")
    if len(stack[0]) != 1:
        raise ParseError("proof file must contain exactly one top-level form")
    return stack[0][0]


def _is_str(x):
    return isinstance(x, tuple) and x and x[0] == "str"


def _build(sx) -> Derivation:
    if not isinstance(sx, list) or not sx:
        raise ParseError(f"expected a node form, got {sx!r}")
    head = sx[0]
    if head == "label":
        if len(sx) != 3:
            raise ParseError("(label <id> <node>) expected")
        inner = _build(sx[2])
        if isinstance(inner, Backlink):
            return Backlink(inner.target, inner.conclusion, sx[1])
        return relabel(inner, sx[1])
    if head == "back":
        if len(sx) not in (2, 3):
            raise ParseError("(back <id>) expected")
        concl = parse_sequent(sx[2][1]) if len(sx) == 3 else None
        return Backlink(sx[1], concl)
    if head != "node":
        raise ParseError(f"unknown form {head!r}")
    if len(sx) < 3 or not _is_str(sx[2]):
        raise ParseError("(node <RULE> \"<sequent>\" ...) expected")
    rule = sx[1]
    if rule not in RULES:
        raise ParseError(f"unknown rule {rule!r}")
    concl = parse_sequent(sx[2][1])
    cutf = None
    premises = []
    for item in sx[3:]:
        if isinstance(item, list) and item and item[0] == "cutf":
            if len(item) != 2 or not _is_str(item[1]):
                raise ParseError('(cutf "<formula>") expected')
            cutf = parse_formula(item[1][1])
        else:
            premises.append(_build(item))
    return Inference(rule, concl, tuple(premises), cutf)


def loads(text: str) -> tuple[Calculus, Derivation]:
    sx = _read_sexp(text)
    if not isinstance(sx, list) or len(sx) != 3 or sx[0] != "proof":
        raise ParseError("(proof <calculus> <node>) expected")
    return Calculus.parse(sx[1]), _build(sx[2])


def _q(s) -> str:
    return '"' + str(s).replace("\\", "\\\\").replace('"', '\\"') + '"'


def dumps(d: Derivation, calculus: Calculus) -> str:
    lines = [f"(proof {Calculus(calculus).value}"]

    def emit(n: Derivation, indent: int):
        pad = "  " * indent
        open_, close = "", ""
        if n.label is not None:
            open_, close = f"(label {n.label} ", ")"
        if isinstance(n, Backlink):
            extra = f" {_q(n.conclusion)}" if n.conclusion is not None else ""
            lines.append(f"{pad}{open_}(back {n.target}{extra}){close}")
            return
        head = f"{pad}{open_}(node {n.rule} {_q(n.conclusion)}"
        if n.cut_formula is not None:
            head += f" (cutf {_q(n.cut_formula)})"
        if not n.premises:
            lines.append(head + ")" + close)
            return
        lines.append(head)
        for p in n.premises:
            emit(p, indent + 1)
        lines[-1] += ")" + close

    emit(d, 1)
    lines[-1] += ")"
    return "\n".join(lines) + "\n"
