"""Deterministic three-counter machines over the registers a, b, c."""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import Union

__all__ = [
    "REGISTERS", "Inc", "Jzdec", "Machine", "Configuration", "MachineError",
    "Halted", "Circular", "Exceeded", "RunResult", "AtFinal",
    "parse_machine", "step", "run", "classify", "can_perform_k_steps",
]

REGISTERS = ("a", "b", "c")
_STATE_RE = re.compile(r"[a-z][a-zA-Z0-9_]*\Z")


class MachineError(ValueError):
    pass


@dataclass(frozen=True)
class Inc:
    state: str
    register: str
    next: str

    def __str__(self):
        return f"inc {self.state} {self.register} {self.next}"


@dataclass(frozen=True)
class Jzdec:
    state: str
    register: str
    if_zero: str
    if_nonzero: str

    def __str__(self):
        return f"jzdec {self.state} {self.register} {self.if_zero} {self.if_nonzero}"


Instruction = Union[Inc, Jzdec]


@dataclass(frozen=True)
class Configuration:
    state: str
    a: int = 0
    b: int = 0
    c: int = 0

    def __post_init__(self):
        if min(self.a, self.b, self.c) < 0:
            raise ValueError("counters must be non-negative")

    def get(self, r: str) -> int:
        return getattr(self, r)

    def bump(self, r: str, delta: int) -> "Configuration":
        return replace(self, **{r: getattr(self, r) + delta})

    def __str__(self):
        return f"<{self.state},{self.a},{self.b},{self.c}>"


@dataclass(frozen=True)
class Machine:
    """``states`` lists every state in order of first mention in the source."""
    states: tuple
    start: str
    final: str
    instructions: tuple

    @property
    def program(self) -> dict:
        return {i.state: i for i in self.instructions}

    def __str__(self):
        lines = [f"start {self.start}"] + [str(i) for i in self.instructions]
        lines.append(f"final {self.final}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class AtFinal:
    configuration: Configuration


@dataclass(frozen=True)
class Halted:
    steps: int
    configuration: Configuration


@dataclass(frozen=True)
class Circular:
    prefix: int
    period: int
    configuration: Configuration


@dataclass(frozen=True)
class Exceeded:
    bound: int


RunResult = Union[Halted, Circular, Exceeded]


def parse_machine(text: str) -> Machine:
    start = final = None
    instructions: list[Instruction] = []
    order: list[str] = []

    def mention(name, lineno):
        if not _STATE_RE.match(name):
            raise MachineError(f"line {lineno}: bad state name {name!r}")
        if name not in order:
            order.append(name)

    def register(r, lineno):
        if r not in REGISTERS:
            raise MachineError(f"line {lineno}: unknown register {r!r}")
        return r

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        kw, args = words[0], words[1:]
        if kw in ("start", "final"):
            if len(args) != 1:
                raise MachineError(f"line {lineno}: '{kw} <state>' expected")
            if (start if kw == "start" else final) is not None:
                raise MachineError(f"line {lineno}: repeated '{kw}' line")
            mention(args[0], lineno)
            if kw == "start":
                start = args[0]
            else:
                final = args[0]
        elif kw == "inc":
            if len(args) != 3:
                raise MachineError(f"line {lineno}: 'inc <p> <r> <q>' expected")
            mention(args[0], lineno)
            mention(args[2], lineno)
            instructions.append(Inc(args[0], register(args[1], lineno), args[2]))
        elif kw == "jzdec":
            if len(args) != 4:
                raise MachineError(f"line {lineno}: 'jzdec <p> <r> <q0> <q1>' expected")
            for s in (args[0], args[2], args[3]):
                mention(s, lineno)
            instructions.append(Jzdec(args[0], register(args[1], lineno), args[2], args[3]))
        else:
            raise MachineError(f"line {lineno}: unknown directive {kw!r}")

    if start is None:
        raise MachineError("missing 'start' line")
    if final is None:
        raise MachineError("missing 'final' line")
    return make_machine(order, start, final, instructions)


def make_machine(states, start, final, instructions) -> Machine:
    states = list(dict.fromkeys(list(states) + [start, final]))
    seen = set()
    for ins in instructions:
        if ins.state in seen:
            raise MachineError(f"duplicate instruction for state {ins.state!r}")
        seen.add(ins.state)
    idle = [s for s in states if s not in seen]
    if len(idle) != 1:
        raise MachineError("exactly one state must lack an instruction, found "
                           + (", ".join(idle) if idle else "none"))
    if idle[0] != final:
        raise MachineError(f"state {idle[0]!r} has no instruction but is not final")
    return Machine(tuple(states), start, final, tuple(instructions))


def step(m: Machine, c: Configuration) -> Union[Configuration, AtFinal]:
    if c.state not in m.states:
        raise MachineError(f"unknown state {c.state!r}")
    if c.state == m.final:
        return AtFinal(c)
    ins = m.program[c.state]
    if isinstance(ins, Inc):
        return replace(c.bump(ins.register, 1), state=ins.next)
    if c.get(ins.register) == 0:
        return replace(c, state=ins.if_zero)
    return replace(c.bump(ins.register, -1), state=ins.if_nonzero)


def run(m: Machine, x: int, max_steps: int) -> tuple[list[Configuration], RunResult]:
    """Trace from the start configuration on input x, with its terminal status."""
    c = Configuration(m.start, x, 0, 0)
    trace = [c]
    for n in range(max_steps):
        nxt = step(m, c)
        if isinstance(nxt, AtFinal):
            return trace, Halted(n, c)
        c = nxt
        trace.append(c)
    if c.state == m.final:
        return trace, Halted(max_steps, c)
    return trace, Exceeded(max_steps)


def classify(m: Machine, x: int, max_steps: int = 10_000) -> RunResult:
    c = Configuration(m.start, x, 0, 0)
    seen = {c: 0}
    for n in range(max_steps):
        nxt = step(m, c)
        if isinstance(nxt, AtFinal):
            return Halted(n, c)
        c = nxt
        if c in seen:
            return Circular(seen[c], n + 1 - seen[c], c)
        seen[c] = n + 1
    if c.state == m.final:
        return Halted(max_steps, c)
    return Exceeded(max_steps)


def can_perform_k_steps(m: Machine, c: Configuration, k: int) -> bool:
    for _ in range(k):
        nxt = step(m, c)
        if isinstance(nxt, AtFinal):
            return False
        c = nxt
    return True
