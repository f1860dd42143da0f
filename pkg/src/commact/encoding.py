"""Encoding counter machines as sequents, and synthesizing derivations from
machine runs.

For a machine M the formula E packs the dummy formulas ``z_r -o z_r`` and one
formula per instruction into a conjunction; D describes acceptable final
configurations.  ``E^k, p, a^x, b^y, c^z |- D`` is derivable exactly when M
can make k steps from ``<p,x,y,z>``, and ``E^*, q_start, a^x |- D`` is
derivable in CommACT when the run on x is circular.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from .formula import (Dot, Formula, Imp, Sequent, Star, Var, Vee, Wedge,
                      big_dot, big_vee, big_wedge, power)
from .minsky import (REGISTERS, AtFinal, Circular, Configuration, Inc, Jzdec,
                     Machine, can_perform_k_steps, classify, step)
from .proof import Backlink, Derivation
from .schemas import (cut, derived_star_left, dot_left, dot_right, ident,
                      imp_left, kleene_split_schema, mk, to_circ, to_commact,
                      vee_into, wedge_from)

__all__ = [
    "EncodingError", "EncodedMachine", "instruction_formula", "encode",
    "target_sequent", "k_step_sequent", "synth_k_step", "synth_circular",
    "synth_circular_circ", "zero_check_commact", "zero_check_circ",
]

RESERVED = frozenset(REGISTERS) | {f"z_{r}" for r in REGISTERS}


class EncodingError(ValueError):
    pass


def _zvar(r: str) -> Var:
    return Var(f"z_{r}")


def instruction_formula(ins) -> Formula:
    p = Var(ins.state)
    r = Var(ins.register)
    if isinstance(ins, Inc):
        return Imp(p, Dot(Var(ins.next), r))
    if isinstance(ins, Jzdec):
        return Wedge(Imp(Dot(p, r), Var(ins.if_nonzero)),
                     Imp(p, Vee(Var(ins.if_zero), _zvar(ins.register))))
    raise TypeError(f"not an instruction: {ins!r}")


@dataclass(frozen=True)
class EncodedMachine:
    machine: Machine
    E: Formula
    D: Formula
    z: dict          # register -> z variable
    dummies: dict    # register -> z_r -o z_r
    states: dict     # state name -> variable
    Q: Formula       # disjunction of all states
    Z: Formula       # the three zero-check disjuncts of D
    zero_disjuncts: dict  # register -> its disjunct of D

    def var(self, state: str) -> Var:
        return self.states[state]

    def config_items(self, c: Configuration) -> list:
        return [self.states[c.state]] + [Var(r) for r in REGISTERS for _ in range(c.get(r))]


def encode(m: Machine) -> EncodedMachine:
    clash = RESERVED & set(m.states)
    if clash:
        raise EncodingError("state names collide with reserved variables: "
                            + ", ".join(sorted(clash)))
    z = {r: _zvar(r) for r in REGISTERS}
    dummies = {r: Imp(z[r], z[r]) for r in REGISTERS}
    E = big_wedge([dummies[r] for r in REGISTERS]
                  + [instruction_formula(i) for i in m.instructions])
    stars = {r: Star(Var(r)) for r in REGISTERS}
    states = {s: Var(s) for s in m.states}
    Q = big_vee(states.values())
    zero = {r: big_dot([stars[o] for o in REGISTERS if o != r] + [z[r]]) for r in REGISTERS}
    Z = big_vee(zero[r] for r in REGISTERS)
    D = Vee(big_dot([stars[r] for r in REGISTERS] + [Q]), Z)
    return EncodedMachine(m, E, D, z, dummies, states, Q, Z, zero)


def target_sequent(em: EncodedMachine, x: int) -> Sequent:
    if x < 0:
        raise ValueError("input must be non-negative")
    return Sequent([Star(em.E), em.var(em.machine.start)] + [Var("a")] * x, em.D)


def k_step_sequent(em: EncodedMachine, c: Configuration, k: int) -> Sequent:
    if k < 0:
        raise ValueError("k must be non-negative")
    return Sequent([em.E] * k + em.config_items(c), em.D)


# -- building blocks --------------------------------------------------------

def _star_of(r: str, n: int) -> Derivation:
    """``r^n |- r^*`` by a single *R_n."""
    v = Var(r)
    return mk("StarRN", [v] * n, Star(v), *[ident(v) for _ in range(n)])


def _accept(em: EncodedMachine, c: Configuration) -> Derivation:
    """``p, a^x, b^y, c^z |- D`` through the first disjunct of D."""
    parts = [_star_of(r, c.get(r)) for r in REGISTERS]
    parts.append(vee_into(ident(em.var(c.state)), em.Q))
    return vee_into(dot_right(parts), em.D)


def _zero_leaf(em: EncodedMachine, r: str, c: Configuration, goal: Formula) -> Derivation:
    """``z_r, <other registers> |- goal`` through the disjunct for register r."""
    if c.get(r):
        raise EncodingError(f"register {r} is not zero in {c}")
    parts = [_star_of(o, c.get(o)) for o in REGISTERS if o != r] + [ident(em.z[r])]
    return vee_into(dot_right(parts), goal)


def _drain(em: EncodedMachine, r: str, m: int, d: Derivation) -> Derivation:
    """Absorb m copies of E into a proof whose antecedent holds z_r, using the
    dummy formula ``z_r -o z_r`` each time."""
    n = em.dummies[r]
    for _ in range(m):
        d = wedge_from(imp_left(n, ident(em.z[r]), d), n, em.E)
    return d


def _next_config(c: Configuration, ins) -> Configuration:
    if isinstance(ins, Inc):
        return Configuration(ins.next, *_regs_bump(c, ins.register, 1))
    if c.get(ins.register) == 0:
        return Configuration(ins.if_zero, c.a, c.b, c.c)
    return Configuration(ins.if_nonzero, *_regs_bump(c, ins.register, -1))


def _regs_bump(c, r, delta):
    return tuple(c.get(o) + (delta if o == r else 0) for o in REGISTERS)


def _one_step(em: EncodedMachine, c: Configuration, cont: Derivation,
              zero: Optional[Derivation]) -> Derivation:
    """One instruction from c, consuming one copy of E.

    ``cont`` proves ``X, <next configuration> |- G``; for a zero test on an
    empty register ``zero`` proves ``X, z_r, <registers> |- G``.  The result
    proves ``X, E, <c> |- G``.
    """
    ins = em.machine.program[c.state]
    p = em.var(c.state)
    r = Var(ins.register)
    a = instruction_formula(ins)
    if isinstance(ins, Inc):
        body = dot_left(cont, [em.var(ins.next), r])
        return wedge_from(imp_left(a, ident(p), body), a, em.E)
    if c.get(ins.register):
        dec = a.lhs
        return wedge_from(imp_left(dec, dot_right([ident(p), ident(r)]), cont), dec, em.E)
    test = a.rhs
    fork = test.rhs
    c1 = cont.conclusion
    ante = list(c1.antecedent)
    ante.remove(fork.lhs)
    body = mk("VeeL", ante + [fork], c1.succedent, cont, zero)
    return wedge_from(imp_left(test, ident(p), body), test, em.E)


def _run_block(em: EncodedMachine, c: Configuration, k: int,
               leaf: Callable[[Configuration], Derivation], goal: Formula) -> Derivation:
    """``E^k, <c> |- goal`` following k machine steps from c; ``leaf`` closes the
    configuration reached after k steps."""
    if k == 0:
        return leaf(c)
    ins = em.machine.program[c.state]
    nxt = _next_config(c, ins)
    cont = _run_block(em, nxt, k - 1, leaf, goal)
    zero = None
    if isinstance(ins, Jzdec) and c.get(ins.register) == 0:
        zero = _drain(em, ins.register, k - 1, _zero_leaf(em, ins.register, c, goal))
    return _one_step(em, c, cont, zero)


def synth_k_step(em: EncodedMachine, c: Configuration, k: int) -> Derivation:
    """Cut-free derivation of ``E^k, <c> |- D`` in the finite omega calculus."""
    if not can_perform_k_steps(em.machine, c, k):
        raise EncodingError(f"machine cannot perform {k} steps from {c}")
    return _run_block(em, c, k, lambda cfg: _accept(em, cfg), em.D)


# -- circular runs ----------------------------------------------------------

def _circular_run(em: EncodedMachine, x: int, max_steps: int):
    res = classify(em.machine, x, max_steps)
    if not isinstance(res, Circular):
        raise EncodingError(f"run on input {x} is not circular ({type(res).__name__})")
    c = Configuration(em.machine.start, x, 0, 0)
    trace = [c]
    for _ in range(res.prefix + res.period):
        c = step(em.machine, c)
        trace.append(c)
    assert trace[res.prefix] == trace[-1]
    return trace, res.prefix, res.period


def zero_check_commact(em: EncodedMachine, r: str, c: Configuration) -> Derivation:
    """``E^*, z_r, <registers of c> |- D`` in CommACT (register r is zero).

    *L_ind with the invariant ``(z_r . <registers>) -o D``: each copy of E is
    spent on the dummy formula for r.
    """
    regs = [Var(o) for o in REGISTERS for _ in range(c.get(o))]
    items = [em.z[r]] + regs
    packed = big_dot(items)
    inv = Imp(packed, em.D)
    leaf = to_commact(_zero_leaf(em, r, c, em.D))
    base = mk("ImpR", [], inv, dot_left(leaf, items))
    # inv, z_r, regs |- D
    use = imp_left(inv, dot_right([ident(f) for f in items]), ident(em.D))
    n = em.dummies[r]
    spent = wedge_from(imp_left(n, ident(em.z[r]), use), n, em.E)
    step_ = mk("ImpR", [em.E, inv], inv, dot_left(spent, items))
    ind = mk("StarLInd", [Star(em.E)], inv, base, step_)
    return cut(ind, use)


def zero_check_circ(em: EncodedMachine, r: str, c: Configuration, label: str) -> Derivation:
    """The same sequent as a circular proof: a *L whose right premise spends E
    on the dummy formula and loops back."""
    regs = [Var(o) for o in REGISTERS for _ in range(c.get(o))]
    s = Star(em.E)
    ante = [s, em.z[r]] + regs
    concl = Sequent(ante, em.D)
    back = Backlink(label, concl)
    n = em.dummies[r]
    right = wedge_from(imp_left(n, ident(em.z[r]), back), n, em.E)
    left = to_circ(_zero_leaf(em, r, c, em.D))
    return mk("StarL2", ante, em.D, left, right, label=label)


def _packed(em: EncodedMachine, c: Configuration) -> Formula:
    return big_dot(em.config_items(c))


def synth_circular(em: EncodedMachine, x: int, max_steps: int = 10_000) -> Derivation:
    """CommACT derivation of ``E^*, q_start, a^x |- D`` for a circular run.

    The loop is handled by induction over blocks of E whose length is the
    period.  The invariant is ``G = <loop configuration> \\/ Z`` where Z holds
    the zero-check disjuncts of D: a block of steps either returns to the loop
    configuration or ends in a zero-check thread.
    """
    trace, mu, period = _circular_run(em, x, max_steps)
    E, D = em.E, em.D
    loop = trace[mu]
    items = em.config_items(loop)
    packed = _packed(em, loop)
    G = Vee(packed, em.Z)
    k = period
    block = power(E, k)

    def z_branches(goal: Formula, copies: int) -> Derivation:
        # E^copies, Z |- goal by cases over the zero-check disjuncts
        def one(r):
            zr = em.zero_disjuncts[r]
            parts = [Star(Var(o)) for o in REGISTERS if o != r] + [em.z[r]]
            closed = vee_into(dot_right([ident(f) for f in parts]), goal)
            return dot_left(_drain(em, r, copies, closed), parts)
        d = one(REGISTERS[-1])
        for i in range(len(REGISTERS) - 2, -1, -1):
            head = big_vee(em.zero_disjuncts[o] for o in REGISTERS[i:])
            left = one(REGISTERS[i])
            ante = list(left.conclusion.antecedent)
            ante.remove(em.zero_disjuncts[REGISTERS[i]])
            d = mk("VeeL", ante + [head], goal, left, d)
        return d

    def cases_on_g(main: Derivation, copies: int, goal: Formula) -> Derivation:
        # E^copies, G |- goal from E^copies, <loop> |- goal
        left = dot_left(main, items)
        right = z_branches(goal, copies)
        ante = list(left.conclusion.antecedent)
        ante.remove(packed)
        return mk("VeeL", ante + [G], goal, left, right)

    # block, G |- G
    back_to_loop = vee_into(dot_right([ident(f) for f in items]), G)

    def loop_leaf(cfg):
        assert cfg == loop
        return back_to_loop

    thread = to_commact(_run_block(em, loop, k, loop_leaf, G))
    tg = dot_left(cases_on_g(thread, k, G), [E] * k)

    # block^* |- G -o G
    gg = Imp(G, G)
    apply_gg = imp_left(gg, ident(G), ident(G))
    base = mk("ImpR", [], gg, ident(G))
    step_ = mk("ImpR", [block, gg], gg, cut(tg, apply_gg))
    ind = mk("StarLInd", [Star(block)], gg, base, step_)

    # S, G -o G, <loop> |- D with S the disjunction of E^i, i < k
    split = kleene_split_schema(E, k)
    head = split.conclusion.succedent.lhs
    branches = []
    for i in range(k):
        main = to_commact(synth_k_step(em, loop, i))
        body = dot_left(cases_on_g(main, i, D), [E] * i)
        branches.append(imp_left(gg, back_to_loop, body))
    disjuncts = [power(E, i) for i in range(k)]
    rest = items + [gg]
    d = branches[-1]
    for i in range(k - 2, -1, -1):
        d = mk("VeeL", rest + [big_vee(disjuncts[i:])], D, branches[i], d)
    tail = Star(block)
    # S, block^*, <loop> |- D
    used = cut(ind, d)
    unpacked = dot_left(used, [head, tail])
    proof = cut(split, unpacked)

    # prefix: walk back from the loop configuration with derived *L
    for j in range(mu - 1, -1, -1):
        c = trace[j]
        ins = em.machine.program[c.state]
        zero = None
        if isinstance(ins, Jzdec) and c.get(ins.register) == 0:
            zero = zero_check_commact(em, ins.register, c)
        p2 = _one_step(em, c, proof, zero)
        p1 = to_commact(_accept(em, c))
        proof = derived_star_left(em.config_items(c), E, D, p1, p2)
    return proof


def synth_circular_circ(em: EncodedMachine, x: int, max_steps: int = 10_000) -> Derivation:
    """Circular derivation of the same sequent: one two-premise *L per machine
    step, with a backlink where the run revisits its loop configuration."""
    trace, mu, period = _circular_run(em, x, max_steps)
    E, D = em.E, em.D
    s = Star(E)
    label = "loop"
    counter = [0]

    def node_at(j: int) -> Derivation:
        c = trace[j]
        ante = [s] + em.config_items(c)
        if j == mu + period:
            return Backlink(label, Sequent(ante, D))
        ins = em.machine.program[c.state]
        zero = None
        if isinstance(ins, Jzdec) and c.get(ins.register) == 0:
            counter[0] += 1
            zero = zero_check_circ(em, ins.register, c, f"zero{counter[0]}")
        right = _one_step(em, c, node_at(j + 1), zero)
        left = to_circ(_accept(em, c))
        return mk("StarL2", ante, D, left, right, label=label if j == mu else None)

    return node_at(0)
