"""Shared fixtures for the test suite: machine corpus, random formulas, and the
proof corpora used by several test modules."""

from __future__ import annotations

import random
from functools import lru_cache
from pathlib import Path

from hypothesis import strategies as st

from commact.calculus import Calculus
from commact.encoding import (encode, synth_circular, synth_circular_circ,
                              synth_k_step, target_sequent)
from commact.formula import (ONE, ZERO, Dot, Imp, Sequent, Star, Var, Vee,
                             Wedge, parse_formula, parse_sequent)
from commact.minsky import Configuration, can_perform_k_steps, parse_machine
from commact.proof import loads
from commact.schemas import (cut, derived_star_left, dot_left, dot_right,
                             ident, imp_left, kleene_split_schema, mk,
                             star_unfold_schema, vee_into)
from commact.search import decide

DATA = Path(__file__).parent / "data"
MACHINES = DATA / "machines"
GOLDEN = DATA / "golden"

MACHINE_NAMES = ["ex4", "zero_loop", "inc_loop", "halting", "transfer", "bc_tests", "prefix_zero"]
CIRCULAR = [("zero_loop", 0), ("zero_loop", 2), ("ex4", 0), ("ex4", 1),
            ("bc_tests", 0), ("bc_tests", 1), ("prefix_zero", 1)]


@lru_cache(maxsize=None)
def machine(name: str):
    return parse_machine((MACHINES / f"{name}.mm").read_text())


@lru_cache(maxsize=None)
def encoded(name: str):
    return encode(machine(name))


def configs(m, max_counter=2, states=None):
    r = range(max_counter + 1)
    for s in (m.states if states is None else states):
        for a in r:
            for b in r:
                for c in r:
                    yield Configuration(s, a, b, c)


# -- random formulas --------------------------------------------------------

ATOMS = [Var("p"), Var("q"), Var("r"), ONE, ZERO]


def random_formula(rng: random.Random, depth: int, positive: bool = True,
                   stars: bool = True, zero: bool = True):
    """Random formula; with ``positive`` False no star lands in a positive
    position of an antecedent formula (so sequents stay search-friendly)."""
    atoms = ATOMS if zero else ATOMS[:4]
    if depth == 0 or rng.random() < 0.3:
        return rng.choice(atoms)
    kinds = ["imp", "dot", "vee", "wedge"] + (["star"] if stars and positive else [])
    k = rng.choice(kinds)
    if k == "star":
        return Star(random_formula(rng, depth - 1, positive, stars, zero))
    if k == "imp":
        return Imp(random_formula(rng, depth - 1, not positive, stars, zero),
                   random_formula(rng, depth - 1, positive, stars, zero))
    cls = {"dot": Dot, "vee": Vee, "wedge": Wedge}[k]
    return cls(random_formula(rng, depth - 1, positive, stars, zero),
               random_formula(rng, depth - 1, positive, stars, zero))


def random_sequent(rng: random.Random, depth: int = 3, max_ante: int = 4,
                   zero: bool = True) -> Sequent:
    """Random sequent without negative stars."""
    while True:
        s = Sequent([random_formula(rng, depth, False, zero=zero)
                     for _ in range(rng.randint(0, max_ante))],
                    random_formula(rng, depth, True, zero=zero))
        if not s.has_negative_star():
            return s


_names = st.sampled_from(["p", "q", "r", "a", "b", "z_a", "qS1"])


def formulas(max_leaves: int = 12):
    """Hypothesis strategy for arbitrary formulas."""
    leaves = st.one_of(_names.map(Var), st.just(ONE), st.just(ZERO))
    return st.recursive(
        leaves,
        lambda kids: st.one_of(
            st.builds(Imp, kids, kids), st.builds(Dot, kids, kids),
            st.builds(Vee, kids, kids), st.builds(Wedge, kids, kids),
            st.builds(Star, kids)),
        max_leaves=max_leaves)


# -- corpora ----------------------------------------------------------------

def _pf(t):
    return parse_formula(t)


def _packed_cut(em, cfg, k):
    """Cut a k-step proof through the implication ``(E^k . <cfg>) -o D``."""
    proof = synth_k_step(em, cfg, k)
    items = list(proof.conclusion.antecedent)
    packed = dot_right([ident(f) for f in items]).conclusion.succedent
    imp = Imp(packed, em.D)
    left = mk("ImpR", [], imp, dot_left(proof, items))
    right = imp_left(imp, dot_right([ident(f) for f in items]), ident(em.D))
    return cut(left, right)


def cut_corpus() -> list:
    """Finite omega-calculus proofs containing Cut: hand-built cases covering
    each principal reduction and commutation, plus assemblies around
    synthesized machine proofs."""
    p, q, a, b = (Var(x) for x in "pqab")
    out = []
    out.append(cut(ident(p), ident(p)))
    qa = Dot(q, a)
    out.append(cut(mk("DotR", [q, a], qa, ident(q), ident(a)), ident(qa)))
    pp = Imp(p, p)
    out.append(cut(mk("ImpR", [], pp, ident(p)), imp_left(pp, ident(p), ident(p))))
    s = Star(a)
    out.append(cut(mk("StarRN", [a], s, ident(a)),
                   mk("DotR", [s, b], Dot(s, b), ident(s), ident(b))))
    pq, qp = Vee(p, q), Vee(q, p)
    swap = mk("VeeL", [pq], qp, vee_into(ident(p), qp), vee_into(ident(q), qp))
    out.append(cut(vee_into(ident(p), pq), swap))
    out.append(cut(vee_into(ident(q), pq), swap))
    w = Wedge(p, pq)
    out.append(cut(mk("WedgeR", [p], w, ident(p), vee_into(ident(p), pq)),
                   mk("WedgeL2", [w], pq, ident(pq))))
    out.append(cut(mk("OneR", [], ONE), mk("OneL", [ONE, p], p, ident(p))))
    dq = Dot(p, q)
    out.append(cut(mk("DotL", [dq], Dot(q, p), mk("DotR", [p, q], Dot(q, p), ident(q), ident(p))),
                   mk("DotR", [Dot(q, p), a], Dot(Dot(q, p), a), ident(Dot(q, p)), ident(a))))
    out.append(cut(mk("ZeroL", [ZERO], p), mk("DotR", [p, q], dq, ident(p), ident(q))))
    out.append(cut(mk("DotR", [p, q], dq, ident(p), ident(q)),
                   mk("ZeroL", [dq, ZERO], q)))
    two = mk("StarRN", [a, a], s, ident(a), ident(a))
    out.append(cut(two, mk("DotR", [s], Dot(s, ONE), ident(s), mk("OneR", [], ONE))))
    out.append(cut(two, mk("StarRN", [s, b], Star(Vee(s, b)),
                           vee_into(ident(s), Vee(s, b)), vee_into(ident(b), Vee(s, b)))))
    pqd = Imp(p, Dot(p, q))
    out.append(cut(mk("ImpR", [q], pqd, mk("DotR", [p, q], Dot(p, q), ident(p), ident(q))),
                   imp_left(pqd, ident(p), ident(Dot(p, q)))))
    # a cut whose left premise itself contains a cut
    inner = cut(ident(p), vee_into(ident(p), pq))
    out.append(cut(inner, swap))
    # cut into the left premise of -oL and into a *R_n part
    out.append(cut(ident(q), imp_left(Imp(q, p), ident(q), ident(p))))
    out.append(cut(mk("DotR", [p, q], dq, ident(p), ident(q)),
                   mk("StarRN", [dq, a], Star(Vee(dq, a)),
                      vee_into(ident(dq), Vee(dq, a)), vee_into(ident(a), Vee(dq, a)))))
    # machine proofs cut through packed implications
    for name, cfg, k in [("ex4", Configuration("p"), 4), ("ex4", Configuration("q", 1), 2),
                         ("zero_loop", Configuration("qs"), 2), ("transfer", Configuration("qs", 2), 3),
                         ("bc_tests", Configuration("qs", 0, 1, 0), 3),
                         ("bc_tests", Configuration("q3", 0, 0, 1), 2)]:
        out.append(_packed_cut(encoded(name), cfg, k))
    # a search-produced proof cut against a disjunction injection
    em = encoded("ex4")
    found = decide(Sequent([em.E, em.E, Var("p")], em.D)).proof
    out.append(cut(found, vee_into(ident(em.D), Vee(em.D, p))))
    return out


def golden_corpus() -> list:
    """(name, derivation, calculus) triples whose conclusions must hold in every
    action lattice."""
    out = []
    for i, d in enumerate(cut_corpus()):
        out.append((f"cut{i}", d, Calculus.OMEGA_FIN))
    for name in MACHINE_NAMES:
        m = machine(name)
        em = encoded(name)
        for cfg in [Configuration(m.start), Configuration(m.start, 1, 1, 0)]:
            for k in range(4):
                if can_perform_k_steps(m, cfg, k):
                    out.append((f"{name}-{cfg}-k{k}", synth_k_step(em, cfg, k), Calculus.OMEGA_FIN))
    for name, x in CIRCULAR:
        em = encoded(name)
        out.append((f"{name}-x{x}", synth_circular(em, x), Calculus.COMMACT))
        out.append((f"{name}-x{x}-circ", synth_circular_circ(em, x), Calculus.CIRC))
    for f in ["p", "1", "p . q", "p -o q"]:
        out.append((f"unfold {f}", star_unfold_schema(_pf(f)), Calculus.COMMACT))
    for k in (1, 2, 3):
        out.append((f"split a {k}", kleene_split_schema(Var("a"), k), Calculus.COMMACT))
    out.append(("derived *L", _derived_example(), Calculus.COMMACT))
    for path in sorted(GOLDEN.glob("*.proof")):
        calc, d = loads(path.read_text())
        out.append((path.name, d, calc))
    return out


def _derived_example():
    q, a = Var("q"), Var("a")
    s = Star(a)
    goal = Dot(q, s)
    p1 = mk("DotR", [q], goal, ident(q), mk("StarR0", [], s))
    # q, a^*, a |- q . a^*
    p2 = mk("DotR", [q, s, a], goal, ident(q), mk("StarRInd", [a, s], s))
    return derived_star_left([q], a, goal, p1, p2)


def parse(text: str) -> Sequent:
    return parse_sequent(text)


# -- random rule instances --------------------------------------------------

PREMISED_RULES = ["OneL", "ImpL", "ImpR", "DotL", "DotR", "VeeL", "VeeR1", "VeeR2",
                  "WedgeL1", "WedgeL2", "WedgeR", "StarRN"]


def random_rule_instance(rng: random.Random, depth: int = 3):
    """A correct instance of a rule with premises, built forwards from random
    parts: returns ``(rule, conclusion, premise sequents)``."""
    def f():
        return random_formula(rng, depth)

    def ctx(n=2):
        return [f() for _ in range(rng.randint(0, n))]

    rule = rng.choice(PREMISED_RULES)
    g, c = ctx(), f()
    A, B = f(), f()
    if rule == "OneL":
        return rule, Sequent(g + [ONE], c), [Sequent(g, c)]
    if rule == "ImpL":
        pi = ctx()
        return rule, Sequent(g + pi + [Imp(A, B)], c), [Sequent(pi, A), Sequent(g + [B], c)]
    if rule == "ImpR":
        return rule, Sequent(g, Imp(A, B)), [Sequent(g + [A], B)]
    if rule == "DotL":
        return rule, Sequent(g + [Dot(A, B)], c), [Sequent(g + [A, B], c)]
    if rule == "DotR":
        d = ctx()
        return rule, Sequent(g + d, Dot(A, B)), [Sequent(g, A), Sequent(d, B)]
    if rule == "VeeL":
        return rule, Sequent(g + [Vee(A, B)], c), [Sequent(g + [A], c), Sequent(g + [B], c)]
    if rule in ("VeeR1", "VeeR2"):
        part = A if rule == "VeeR1" else B
        return rule, Sequent(g, Vee(A, B)), [Sequent(g, part)]
    if rule in ("WedgeL1", "WedgeL2"):
        part = A if rule == "WedgeL1" else B
        return rule, Sequent(g + [Wedge(A, B)], c), [Sequent(g + [part], c)]
    if rule == "WedgeR":
        return rule, Sequent(g, Wedge(A, B)), [Sequent(g, A), Sequent(g, B)]
    parts = [[f() for _ in range(rng.randint(1, 2))] for _ in range(rng.randint(1, 3))]
    return rule, Sequent([x for p in parts for x in p], Star(A)), [Sequent(p, A) for p in parts]


def mutate_conclusion(s: Sequent, rng: random.Random, fresh: str = "mutant") -> Sequent:
    """Rename one variable occurrence of s to a fresh name (s must contain a
    variable)."""
    slots = list(s.antecedent) + [s.succedent]
    spots = [(i, k) for i, g in enumerate(slots) for k in range(_count_vars(g))]
    i, k = rng.choice(spots)
    slots[i] = _rename_nth(slots[i], k, Var(fresh))[0]
    return Sequent(slots[:-1], slots[-1])


def _count_vars(g) -> int:
    if isinstance(g, Var):
        return 1
    return sum(_count_vars(c) for c in g.children)


def _rename_nth(g, k, new):
    if isinstance(g, Var):
        return (new if k == 0 else g), k - 1
    if not g.children:
        return g, k
    kids = []
    for ch in g.children:
        ch, k = _rename_nth(ch, k, new)
        kids.append(ch)
    return type(g)(*kids), k


def invertible_instances(rng: random.Random, count: int, prover=None):
    """``count`` derivable sequents with a disjunction or product in the
    antecedent, paired with the premises of the left rule on it."""
    from commact.search import Prover, decide_bool
    prover = prover or Prover(emit_proof=False)
    out = []
    while len(out) < count:
        s = random_sequent(rng, depth=3, max_ante=2, zero=False)
        a, b = random_formula(rng, 2, False, zero=False), random_formula(rng, 2, False, zero=False)
        principal = Vee(a, b) if rng.random() < 0.5 else Dot(a, b)
        concl = Sequent(list(s.antecedent) + [principal], s.succedent)
        if concl.has_negative_star() or not decide_bool(concl, prover):
            continue
        ctx = list(s.antecedent)
        if isinstance(principal, Vee):
            prems = [Sequent(ctx + [a], s.succedent), Sequent(ctx + [b], s.succedent)]
        else:
            prems = [Sequent(ctx + [a, b], s.succedent)]
        out.append((concl, prems))
    return out


def approximation_corpus() -> list:
    """Sequents with negative stars: hand-picked ones, machine targets, and
    seeded random ones."""
    rng = random.Random(21)
    out = [parse_sequent(t) for t in [
        "a^* |- a^*", "a^*, b |- b . a^*", "(a \\/ b)^* |- a^* . b^*", "a^* |- a",
        "a^* -o b |- b", "(a . a)^* |- a^*", "a^*, a^* |- a^*", "a^* |- 1",
    ]]
    for name in ["halting", "ex4", "zero_loop", "transfer"]:
        out += [target_sequent(encoded(name), x) for x in (0, 1)]
    while len(out) < 60:
        f, g = random_formula(rng, 2), random_formula(rng, 2)
        out.append(parse_sequent(f"{Star(f).text}, {g.text} |- {random_formula(rng, 3).text}"))
    return out


def reachable_states(m) -> list:
    """States reachable from the start state along the program graph."""
    seen, todo = [m.start], [m.start]
    prog = m.program
    while todo:
        ins = prog.get(todo.pop())
        if ins is None:
            continue
        nxt = [ins.next] if hasattr(ins, "next") else [ins.if_zero, ins.if_nonzero]
        for s in nxt:
            if s not in seen:
                seen.append(s)
                todo.append(s)
    return seen
