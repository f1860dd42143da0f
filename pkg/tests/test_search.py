import itertools
import random

import pytest

from commact.calculus import Calculus, check
from commact.formula import Dot, Sequent, Var, parse_sequent
from commact.minsky import Configuration
from commact.encoding import k_step_sequent, target_sequent
from commact.proof import has_cut
from commact.search import (BudgetExceeded, Derivable, NotDerivable, Prover,
                            Refused, decide, decide_bool)

from helpers import encoded, invertible_instances, random_sequent


def test_identity():
    res = decide(parse_sequent("p |- p"))
    assert isinstance(res, Derivable)
    assert res.proof.rule == "Id"


def test_four_step_example():
    em = encoded("ex4")
    res = decide(k_step_sequent(em, Configuration("p"), 4))
    assert isinstance(res, Derivable)
    assert check(res.proof, Calculus.OMEGA_FIN)


def test_star_in_antecedent_refused():
    em = encoded("zero_loop")
    res = decide(target_sequent(em, 0))
    assert isinstance(res, Refused) and res.reason == "negative-star-present"
    assert decide_bool(target_sequent(em, 0)) is None


def test_distinct_variables():
    assert isinstance(decide(parse_sequent("p |- q")), NotDerivable)


@pytest.mark.parametrize("text,expected", [
    ("q, a |- q . a", True),
    ("a, b |- a . a", False),
    ("|- a^*", True),
    ("|- 0", False),
    ("0, p |- q", True),
    ("|- 1", True),
    ("p |- 1", False),
    ("1, p |- p", True),
    ("a, a, a |- a^*", True),
    ("a, b |- (a \\/ b)^*", True),
    ("a, b |- a^*", False),
    ("p -o q, p |- q", True),
    ("p -o q |- q", False),
    ("p /\\ q |- q /\\ p", True),
    ("p \\/ q |- q \\/ p", True),
    ("p . q |- q . p", True),
    ("p |- p . p", False),
    ("p, p |- p", False),
    ("|- p -o p", True),
    ("p -o (q -o r) |- q -o (p -o r)", True),
    ("(p \\/ q) . r |- p . r \\/ q . r", True),
    ("p . r \\/ q . r |- (p \\/ q) . r", True),
    ("p /\\ (q \\/ r) |- p /\\ q \\/ p /\\ r", False),
])
def test_small_sequents(text, expected):
    s = parse_sequent(text)
    assert decide_bool(s) is expected
    res = decide(s)
    assert isinstance(res, Derivable) is expected


def test_stats_reported():
    res = decide(parse_sequent("a, a, b |- a^* . b"))
    st = res.stats
    assert st.nodes_expanded > 0 and st.memo_hits >= 0 and st.max_depth >= 0 and st.elapsed >= 0


def test_agreement_and_proofs_on_random_sequents():
    rng = random.Random(2024)
    shared = Prover(emit_proof=False)
    derivable = 0
    for _ in range(1000):
        s = random_sequent(rng)
        res = decide(s)
        assert decide_bool(s) == isinstance(res, Derivable)
        assert decide_bool(s, shared) == isinstance(res, Derivable)
        if isinstance(res, Derivable):
            derivable += 1
            assert res.proof.conclusion == s
            assert not has_cut(res.proof)
            assert check(res.proof, Calculus.OMEGA_FIN), s
    assert 100 < derivable < 900


def test_focused_engine_matches_plain_engine():
    rng = random.Random(99)
    for _ in range(400):
        s = random_sequent(rng, depth=3, max_ante=3)
        plain = Prover(emit_proof=False, strategy="plain")
        focused = Prover(emit_proof=False)
        assert bool(plain.prove(s)) == bool(focused.prove(s)), s


def test_plain_engine_emits_valid_proofs():
    rng = random.Random(17)
    for _ in range(100):
        s = random_sequent(rng, depth=2, max_ante=3)
        res = decide(s, prover=Prover(strategy="plain"))
        if isinstance(res, Derivable):
            assert check(res.proof, Calculus.OMEGA_FIN)


def test_unknown_strategy():
    with pytest.raises(ValueError):
        Prover(strategy="guess")


def test_permutation_invariance():
    rng = random.Random(8)
    for _ in range(60):
        s = random_sequent(rng, max_ante=4)
        expected = decide_bool(s)
        for perm in itertools.islice(itertools.permutations(s.antecedent), 5):
            assert decide_bool(Sequent(perm, s.succedent)) == expected


def _derivable_pairs(count):
    rng = random.Random(31)
    prover = Prover(emit_proof=False)
    pool = []
    while len(pool) < 2 * count:
        s = random_sequent(rng, depth=2, max_ante=2, zero=False)
        if decide_bool(s, prover):
            pool.append(s)
    return list(zip(pool[::2], pool[1::2]))


def test_monotone_closure_under_product():
    pairs = _derivable_pairs(50)
    assert len(pairs) == 50
    for g, d in pairs:
        joined = Sequent(list(g.antecedent) + list(d.antecedent), Dot(g.succedent, d.succedent))
        assert decide_bool(joined), (g, d)


def test_debug_mode_checks_rank():
    rng = random.Random(4)
    for _ in range(100):
        s = random_sequent(rng)
        assert isinstance(decide(s, debug=True), (Derivable, NotDerivable))


def test_left_rules_invertible():
    prover = Prover(emit_proof=False)
    for concl, prems in invertible_instances(random.Random(6), 60, prover):
        for s in prems:
            assert decide_bool(s, prover), (concl, s)


def test_budget_exceeded():
    em = encoded("ex4")
    prover = Prover(emit_proof=False, deadline=0.0)
    with pytest.raises(BudgetExceeded):
        prover.prove(k_step_sequent(em, Configuration("p", 2, 2, 2), 3))


def test_refuses_negative_star_in_prove():
    with pytest.raises(ValueError):
        Prover().prove(parse_sequent("a^* |- a"))


def test_negative_star_through_implication():
    assert isinstance(decide(parse_sequent("|- a^* -o a")), Refused)
    assert decide_bool(parse_sequent("(a^* -o b), a |- b")) is not None
    assert decide_bool(Sequent([Var("a")], Var("a"))) is True
