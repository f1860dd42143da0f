import pytest

from commact.calculus import Calculus, check
from commact.formula import ParseError, parse_sequent
from commact.proof import (Backlink, Inference, count_rule, dumps, has_cut,
                           height, loads, node, size, walk)

from helpers import golden_corpus


def _same_tree(x, y):
    if isinstance(x, Backlink):
        return (isinstance(y, Backlink) and x.target == y.target and x.label == y.label
                and x.conclusion == y.conclusion)
    return (isinstance(y, Inference) and x.rule == y.rule and x.conclusion == y.conclusion
            and x.cut_formula is y.cut_formula and x.label == y.label
            and len(x.premises) == len(y.premises)
            and all(_same_tree(a, b) for a, b in zip(x.premises, y.premises)))


def test_round_trip_golden_corpus():
    for name, d, calc in golden_corpus():
        text = dumps(d, calc)
        calc2, d2 = loads(text)
        assert calc2 is calc
        assert _same_tree(d, d2), name
        assert check(d2, calc), name


def test_minimal_file():
    calc, d = loads('(proof omega-fin (node Id "p |- p"))')
    assert calc is Calculus.OMEGA_FIN
    assert d.rule == "Id" and d.conclusion == parse_sequent("p |- p")


def test_cut_formula_and_labels():
    text = '''
    (proof circ
      (label top (node Cut "p |- p" (cutf "p")
        (node Id "p |- p")
        (back top "p |- p"))))
    '''
    calc, d = loads(text)
    assert calc is Calculus.CIRC
    assert d.label == "top" and d.cut_formula is not None
    assert isinstance(d.premises[1], Backlink) and d.premises[1].target == "top"


def test_comments_ignored():
    calc, d = loads('; a comment\n(proof commact (node StarRInd "a, a^* |- a^*")) ; trailing')
    assert check(d, calc)


@pytest.mark.parametrize("text", [
    "",
    "(proof omega-fin",
    "(proof omega-fin (node Id \"p |- p\")))",
    "(proof lk (node Id \"p |- p\"))",
    "(proof omega-fin (node Frob \"p |- p\"))",
    "(proof omega-fin (node Id p))",
    "(proof omega-fin (node Id \"p |-\"))",
    "(proof omega-fin (wrap Id \"p |- p\"))",
    "(proof omega-fin (node Id \"p |- p\")) (proof omega-fin (node Id \"p |- p\"))",
])
def test_malformed_files(text):
    with pytest.raises(ValueError):
        loads(text)


def test_parse_error_is_value_error():
    assert issubclass(ParseError, ValueError)


def test_tree_measures():
    d = node("DotR", "p, q |- p . q", node("Id", "p |- p"), node("Id", "q |- q"))
    assert size(d) == 3 and height(d) == 2
    assert count_rule(d, "Id") == 2 and not has_cut(d)
    assert [path for path, _ in walk(d)] == [(), (0,), (1,)]


def test_unknown_rule_rejected_by_constructor():
    with pytest.raises(ValueError):
        node("Weaken", "p |- p")
