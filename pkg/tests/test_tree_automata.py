# test_tree_automata.py
from dxd.document import validate
from dxd.schema import make_grammar
from dxd.tree_automata import (boolean_witness, determinize_uta, equivalent_grammar,
                               grammar_counterexample, grammar_includes, grammars_intersect,
                               normalize, to_uta)
from dxd.trees import parse_tree


def test_uta_of_grammar(eurostat_edtd):
    u = to_uta(eurostat_edtd)
    assert u.finals == {"eurostat"}
    assert u.states_for("nationalIndex") == ["nationalIndex#A", "nationalIndex#B"]


def test_determinized_subsets_have_witnesses(eurostat):
    d = determinize_uta(to_uta(eurostat))
    assert len(d) == len(eurostat.names)
    for subset, tree in zip(d.subsets, d.witnesses):
        (name,) = subset
        assert tree.label == eurostat.mu[name]
    assert len(d.finals) == 1


def test_inclusion_between_classes(eurostat, eurostat_edtd):
    assert grammar_includes(eurostat_edtd, eurostat)
    assert not grammar_includes(eurostat, eurostat_edtd)


def test_counterexample_is_in_one_language_only(eurostat, eurostat_edtd):
    t = grammar_counterexample(eurostat, eurostat_edtd)
    assert t is not None
    assert validate(t, eurostat) != validate(t, eurostat_edtd)
    assert grammar_counterexample(eurostat, eurostat) is None


def test_intersection(eurostat, eurostat_bad):
    assert grammars_intersect(eurostat, eurostat_bad)
    other = make_grammar("dtd", "nre", "eurostat", {"eurostat": "country"})
    assert not grammars_intersect(eurostat, other)


def test_boolean_witness_vector():
    g1 = make_grammar("dtd", "nre", "s", {"s": "a*"})
    g2 = make_grammar("dtd", "nre", "s", {"s": "a, a*"})
    t = boolean_witness([g1, g2], lambda m: m[0] and not m[1])
    assert t == parse_tree("s")


def test_normalize_merges_equal_specializations():
    g = make_grammar("edtd", "nre", "s", {"s": "a#1 | a#2", "a#1": "b", "a#2": "b"})
    n = normalize(g)
    assert n.specializations("a") == ["a"]
    assert equivalent_grammar(n, g)


def test_normalize_keeps_distinct_specializations(eurostat_edtd):
    n = normalize(eurostat_edtd)
    assert len(n.specializations("nationalIndex")) == 2
    assert n.mu[n.start] == "eurostat"
    assert equivalent_grammar(n, eurostat_edtd)


def test_normalize_joins_accepting_root_subsets():
    g = make_grammar("edtd", "nre", "s#1", {"s#1": "a*", "s#2": "a"})
    n = normalize(g)
    assert n.mu[n.start] == "s"
    assert equivalent_grammar(n, g)
    assert validate(parse_tree("s(a, a)"), n)


def test_dtd_equivalence_is_rule_by_rule(eurostat):
    same = make_grammar("dtd", "nre", "eurostat", {
        "eurostat": "averages, nationalIndex*",
        "averages": "Good, index+, (Good, index+)*",
        "nationalIndex": "country, Good, (value, year | index)",
        "index": "value, year",
    })
    assert equivalent_grammar(same, eurostat)
