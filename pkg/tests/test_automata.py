# test_automata.py
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import lang, nfa, same
from dxd import automata as fa


def test_basic_constructors():
    assert lang(fa.empty({"a"})) == set()
    assert lang(fa.epsilon()) == {""}
    assert lang(fa.symbol("a")) == {"a"}
    assert lang(fa.word("abc")) == {"abc"}
    assert lang(fa.any_symbol({"a", "b"})) == {"a", "b"}
    assert lang(fa.universal({"a"}), 3) == {"", "a", "aa", "aaa"}


def test_boolean_operations():
    a, b = nfa("a*b"), nfa("ab*")
    assert lang(fa.intersect(a, b)) == {"ab"}
    assert lang(fa.difference(a, b), 3) == {"b", "aab"}
    assert lang(fa.union(fa.word("a"), fa.word("b"))) == {"a", "b"}
    assert lang(fa.concat(fa.word("a"), fa.star(fa.word("b"))), 3) == {"a", "ab", "abb"}
    assert lang(fa.plus(fa.word("a")), 2) == {"a", "aa"}
    assert lang(fa.optional(fa.word("a"))) == {"", "a"}


def test_complement_is_relative_to_alphabet():
    c = fa.complement(nfa("a*"), {"a", "b"})
    assert "" not in lang(c, 2)
    assert lang(c, 2) == {"b", "ab", "ba", "bb"}


def test_canonical_is_minimal_and_equivalent():
    a = nfa("(a|b)*abb|abb")
    c = fa.canonical(a)
    assert fa.equivalent(a, c)
    assert c.is_deterministic
    assert len(c.states) == 4


@pytest.mark.parametrize("op, words", [
    ("concat", {"ab", "aab"}),
    ("union", {"a", "aa", "aaa", "b", "ab"}),
    ("intersect", set()),
    ("difference", {"a", "aa", "aaa"}),
])
def test_compose_by_name(op, words):
    assert lang(fa.compose(op, nfa("a+"), nfa("b|ab")), 3) == words
    with pytest.raises(ValueError):
        fa.compose("xor", nfa("a"), nfa("b"))


def test_determinize_then_minimize():
    d = fa.determinize(nfa("(a|b)*a"))
    assert d.is_deterministic
    m = fa.minimize(d)
    assert len(m.states) == 2
    assert fa.equivalent(m, d)


def test_counterexample_is_shortest():
    assert fa.counterexample(nfa("a*"), nfa("a|aa")) == ()
    assert fa.counterexample(nfa("a+"), nfa("a|aa")) == ("a", "a", "a")
    assert fa.counterexample(nfa("a"), nfa("a*")) is None


def test_includes_direction():
    assert fa.includes(nfa("ab"), nfa("a*b*"))
    assert not fa.includes(nfa("a*b*"), nfa("ab"))


def test_trim_drops_useless_states():
    a = fa.make({0, 1, 2, 3}, {"a", "b"}, {(0, "a", 1), (0, "b", 2), (3, "a", 1)}, 0, {1})
    t = fa.trim(a)
    assert t.states == {0, 1}
    assert fa.is_empty(fa.make({0, 1}, {"a"}, {(1, "a", 1)}, 0, {1}))


def test_remove_epsilon_keeps_language():
    a = fa.make({0, 1, 2}, {"a"}, {(0, fa.EPS, 1), (1, "a", 2), (2, fa.EPS, 0)}, 0, {2})
    assert a.has_epsilon
    b = fa.remove_epsilon(a)
    assert not b.has_epsilon
    assert fa.equivalent(a, b)


def test_rename_and_restrict():
    a = fa.rename_symbols(nfa("ab"), {"a": "x"})
    assert lang(a) == {"xb"}
    assert lang(fa.restrict(nfa("a|b"), {"a"})) == {"a"}


def test_substitute_symbol_by_language():
    a = fa.substitute(nfa("xb"), {"x": nfa("a*")})
    assert same(a, "a*b")


def test_local_automaton_between_states():
    a = fa.word("abc")
    local = fa.local_automaton(a, 1, 3)
    assert lang(local) == {"bc"}
    with pytest.raises(ValueError):
        fa.local_automaton(a, 0, 9)


def test_delimiters_of_word_and_box():
    a = fa.word("abab")
    assert fa.delimited_pairs(a, "ab") == {(0, 2), (2, 4)}
    assert fa.delimiter_states(a, "") == (a.states, a.states)
    assert fa.box_pairs(a, [{"a", "b"}, {"b"}]) == {(0, 2), (2, 4)}
    assert fa.box_delimiters(a, [{"b"}]) == ({1, 3}, {2, 4})


def test_graph_nodes_are_states():
    g = fa.graph(nfa("a|b"))
    assert g.number_of_nodes() == 3


# ----- Properties ------

def regexes():
    leaves = st.sampled_from(["a", "b", "()"])
    return st.recursive(
        leaves,
        lambda inner: st.one_of(
            st.tuples(inner, inner).map(lambda p: f"({p[0]}{p[1]})"),
            st.tuples(inner, inner).map(lambda p: f"({p[0]}|{p[1]})"),
            inner.map(lambda r: f"({r})*"),
        ),
        max_leaves=6,
    )


@settings(max_examples=60, derandomize=True, deadline=None)
@given(regexes(), regexes())
def test_inclusion_agrees_with_bounded_words(r1, r2):
    a, b = nfa(r1), nfa(r2)
    if fa.includes(a, b):
        assert lang(a, 5) <= lang(b, 5)
    else:
        w = fa.counterexample(a, b)
        assert fa.accepts(a, w) and not fa.accepts(b, w)


@settings(max_examples=60, derandomize=True, deadline=None)
@given(regexes(), regexes())
def test_intersection_and_difference_partition(r1, r2):
    a, b = nfa(r1), nfa(r2)
    inter, diff = fa.intersect(a, b), fa.difference(a, b)
    assert lang(inter, 5) == lang(a, 5) & lang(b, 5)
    assert lang(diff, 5) == lang(a, 5) - lang(b, 5)


@settings(max_examples=60, derandomize=True, deadline=None)
@given(regexes())
def test_canonical_is_deterministic_and_equivalent(r):
    a = nfa(r)
    c = fa.canonical(a)
    assert c.is_deterministic
    assert fa.equivalent(a, c)
