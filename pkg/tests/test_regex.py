# test_regex.py
import pytest
from hypothesis import given, settings

from conftest import lang, nfa, same
from dxd import automata as fa
from dxd import regex as rx
from dxd.config import Caps
from dxd.errors import ParseError, ResourceCapExceeded
from test_automata import regexes


@pytest.mark.parametrize("text, words", [
    ("a, b", {"ab"}),
    ("a | b", {"a", "b"}),
    ("a + b", {"a", "b"}),
    ("a+", {"a", "aa", "aaa", "aaaa"}),
    ("(a, b)+", {"ab", "abab"}),
    ("a?, b", {"b", "ab"}),
    ("()", {""}),
    ("ε | a", {"", "a"}),
    ("%0", set()),
])
def test_name_syntax(text, words):
    assert lang(nfa(text, chars=False), 4) == words


def test_multi_letter_names_are_symbols():
    r = rx.parse_regex("nationalIndex*, averages")
    assert rx.symbols(r) == {"nationalIndex", "averages"}
    assert fa.accepts(rx.to_nfa(r), ("nationalIndex", "averages"))


def test_juxtaposition_concatenates_names():
    assert same(nfa("country Good value", chars=False), "country, Good, value", chars=False)


@pytest.mark.parametrize("text, n, words", [
    ("ab+ba", 4, {"ab", "ba"}),
    ("(ab)+", 4, {"ab", "abab"}),
    ("a*bc*", 2, {"b", "ab", "bc"}),
    ("ab|c", 4, {"ab", "c"}),
])
def test_char_syntax(text, n, words):
    assert lang(nfa(text), n) == words


def test_plus_glued_before_operand_is_alternation():
    r = rx.parse_regex("a+b", char_symbols=True)
    assert isinstance(r, rx.Alt)
    r = rx.parse_regex("a+ b", char_symbols=True)
    assert isinstance(r, rx.Concat)


@pytest.mark.parametrize("text", ["", "(a", "a)", "a | | b", "*a", "a $ b"])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        rx.parse_regex(text)


def test_parse_error_position():
    with pytest.raises(ParseError) as e:
        rx.parse_regex("a, (b")
    assert e.value.position == 5


def test_to_text_roundtrip_keeps_language():
    for text in ["(a, b)*, c?", "a | b, c", "(a | b)+", "nationalIndex*"]:
        r = rx.parse_regex(text)
        again = rx.parse_regex(rx.to_text(r))
        assert fa.equivalent(rx.to_nfa(r), rx.to_nfa(again))


def test_to_text_in_char_mode():
    assert rx.to_text(rx.parse_regex("(ab)*c", char_symbols=True), char_symbols=True) == "(ab)*c"


def test_smart_constructors_simplify():
    a = rx.Sym("a")
    assert rx.cat(rx.EPSILON, a) == a
    assert rx.alt(rx.EMPTY, a) == a
    assert rx.star(rx.star(a)) == rx.Star(a)
    assert rx.opt(rx.star(a)) == rx.Star(a)
    assert rx.alt(rx.EPSILON, a) == rx.Opt(a)


def test_derivative_matching():
    r = rx.parse_regex("(ab)*c", char_symbols=True)
    assert rx.matches(r, "ababc")
    assert not rx.matches(r, "abac")


def test_glushkov_automaton_has_one_state_per_position():
    a = rx.to_nfa(rx.parse_regex("(ab)*a", char_symbols=True))
    assert len(a.states) == 4
    assert not a.has_epsilon


@pytest.mark.parametrize("text, deterministic", [
    ("a*b", True),
    ("(a|b)*a", False),
    ("a?a", False),
    ("(b*a)+", True),
    ("(ab)*a", False),
])
def test_is_dre(text, deterministic):
    assert rx.is_dre(rx.parse_regex(text, char_symbols=True)) is deterministic


@pytest.mark.parametrize("text", ["(a|b)*a", "a?a", "(ab)*a", "a*b*", "(a|b)*ab*"])
def test_to_dre_finds_deterministic_expression(text):
    a = nfa(text)
    r = rx.to_dre(a)
    assert r is not None
    assert rx.is_dre(r)
    assert fa.equivalent(rx.to_nfa(r), a)


def test_to_dre_rejects_languages_without_dre():
    assert rx.to_dre(nfa("(a|b)*a(a|b)")) is None


@pytest.mark.parametrize("text, expected", [("(a|b)*a", True), ("a*b*", True), ("(a|b)*a(a|b)", False)])
def test_one_unambiguous_languages(text, expected):
    assert rx.is_one_unambiguous(nfa(text)) is expected


def test_to_dre_respects_node_cap():
    with pytest.raises(ResourceCapExceeded) as e:
        rx.to_dre(nfa("(a|b)*ab*"), Caps(regex_nodes=2))
    assert e.value.cap == "regex_nodes"


def test_from_nfa_state_elimination():
    a = fa.make({0, 1}, {"a", "b"}, {(0, "a", 1), (1, "b", 0)}, 0, {0})
    assert same(rx.to_nfa(rx.from_nfa(a)), "(ab)*")
    assert rx.from_nfa(fa.empty()) == rx.EMPTY


@settings(max_examples=50, derandomize=True, deadline=None)
@given(regexes())
def test_position_automaton_agrees_with_derivatives(text):
    r = rx.parse_regex(text, char_symbols=True)
    a = rx.to_nfa(r)
    for w in fa.words(fa.universal({"a", "b"}), 4):
        assert fa.accepts(a, w) == rx.matches(r, w)


@settings(max_examples=50, derandomize=True, deadline=None)
@given(regexes())
def test_state_elimination_keeps_language(text):
    a = nfa(text)
    assert fa.equivalent(rx.to_nfa(rx.from_nfa(a)), a)
