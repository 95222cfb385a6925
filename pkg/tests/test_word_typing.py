# test_word_typing.py
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import lang, nfa, same
from dxd import automata as fa
from dxd.config import Caps
from dxd.errors import ArityError, IncompatibleDesignError, KernelError, ParseError, ResourceCapExceeded
from dxd.word_typing import (KernelBox, KernelWord, WordDesign, all_maximal_local, build_perfect,
                             build_perfect_box, check_local, check_maximal_local, check_perfect,
                             compatible, decompose, dominates, exists_local, exists_local_box,
                             exists_ml, exists_ml_box, exists_perfect, exists_perfect_box,
                             local_counterexample, omega_typing, sequences, sound, w_tau)
from test_automata import regexes


def design(target: str, kernel: str) -> WordDesign:
    return WordDesign(nfa(target), KernelWord.parse(kernel, char_symbols=True))


def typing(*texts):
    return [nfa(t) for t in texts]


def matches(found, *texts) -> bool:
    return len(found) == len(texts) and all(same(x, t) for x, t in zip(found, texts))


def contains(typings, *texts) -> bool:
    return any(matches(t, *texts) for t in typings)


# ----- Kernels ------

def test_kernel_word_parse():
    k = KernelWord.parse("a @f1 c @f2 e", char_symbols=True)
    assert k.segments == (("a",), ("c",), ("e",))
    assert k.functions == ("f1", "f2")
    assert str(k) == "a @f1 c @f2 e"
    assert str(KernelWord.parse("")) == "ε"


def test_kernel_word_from_labels():
    k = KernelWord.from_labels(["averages", "@f1", "@f2"])
    assert k.segments == (("averages",), (), ())
    assert k.arity == 2


@pytest.mark.parametrize("text, error", [
    ("a @ b", ParseError),
    ("@f1 @f1", KernelError),
])
def test_kernel_word_errors(text, error):
    with pytest.raises(error):
        KernelWord.parse(text)


def test_kernel_box_parse():
    k = KernelBox.parse("{a,b} @f1 d")
    assert k.boxes == ((frozenset({"a", "b"}),), (frozenset({"d"}),))
    assert k.functions == ("f1",)
    assert KernelBox.from_word(KernelWord.parse("a @f1 c", char_symbols=True)) == KernelBox.parse("a @f1 c")
    with pytest.raises(ParseError):
        KernelBox.parse("{} @f1")


def test_function_symbols_are_not_target_symbols():
    with pytest.raises(ValueError):
        WordDesign(fa.symbol("@f1"), KernelWord.parse("@f1"))


def test_w_tau():
    k = KernelWord.parse("a @f1 c", char_symbols=True)
    assert same(w_tau(k, typing("b*")), "ab*c")
    with pytest.raises(ArityError):
        w_tau(k, [])


# ----- Perfect automaton ------

def test_perfect_automaton_of_single_word():
    d = design("abccde", "a @f1 c @f2 e")
    p = build_perfect(d.target, d.kernel)
    assert p.compatible
    omega = omega_typing(p)
    assert matches(omega, "bc?", "c?d")
    assert not check_local(d, omega)
    assert exists_perfect(d) is None
    smaller = typing("b", "cd")
    assert check_local(d, smaller)
    assert dominates(omega, smaller) and not dominates(smaller, omega)
    assert len(all_maximal_local(d)) == 2


def test_slot_automata_and_unsound_omega():
    d = design("a(bc)*d", "a @f1 @f2 d")
    p = build_perfect(d.target, d.kernel)
    first, second = p.automata(1), p.automata(2)
    assert len(first) == 2 and len(second) == 2
    assert any(same(x, "(bc)*") for x in first) and any(same(x, "(bc)*b") for x in first)
    assert any(same(x, "(bc)*") for x in second) and any(same(x, "c(bc)*") for x in second)
    omega = omega_typing(p)
    assert not sound(d, omega)
    assert fa.accepts(w_tau(d.kernel, omega), tuple("abccbcd"))


def test_composite_accepts_the_target():
    d = design("(ab)+", "@f1 @f2")
    p = build_perfect(d.target, d.kernel)
    assert fa.equivalent(p.composite, d.target)


def test_sequences_are_sound():
    d = design("a*bc*", "@f1 b @f2")
    found = list(sequences(build_perfect(d.target, d.kernel)))
    assert found
    assert all(sound(d, s) for s in found)


def test_incompatible_kernel():
    d = design("a*b", "c @f1")
    assert not compatible(d.target, d.kernel)
    with pytest.raises(IncompatibleDesignError):
        omega_typing(build_perfect(d.target, d.kernel))
    assert exists_local(d) is None
    assert exists_perfect(d) is None


def test_decomposition_is_a_partition():
    d = design("(ab)+", "@f1 @f2")
    p = build_perfect(d.target, d.kernel)
    cells = decompose(p, 2)
    assert len(cells) == 3
    for i, x in enumerate(cells):
        for y in cells[i + 1:]:
            assert fa.is_empty(fa.intersect(x, y))
    assert fa.equivalent(fa.union_all(cells), p.slot_type(2))


# ----- Typing questions ------

def test_perfect_typing():
    d = design("a*bc*", "@f1 b @f2")
    perfect = exists_perfect(d)
    assert matches(perfect, "a*", "c*")
    assert check_perfect(d, typing("a*", "c*"))
    assert not check_perfect(d, typing("a*", "c"))
    assert check_maximal_local(d, perfect)


def test_two_maximal_typings_without_perfect():
    d = design("a*bc*", "@f1 @f2")
    assert exists_perfect(d) is None
    found = all_maximal_local(d)
    assert len(found) == 2
    assert contains(found, "a*bc*", "c*")
    assert contains(found, "a*", "a*bc*")
    chosen = exists_ml(d)
    assert matches(chosen, "a*bc*", "c*") or matches(chosen, "a*", "a*bc*")


def test_local_but_not_maximal():
    d = design("a*bc*", "@f1 @f2")
    smaller = typing("a*b", "c*")
    assert check_local(d, smaller)
    assert not check_maximal_local(d, smaller)


def test_unique_maximal_typing_that_is_not_perfect():
    d = design("(ab)*", "@f1 @f2")
    assert exists_perfect(d) is None
    found = all_maximal_local(d)
    assert len(found) == 1
    assert matches(found[0], "(ab)*", "(ab)*")


def test_three_maximal_typings():
    d = design("(ab)+", "@f1 @f2")
    found = all_maximal_local(d)
    assert len(found) == 3
    assert contains(found, "(ab)*", "(ab)+")
    assert contains(found, "(ab)+", "(ab)*")
    assert contains(found, "a(ba)*", "b(ab)*")


def test_sound_typing_that_misses_target_words():
    d = design("ab+ba", "@f1 @f2")
    p = build_perfect(d.target, d.kernel)
    assert p.compatible
    assert fa.equivalent(p.composite, d.target)
    assert sound(d, typing("a", "b"))
    assert local_counterexample(d, typing("a", "b")) == ("incomplete", ("b", "a"))
    assert local_counterexample(d, typing("a|b", "a|b"))[0] == "unsound"
    assert exists_perfect(d) is None


def test_empty_forests_give_local_typings():
    d = design("ab+ba", "@f1 @f2")
    p = build_perfect(d.target, d.kernel)
    assert fa.equivalent(p.composite, d.target)
    assert exists_local(d) is not None
    found = all_maximal_local(d)
    assert len(found) == 2
    assert contains(found, "ab+ba", "()")
    assert contains(found, "()", "ab+ba")
    assert all(check_local(d, t) for t in found)


def test_omega_can_be_strictly_smaller_than_the_target():
    d = design("abc+d", "a @f1 c")
    p = build_perfect(d.target, d.kernel)
    assert p.compatible
    assert same(p.composite, "abc")
    assert fa.includes(p.composite, d.target)
    assert fa.counterexample(d.target, p.composite) == ("d",)


@pytest.mark.parametrize("target, local", [("ab", True), ("ab|c", False)])
def test_kernel_without_functions(target, local):
    d = design(target, "ab")
    assert (exists_local(d) == []) is local
    assert (exists_perfect(d) == []) is local


@pytest.mark.parametrize("caps", [Caps(search_vectors=1), Caps(slot_automata=1)])
def test_search_caps(caps):
    with pytest.raises(ResourceCapExceeded):
        exists_ml(design("a*bc*", "@f1 @f2"), caps)


# ----- Box kernels ------

def test_box_kernel_perfect_typing():
    d = WordDesign(nfa("(a|b)c*d"), KernelBox.parse("{a,b} @f1 d"))
    assert matches(exists_perfect_box(d), "c*")
    assert matches(exists_local_box(d), "c*")
    assert matches(exists_ml_box(d), "c*")
    assert build_perfect_box(d.target, d.kernel).compatible


def test_box_kernel_without_typing():
    d = WordDesign(nfa("ac*d|bd"), KernelBox.parse("{a,b} @f1 d"))
    assert exists_perfect_box(d) is None
    assert exists_local_box(d) is None


# ----- Properties ------

@settings(max_examples=200, derandomize=True, deadline=None)
@given(regexes())
def test_two_slot_kernel_always_has_a_local_typing(text):
    d = design(text, "@f1 @f2")
    found = exists_local(d)
    assert found is not None
    assert check_local(d, found)
    assert all(sound(d, s) for s in sequences(build_perfect(d.target, d.kernel), limit=10))


def kernel_text(segments) -> str:
    parts = [segments[0]]
    for i, seg in enumerate(segments[1:], 1):
        parts += [f"@f{i}", seg]
    return " ".join(p for p in parts if p)


def kernels(max_functions: int = 2):
    segments = st.sampled_from(["", "a", "b", "ab", "ba"])
    return st.lists(segments, min_size=2, max_size=max_functions + 1).map(kernel_text)


@settings(max_examples=200, derandomize=True, deadline=None)
@given(regexes(), kernels(3))
def test_omega_is_included_in_the_target(text, kernel):
    d = design(text, kernel)
    p = build_perfect(d.target, d.kernel)
    assert fa.includes(p.composite, d.target)
    assert p.compatible == (not fa.is_empty(p.composite))


@settings(max_examples=200, derandomize=True, deadline=None)
@given(regexes(), kernels(3))
def test_sequence_samples_are_sound(text, kernel):
    d = design(text, kernel)
    p = build_perfect(d.target, d.kernel)
    for sample in sequences(p, limit=20):
        assert sound(d, sample)
        assert dominates(omega_typing(p), sample)


@settings(max_examples=200, derandomize=True, deadline=None)
@given(regexes(), kernels(2), st.data())
def test_sound_typings_lie_below_omega(text, kernel, data):
    d = design(text, kernel)
    chosen = typing(*(data.draw(regexes()) for _ in range(d.arity)))
    if any(fa.is_empty(t) for t in chosen) or not sound(d, chosen):
        return
    p = build_perfect(d.target, d.kernel)
    assert p.compatible
    assert dominates(omega_typing(p), chosen)


@settings(max_examples=200, derandomize=True, deadline=None)
@given(regexes(), kernels(2))
def test_perfect_typing_is_the_unique_maximal_one(text, kernel):
    d = design(text, kernel)
    perfect = exists_perfect(d)
    if perfect is None or len(fa.canonical(d.target).states) > 6:
        return
    try:
        found = all_maximal_local(d)
    except ResourceCapExceeded:
        return
    assert len(found) == 1
    assert all(fa.equivalent(x, y) for x, y in zip(found[0], perfect))


@settings(max_examples=200, derandomize=True, deadline=None)
@given(regexes(), kernels(2))
def test_decomposition_cells_partition_the_slot_type(text, kernel):
    d = design(text, kernel)
    p = build_perfect(d.target, d.kernel)
    if not p.compatible:
        return
    for i in range(1, d.arity + 1):
        words = [lang(cell, 6) for cell in decompose(p, i)]
        for j, x in enumerate(words):
            for y in words[j + 1:]:
                assert not x & y
        assert set().union(*words) == lang(p.slot_type(i), 6)
