# conftest.py
from pathlib import Path

import pytest
from hypothesis import strategies as st

from dxd import automata as fa
from dxd import regex as rx
from dxd.document import parse_kernel
from dxd.schema import load_grammar

DATA = Path(__file__).parent / "data"


def nfa(text: str, chars: bool = True) -> fa.Nfa:
    return rx.to_nfa(rx.parse_regex(text, char_symbols=chars))


def lang(a: fa.Nfa, n: int = 6):
    """Words of length at most n, as strings when every symbol is one letter."""
    return {"".join(w) for w in fa.words(a, n)}


def same(a: fa.Nfa, text: str, chars: bool = True) -> bool:
    return fa.equivalent(a, nfa(text, chars))


def name_regexes(names, max_leaves: int = 4):
    """Content models over element names, in the grammar syntax."""
    leaves = st.sampled_from([*names, "()"])
    return st.recursive(
        leaves,
        lambda inner: st.one_of(
            st.tuples(inner, inner).map(lambda p: f"({p[0]}, {p[1]})"),
            st.tuples(inner, inner).map(lambda p: f"({p[0]} | {p[1]})"),
            inner.map(lambda r: f"({r})*"),
        ),
        max_leaves=max_leaves,
    )


def grammar(name: str):
    return load_grammar((DATA / name).read_text(encoding="utf-8"), name)[0]


def kernel(name: str):
    return parse_kernel((DATA / name).read_text(encoding="utf-8"), name)


@pytest.fixture
def data_dir() -> Path:
    return DATA


@pytest.fixture
def eurostat():
    return grammar("eurostat_dtd.grammar")


@pytest.fixture
def eurostat_bad():
    return grammar("eurostat_bad.grammar")


@pytest.fixture
def eurostat_edtd():
    return grammar("eurostat_edtd.grammar")


@pytest.fixture
def t0():
    return kernel("kernel_t0.tree")


@pytest.fixture
def t1():
    return kernel("kernel_t1.tree")
