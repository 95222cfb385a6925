# test_tree_typing.py
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import grammar, name_regexes, nfa, same
from dxd import word_typing as wt
from dxd.config import Caps
from dxd.document import parse_kernel
from dxd.errors import ConfigError, GrammarError, ResourceCapExceeded
from dxd.schema import GrammarClass, make_grammar, reduce
from dxd.tree_typing import (Property, TreeDesign, all_maximal_local, check_typing,
                             dtd_sdtd_problems, edtd_exists_local, edtd_loc, exists_typing,
                             explain_no_perfect, fixed_paths, fresh_root, global_check, induce_dtd,
                             induce_sdtd, induced_kappa, kappa_assignments, lift_dtd, perfect_kappa,
                             same_typing, strictly_dominates)

NATIONAL = {
    "nationalIndex#A": "country, Good, index",
    "nationalIndex#B": "country, Good, value, year",
    "averages": "(Good, index+)+",
    "index": "value, year",
}


def edtd_typing(f1: str, f2: dict, f3: str):
    return [
        reduce(make_grammar("edtd", "nre", "root_f1", {"root_f1": f1, **NATIONAL})),
        reduce(make_grammar("edtd", "nre", "root_f2", {"index": "value, year", **f2})),
        reduce(make_grammar("edtd", "nre", "root_f3", {"root_f3": f3, **NATIONAL})),
    ]


A_AT_KERNEL = edtd_typing("averages, (nationalIndex#A, nationalIndex#B)*",
                          {"root_f2": "country, Good, index"},
                          "nationalIndex#B, (nationalIndex#A, nationalIndex#B)*")
B_AT_KERNEL = edtd_typing("averages, (nationalIndex#A, nationalIndex#B)*, nationalIndex#A",
                          {"root_f2": "country, Good, value, year"},
                          "(nationalIndex#A, nationalIndex#B)*")


# ----- Designs ------

def test_fixed_paths(t0, t1):
    assert fixed_paths(t0) == [(0,)]
    assert fixed_paths(t0, "exact") == []
    assert fixed_paths(t1) == []


def test_kernel_data_mode_is_checked(eurostat, t0):
    with pytest.raises(ConfigError):
        fixed_paths(t0, "loose")
    with pytest.raises(ConfigError):
        exists_typing(TreeDesign(eurostat, t0), Property.PERF, kernel_data="loose")


def test_design_class_checks(eurostat_edtd, t1):
    with pytest.raises(GrammarError):
        TreeDesign(eurostat_edtd, t1, GrammarClass.DTD)
    with pytest.raises(GrammarError):
        TreeDesign(eurostat_edtd, t1, GrammarClass.SDTD)
    assert TreeDesign(eurostat_edtd, t1).kind is GrammarClass.EDTD


def test_fresh_root_avoids_target_names():
    g = make_grammar("dtd", "nre", "s", {"s": "root_f1"})
    assert fresh_root(g, "@f1") == "root_f1_"
    assert fresh_root(g, "f2") == "root_f2"


def test_induced_word_designs(eurostat, t0):
    ind = induce_dtd(TreeDesign(eurostat, t0))
    assert ind.possible
    assert [i.path for i in ind.designs] == [()]
    assert ind.designs[0].functions == ("f1", "f2")
    assert ind.fixed == {(0,): frozenset({"averages"})}


def test_kernel_outside_the_target(eurostat):
    d = TreeDesign(eurostat, parse_kernel("eurostat(country, @f1)"))
    ind = induce_dtd(d)
    assert not ind.possible
    assert exists_typing(d, Property.LOC) is None


# ----- DTD designs ------

def test_perfect_dtd_typing(eurostat, t0):
    d = TreeDesign(eurostat, t0)
    perfect = exists_typing(d, Property.PERF)
    assert perfect is not None
    assert [g.start for g in perfect] == ["root_f1", "root_f2"]
    for g in perfect:
        assert same(g.content(g.start).nfa, "nationalIndex*", chars=False)
    assert same_typing(perfect, [grammar("eurostat/f1.grammar"), grammar("eurostat/f2.grammar")])
    assert check_typing(d, Property.PERF, perfect)
    assert check_typing(d, Property.ML, perfect)
    assert global_check(d, perfect)


def test_exact_kernel_data_has_no_typing(eurostat, t0):
    d = TreeDesign(eurostat, t0)
    assert exists_typing(d, Property.PERF, kernel_data="exact") is None
    assert exists_typing(d, Property.LOC, kernel_data="exact") is None


def test_sdtd_reading_of_a_dtd(eurostat, t0):
    perfect = exists_typing(TreeDesign(eurostat, t0, GrammarClass.SDTD), Property.PERF)
    assert perfect is not None
    assert perfect[0].kind is GrammarClass.SDTD


def test_choice_between_national_formats(eurostat_bad, t0):
    d = TreeDesign(eurostat_bad, t0)
    assert exists_typing(d, Property.LOC) is not None
    assert exists_typing(d, Property.PERF) is None
    found = all_maximal_local(d)
    assert len(found) == 2
    roots = [[g.content(g.start).nfa for g in t] for t in found]
    either = "natIndA* | natIndB*"
    assert any(same(f1, "()", chars=False) and same(f2, either, chars=False) for f1, f2 in roots)
    assert any(same(f1, either, chars=False) and same(f2, "()", chars=False) for f1, f2 in roots)


def test_explain_no_perfect_points_at_the_root(eurostat_bad, eurostat, t0):
    diag = explain_no_perfect(TreeDesign(eurostat_bad, t0))
    assert diag.path == ()
    assert diag.counterexample[0] == "unsound"
    assert explain_no_perfect(TreeDesign(eurostat, t0)) is None


# ----- EDTD designs ------

def test_edtd_has_no_perfect_typing(eurostat_edtd, t1):
    d = TreeDesign(eurostat_edtd, t1)
    assert exists_typing(d, Property.PERF) is None
    kappa, _, _ = perfect_kappa(d)
    assert len(kappa[(1,)]) == 2
    diag = explain_no_perfect(d)
    assert diag.path == ()
    assert diag.counterexample is not None


def test_edtd_maximal_local_typings(eurostat_edtd, t1):
    d = TreeDesign(eurostat_edtd, t1)
    found = all_maximal_local(d)
    assert len(found) == 2
    assert any(same_typing(t, A_AT_KERNEL) for t in found)
    assert any(same_typing(t, B_AT_KERNEL) for t in found)
    chosen = exists_typing(d, Property.ML)
    assert same_typing(chosen, A_AT_KERNEL) or same_typing(chosen, B_AT_KERNEL)


def test_edtd_checks(eurostat_edtd, t1):
    d = TreeDesign(eurostat_edtd, t1)
    assert check_typing(d, Property.LOC, A_AT_KERNEL)
    assert check_typing(d, Property.ML, A_AT_KERNEL)
    assert not check_typing(d, Property.PERF, A_AT_KERNEL)
    shrunk = [reduce(make_grammar("edtd", "nre", "root_f1", {"root_f1": "averages", **NATIONAL}))] + A_AT_KERNEL[1:]
    assert check_typing(d, Property.LOC, shrunk)
    assert not check_typing(d, Property.ML, shrunk)
    assert strictly_dominates(A_AT_KERNEL, shrunk)


def test_induced_kappa(eurostat_edtd, t1):
    kappa = induced_kappa(TreeDesign(eurostat_edtd, t1), A_AT_KERNEL)
    assert len(kappa[()]) == 1
    assert len(kappa[(1,)]) == 1


def test_kappa_assignments(eurostat_edtd, t1):
    d = TreeDesign(eurostat_edtd, t1)
    choices = [k[(1,)] for k in kappa_assignments(d)]
    assert [len(c) for c in choices] == [1, 1, 2]
    with pytest.raises(ResourceCapExceeded) as e:
        exists_typing(d, Property.LOC, Caps(kappa_assignments=1))
    assert e.value.cap == "kappa_assignments"
    assert exists_typing(d, Property.LOC, Caps(kappa_assignments=3)) is not None


def test_edtd_local_search(eurostat_edtd, t1):
    d = TreeDesign(eurostat_edtd, t1)
    found = edtd_exists_local(d)
    assert found is not None
    assert edtd_loc(d, found)


# ----- Dispatch ------

def test_sdtd_induction(eurostat, t0):
    d = TreeDesign(eurostat, t0, GrammarClass.SDTD)
    assert [i.path for i in induce_sdtd(d).designs] == [()]
    with pytest.raises(GrammarError):
        induce_dtd(d)


def test_dtd_problems_find_then_check(eurostat, eurostat_edtd, t0, t1):
    d = TreeDesign(eurostat, t0)
    typing = dtd_sdtd_problems(d, "perf")
    assert typing is not None
    assert dtd_sdtd_problems(d, "loc", typing) is True
    with pytest.raises(GrammarError):
        dtd_sdtd_problems(TreeDesign(eurostat_edtd, t1), "loc")


def test_lift_word_types_to_tree_types(eurostat, t0):
    d = TreeDesign(eurostat, t0)
    slots = {"f1": nfa("nationalIndex*", chars=False), "f2": nfa("nationalIndex*", chars=False)}
    typing = lift_dtd(d, slots)
    assert [g.kind for g in typing] == [GrammarClass.DTD, GrammarClass.DTD]
    assert check_typing(d, Property.PERF, typing)


DTD_KERNELS = ["s(@f1)", "s(@f1, @f2)", "s(a, @f1)", "s(@f1, b(@f2))",
               "s(a(@f1), @f2)", "s(@f1, a(c, @f2))", "s(b(c), @f1)"]


@settings(max_examples=50, derandomize=True, deadline=None)
@given(st.sampled_from(DTD_KERNELS), name_regexes(["a", "b", "c"]), name_regexes(["b", "c"]),
       name_regexes(["c"]))
def test_node_reduction_agrees_with_global_check(kernel_text, s, a, b):
    d = TreeDesign(make_grammar("dtd", "nre", "s", {"s": s, "a": a, "b": b}), parse_kernel(kernel_text))
    try:
        found = exists_typing(d, Property.LOC)
    except ResourceCapExceeded:
        return
    if found is not None:
        assert global_check(d, found)
    ind = induce_dtd(d)
    if not ind.possible:
        assert found is None
        return
    slots, local = {}, True
    for i in ind.designs:
        p = wt.build_perfect(i.design.target, i.design.kernel)
        if not p.compatible:
            assert found is None
            return
        omega = wt.omega_typing(p)
        slots.update(zip(i.functions, omega))
        local = local and wt.check_local(i.design, omega)
    assert global_check(d, lift_dtd(d, slots)) == local
    if local:
        assert found is not None
