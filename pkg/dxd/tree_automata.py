# tree_automata.py
"""
Unranked tree automata: the nUTA of a grammar, its bottom-up subset
determinization, EDTD normalization and language comparisons of grammars.

A state of the determinized automaton is the set of names whose subtree
language contains some tree; only non-empty sets are kept (the empty set is
the implicit sink). Horizontal automata of the determinized machine read
subset ids written `q<i>`.
"""
import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple

from dxd import automata as fa
from dxd.automata import Nfa
from dxd.config import Caps
from dxd.schema import (SPECIALIZATION_MARK, ContentModel, GrammarClass, Mechanism,
                        TreeGrammar, readable, reduce, same_language)
from dxd.trees import UTree

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Nuta:
    states: FrozenSet[str]
    alphabet: FrozenSet[str]
    delta: Mapping[Tuple[str, str], Nfa]
    finals: FrozenSet[str]

    def states_for(self, label: str) -> List[str]:
        return sorted(q for q, a in self.delta if a == label)


@dataclass
class Duta:
    subsets: List[FrozenSet[str]]
    label_of: List[str]
    witnesses: List[UTree]
    horizontal: Dict[str, Nfa] = field(default_factory=dict)
    finals: FrozenSet[int] = frozenset()

    def symbol(self, i: int) -> str:
        return f"q{i}"

    def delta(self, i: int, label: str) -> Nfa:
        """Δ(q_i, label): the horizontal words of child states leading to q_i."""
        h = self.horizontal[label]
        finals = {c for c in h.states if h.label(c) == i}
        return fa.trim(fa.make(h.states, h.alphabet, h.transitions, h.initial, finals, h.labels))

    def __len__(self) -> int:
        return len(self.subsets)


def to_uta(g: TreeGrammar) -> Nuta:
    delta = {(n, g.mu[n]): g.content(n).nfa for n in g.names}
    return Nuta(g.names, g.elements, delta, frozenset({g.start}))


class _Configurations:
    """Joint runs of the horizontal automata of one label, over subset symbols."""

    def __init__(self, u: Nuta, label: str):
        self.label = label
        self.names = u.states_for(label)
        self.machines = [fa.remove_epsilon(u.delta[(n, label)]) for n in self.names]
        self.initial = tuple(fa.start_set(m) for m in self.machines)

    def move(self, config, subset: FrozenSet[str]):
        moved = []
        for m, current in zip(self.machines, config):
            target = set()
            for s in subset:
                target |= fa.step(m, current, s)
            moved.append(frozenset(target))
        return tuple(moved)

    def result(self, config) -> FrozenSet[str]:
        return frozenset(n for n, m, c in zip(self.names, self.machines, config) if c & m.finals)

    def explore(self, subsets: Sequence[FrozenSet[str]]):
        """Breadth-first over reachable configurations; yields (config, child ids) once each."""
        seen = {self.initial: ()}
        queue = deque([self.initial])
        while queue:
            config = queue.popleft()
            yield config, seen[config]
            for j, subset in enumerate(subsets):
                target = self.move(config, subset)
                if not any(target) or target in seen:
                    continue
                seen[target] = seen[config] + (j,)
                queue.append(target)


def determinize_uta(u: Nuta) -> Duta:
    """
    Bottom-up subset construction. Rounds over the labels until no new subset
    appears; each subset keeps the first (smallest in breadth-first order)
    tree found for it.
    """
    d = Duta([], [], [])
    index: Dict[FrozenSet[str], int] = {}
    labels = sorted(u.alphabet)
    runners = {a: _Configurations(u, a) for a in labels}
    changed = True
    while changed:
        changed = False
        for a in labels:
            runner = runners[a]
            for config, children in runner.explore(list(d.subsets)):
                result = runner.result(config)
                if result and result not in index:
                    index[result] = len(d.subsets)
                    d.subsets.append(result)
                    d.label_of.append(a)
                    d.witnesses.append(UTree(a, tuple(d.witnesses[j] for j in children)))
                    changed = True
    for a in labels:
        runner = runners[a]
        ids: Dict[tuple, int] = {}
        transitions = set()
        explored = list(runner.explore(d.subsets))
        for config, _ in explored:
            ids[config] = len(ids)
        for config, _ in explored:
            for j, subset in enumerate(d.subsets):
                target = runner.move(config, subset)
                if target in ids:
                    transitions.add((ids[config], d.symbol(j), ids[target]))
        state_labels = {i: index.get(runner.result(c)) for c, i in ids.items()}
        d.horizontal[a] = fa.make(ids.values(), [d.symbol(j) for j in range(len(d.subsets))],
                                  transitions, 0, (), state_labels)
    d.finals = frozenset(i for i, s in enumerate(d.subsets) if s & u.finals)
    logger.debug("determinized tree automaton: %d states", len(d.subsets))
    return d


def normalize(g: TreeGrammar, caps: Optional[Caps] = None) -> TreeGrammar:
    """
    An equivalent EDTD whose specializations of one element have pairwise
    disjoint subtree languages. Several accepting subsets are joined under one
    root name whose content is the union of theirs.
    Raises NotRepresentableError when a dre content model cannot be expressed.
    """
    d = determinize_uta(to_uta(g))
    by_label: Dict[str, List[int]] = {}
    for i, a in enumerate(d.label_of):
        by_label.setdefault(a, []).append(i)
    name: Dict[int, str] = {}
    for a, ids in by_label.items():
        for k, i in enumerate(ids, 1):
            name[i] = a if len(ids) == 1 else f"{a}{SPECIALIZATION_MARK}{k}"
    to_name = {d.symbol(i): n for i, n in name.items()}
    horizontal = {}
    rules = {}
    mu = {n: d.label_of[i] for i, n in name.items()}
    for i, n in name.items():
        horizontal[i] = fa.rename_symbols(d.delta(i, d.label_of[i]), to_name)
        rules[n] = ContentModel.from_nfa(g.mechanism, horizontal[i], caps)
    accepting = sorted(d.finals)
    if len(accepting) == 1:
        start = name[accepting[0]]
    else:
        start = f"{g.root_element}{SPECIALIZATION_MARK}0"
        joined = fa.union_all(horizontal[i] for i in accepting)
        rules[start] = ContentModel.from_nfa(g.mechanism, joined, caps)
        mu[start] = g.root_element
    normalized = TreeGrammar(GrammarClass.EDTD, g.mechanism, start, rules, mu)
    return readable(reduce(normalized, caps), caps)


# ----- Comparing grammars ------

def _disjoint_union(grammars: Sequence[TreeGrammar]) -> Tuple[TreeGrammar, List[str]]:
    rules = {}
    mu = {}
    starts = []
    for k, g in enumerate(grammars):
        tag = lambda n, k=k: f"{n}~{k}"
        for n in g.names:
            mu[tag(n)] = g.mu[n]
            rules[tag(n)] = ContentModel(Mechanism.NFA, fa.rename_symbols(g.content(n).nfa, tag))
        starts.append(tag(g.start))
    return TreeGrammar(GrammarClass.EDTD, Mechanism.NFA, starts[0], rules, mu), starts


def boolean_witness(grammars: Sequence[TreeGrammar],
                    predicate: Callable[[Tuple[bool, ...]], bool]) -> Optional[UTree]:
    """
    A small tree t whose membership vector (t in L(g) for each grammar)
    satisfies `predicate`, or None when no tree does (the all-false vector is
    never tested).
    """
    joined, starts = _disjoint_union(grammars)
    d = determinize_uta(to_uta(joined))
    hits = [i for i, subset in enumerate(d.subsets)
            if predicate(tuple(s in subset for s in starts))]
    if not hits:
        return None
    return min((d.witnesses[i] for i in hits), key=lambda t: (len(t), str(t)))


def grammar_counterexample(g1: TreeGrammar, g2: TreeGrammar) -> Optional[UTree]:
    """A smallest-found tree in exactly one of the two languages."""
    return boolean_witness([g1, g2], lambda m: m[0] != m[1])


def grammar_includes(g1: TreeGrammar, g2: TreeGrammar) -> bool:
    return boolean_witness([g1, g2], lambda m: m[0] and not m[1]) is None


def grammars_intersect(g1: TreeGrammar, g2: TreeGrammar) -> bool:
    return boolean_witness([g1, g2], lambda m: m[0] and m[1]) is not None


def equivalent_grammar(g1: TreeGrammar, g2: TreeGrammar) -> bool:
    """
    Same language. Two reduced DTDs are compared name by name; every other
    pair goes through the determinized tree automata.
    """
    if g1.kind is GrammarClass.DTD and g2.kind is GrammarClass.DTD:
        return (g1.start == g2.start and g1.names == g2.names
                and all(same_language(g1.content(n), g2.content(n)) for n in g1.names))
    return grammar_counterexample(g1, g2) is None
