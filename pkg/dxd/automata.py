# automata.py
"""
Finite automata over string symbols.

An Nfa is an immutable value; every operation below returns a new machine.
Epsilon transitions carry the symbol None. Composite constructions keep a
`labels` map from their state ids to a provenance value (the source state,
a subset of source states, a pair of states, ...) for diagnostics and for
the label matching done by the perfect automaton.
"""
import logging
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import (Callable, Dict, FrozenSet, Hashable, Iterable, List,
                    Mapping, Optional, Set, Tuple, Union)

import networkx as nx

logger = logging.getLogger(__name__)

EPS = None
Word = Tuple[str, ...]
Transition = Tuple[int, Optional[str], int]


@dataclass(frozen=True)
class Nfa:
    states: FrozenSet[int]
    alphabet: FrozenSet[str]
    transitions: FrozenSet[Transition]
    initial: int
    finals: FrozenSet[int]
    labels: Mapping[int, Hashable] = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "states", frozenset(self.states))
        object.__setattr__(self, "alphabet", frozenset(self.alphabet))
        object.__setattr__(self, "transitions", frozenset(self.transitions))
        object.__setattr__(self, "finals", frozenset(self.finals))
        if self.initial not in self.states:
            raise ValueError(f"initial state {self.initial} is not a state")
        if not self.finals <= self.states:
            raise ValueError("final states must be states")
        for p, s, q in self.transitions:
            if p not in self.states or q not in self.states:
                raise ValueError(f"transition {(p, s, q)} leaves the state set")
            if s is not EPS and s not in self.alphabet:
                raise ValueError(f"transition symbol {s!r} is not in the alphabet")

    @cached_property
    def delta(self) -> Dict[Tuple[int, Optional[str]], FrozenSet[int]]:
        table: Dict[Tuple[int, Optional[str]], Set[int]] = {}
        for p, s, q in self.transitions:
            table.setdefault((p, s), set()).add(q)
        return {k: frozenset(v) for k, v in table.items()}

    @cached_property
    def outgoing(self) -> Dict[int, List[Tuple[Optional[str], int]]]:
        table: Dict[int, List[Tuple[Optional[str], int]]] = {q: [] for q in self.states}
        for p, s, q in sorted(self.transitions, key=_transition_key):
            table[p].append((s, q))
        return table

    @cached_property
    def has_epsilon(self) -> bool:
        return any(s is EPS for _, s, _ in self.transitions)

    @property
    def is_deterministic(self) -> bool:
        if self.has_epsilon:
            return False
        return all(len(targets) == 1 for targets in self.delta.values())

    def label(self, q: int) -> Hashable:
        return self.labels.get(q, q)

    def __len__(self) -> int:
        return len(self.states)

    def __repr__(self) -> str:
        return (f"Nfa(states={len(self.states)}, alphabet={sorted(self.alphabet)}, "
                f"transitions={len(self.transitions)}, finals={sorted(self.finals)})")


def _transition_key(t: Transition):
    p, s, q = t
    return (p, "" if s is None else "\x01" + s, q)


# ----- Constructors ------

def make(states: Iterable[int], alphabet: Iterable[str], transitions: Iterable[Transition],
         initial: int, finals: Iterable[int], labels: Optional[Mapping[int, Hashable]] = None) -> Nfa:
    transitions = frozenset(transitions)
    alphabet = frozenset(alphabet) | {s for _, s, _ in transitions if s is not EPS}
    return Nfa(frozenset(states), alphabet, transitions, initial, frozenset(finals), dict(labels or {}))


def empty(alphabet: Iterable[str] = ()) -> Nfa:
    """The canonical empty-language machine: one non-final state."""
    return make({0}, alphabet, (), 0, ())


def epsilon(alphabet: Iterable[str] = ()) -> Nfa:
    return make({0}, alphabet, (), 0, {0})


def symbol(sym: str, alphabet: Iterable[str] = ()) -> Nfa:
    return make({0, 1}, set(alphabet) | {sym}, {(0, sym, 1)}, 0, {1})


def word(w: Iterable[str], alphabet: Iterable[str] = ()) -> Nfa:
    w = tuple(w)
    transitions = {(i, s, i + 1) for i, s in enumerate(w)}
    return make(range(len(w) + 1), set(alphabet) | set(w), transitions, 0, {len(w)})


def universal(alphabet: Iterable[str]) -> Nfa:
    alphabet = frozenset(alphabet)
    return make({0}, alphabet, {(0, s, 0) for s in alphabet}, 0, {0})


def any_symbol(alphabet: Iterable[str]) -> Nfa:
    alphabet = frozenset(alphabet)
    return make({0, 1}, alphabet, {(0, s, 1) for s in alphabet}, 0, {1})


def relabel(a: Nfa, offset: int = 0) -> Tuple[Nfa, Dict[int, int]]:
    """Renumber states to offset..offset+|K|-1 in sorted order; labels follow the states."""
    mapping = {q: offset + i for i, q in enumerate(sorted(a.states))}
    labels = {mapping[q]: a.label(q) for q in a.states}
    moved = make(mapping.values(), a.alphabet,
                 {(mapping[p], s, mapping[q]) for p, s, q in a.transitions},
                 mapping[a.initial], {mapping[q] for q in a.finals}, labels)
    return moved, mapping


# ----- Simulation ------

def epsilon_closure(a: Nfa, states: Iterable[int]) -> FrozenSet[int]:
    seen = set(states)
    stack = list(seen)
    while stack:
        q = stack.pop()
        for r in a.delta.get((q, EPS), ()):
            if r not in seen:
                seen.add(r)
                stack.append(r)
    return frozenset(seen)


def step(a: Nfa, states: FrozenSet[int], sym: str) -> FrozenSet[int]:
    moved = set()
    for q in states:
        moved.update(a.delta.get((q, sym), ()))
    return epsilon_closure(a, moved) if a.has_epsilon else frozenset(moved)


def start_set(a: Nfa) -> FrozenSet[int]:
    return epsilon_closure(a, {a.initial})


def run(a: Nfa, w: Iterable[str], start: Optional[Iterable[int]] = None) -> FrozenSet[int]:
    current = epsilon_closure(a, start) if start is not None else start_set(a)
    for sym in w:
        if not current:
            break
        current = step(a, current, sym)
    return current


def accepts(a: Nfa, w: Iterable[str]) -> bool:
    """True iff w is in L(a); symbols outside the alphabet simply fail."""
    return bool(run(a, w) & a.finals)


def remove_epsilon(a: Nfa) -> Nfa:
    if not a.has_epsilon:
        return a
    closures = {q: epsilon_closure(a, {q}) for q in a.states}
    transitions = set()
    for q in a.states:
        for p in closures[q]:
            for s, r in a.outgoing[p]:
                if s is not EPS:
                    transitions.add((q, s, r))
    finals = {q for q in a.states if closures[q] & a.finals}
    return make(a.states, a.alphabet, transitions, a.initial, finals, a.labels)


# ----- Reachability ------

def graph(a: Nfa) -> nx.DiGraph:
    g = nx.DiGraph()
    g.add_nodes_from(a.states)
    g.add_edges_from((p, q) for p, _, q in a.transitions)
    return g


def useful_states(a: Nfa) -> FrozenSet[int]:
    g = graph(a)
    reachable = nx.descendants(g, a.initial) | {a.initial}
    productive = set()
    for f in a.finals:
        productive |= nx.ancestors(g, f) | {f}
    return frozenset(reachable & productive)


def is_empty(a: Nfa) -> bool:
    g = graph(a)
    reachable = nx.descendants(g, a.initial) | {a.initial}
    return not (reachable & a.finals)


def trim(a: Nfa) -> Nfa:
    """Keep only states on some accepting path; the empty language becomes `empty`."""
    keep = useful_states(a)
    if a.initial not in keep:
        return empty(a.alphabet)
    transitions = {(p, s, q) for p, s, q in a.transitions if p in keep and q in keep}
    return make(keep, a.alphabet, transitions, a.initial, a.finals & keep,
                {q: a.label(q) for q in keep})


# ----- Regular operations ------

def _disjoint(a: Nfa, b: Nfa) -> Tuple[Nfa, Nfa]:
    left, _ = relabel(a, 1)
    right, _ = relabel(b, 1 + len(left.states))
    return left, right


def concat(a: Nfa, b: Nfa) -> Nfa:
    left, right = _disjoint(a, b)
    transitions = set(left.transitions) | set(right.transitions)
    transitions |= {(f, EPS, right.initial) for f in left.finals}
    labels = {**left.labels, **right.labels}
    return make(left.states | right.states, a.alphabet | b.alphabet, transitions,
                left.initial, right.finals, labels)


def union(a: Nfa, b: Nfa) -> Nfa:
    left, right = _disjoint(a, b)
    transitions = set(left.transitions) | set(right.transitions)
    transitions |= {(0, EPS, left.initial), (0, EPS, right.initial)}
    labels = {**left.labels, **right.labels, 0: "start"}
    return make(left.states | right.states | {0}, a.alphabet | b.alphabet, transitions,
                0, left.finals | right.finals, labels)


def concat_all(parts: Iterable[Nfa], alphabet: Iterable[str] = ()) -> Nfa:
    result = epsilon(alphabet)
    for part in parts:
        result = concat(result, part)
    return result


def union_all(parts: Iterable[Nfa], alphabet: Iterable[str] = ()) -> Nfa:
    parts = list(parts)
    if not parts:
        return empty(alphabet)
    result = parts[0]
    for part in parts[1:]:
        result = union(result, part)
    if alphabet:
        result = with_alphabet(result, result.alphabet | frozenset(alphabet))
    return result


def star(a: Nfa) -> Nfa:
    inner, _ = relabel(a, 1)
    transitions = set(inner.transitions) | {(0, EPS, inner.initial)}
    transitions |= {(f, EPS, 0) for f in inner.finals}
    return make(inner.states | {0}, a.alphabet, transitions, 0, {0}, {**inner.labels, 0: "star"})


def plus(a: Nfa) -> Nfa:
    return concat(a, star(a))


def optional(a: Nfa) -> Nfa:
    return union(a, epsilon(a.alphabet))


def with_alphabet(a: Nfa, alphabet: Iterable[str]) -> Nfa:
    return make(a.states, alphabet, a.transitions, a.initial, a.finals, a.labels)


def intersect(a: Nfa, b: Nfa) -> Nfa:
    """Product construction over the reachable pairs of the epsilon-free machines."""
    a, b = remove_epsilon(a), remove_epsilon(b)
    ids: Dict[Tuple[int, int], int] = {}
    start = (a.initial, b.initial)
    ids[start] = 0
    queue = deque([start])
    transitions = set()
    while queue:
        pair = queue.popleft()
        p, q = pair
        for s, p2 in a.outgoing[p]:
            for q2 in b.delta.get((q, s), ()):
                target = (p2, q2)
                if target not in ids:
                    ids[target] = len(ids)
                    queue.append(target)
                transitions.add((ids[pair], s, ids[target]))
    finals = {i for (p, q), i in ids.items() if p in a.finals and q in b.finals}
    labels = {i: pair for pair, i in ids.items()}
    return make(ids.values(), a.alphabet | b.alphabet, transitions, 0, finals, labels)


def difference(a: Nfa, b: Nfa) -> Nfa:
    return intersect(a, complement(b, a.alphabet | b.alphabet))


COMPOSE_OPS: Dict[str, Callable[[Nfa, Nfa], Nfa]] = {
    "concat": concat,
    "union": union,
    "intersect": intersect,
    "difference": difference,
}


def compose(op: str, a: Nfa, b: Nfa) -> Nfa:
    try:
        return COMPOSE_OPS[op](a, b)
    except KeyError:
        raise ValueError(f"unknown operation {op!r}; expected one of {sorted(COMPOSE_OPS)}") from None


# ----- Deterministic machines ------

def determinize(a: Nfa) -> Nfa:
    """Subset construction over the reachable subsets; labels are the subsets."""
    start = start_set(a)
    ids: Dict[FrozenSet[int], int] = {start: 0}
    queue = deque([start])
    transitions = set()
    symbols = sorted(a.alphabet)
    while queue:
        subset = queue.popleft()
        for s in symbols:
            target = step(a, subset, s)
            if not target:
                continue
            if target not in ids:
                ids[target] = len(ids)
                queue.append(target)
            transitions.add((ids[subset], s, ids[target]))
    finals = {i for subset, i in ids.items() if subset & a.finals}
    labels = {i: subset for subset, i in ids.items()}
    return make(ids.values(), a.alphabet, transitions, 0, finals, labels)


def complete(d: Nfa, over: Optional[Iterable[str]] = None) -> Nfa:
    """Add a sink so every (state, symbol) pair over `over` has a move."""
    alphabet = frozenset(over) | d.alphabet if over is not None else d.alphabet
    missing = [(q, s) for q in sorted(d.states) for s in sorted(alphabet) if (q, s) not in d.delta]
    if not missing:
        return with_alphabet(d, alphabet)
    sink = max(d.states) + 1
    transitions = set(d.transitions) | {(q, s, sink) for q, s in missing}
    transitions |= {(sink, s, sink) for s in alphabet}
    labels = {**{q: d.label(q) for q in d.states}, sink: "sink"}
    return make(d.states | {sink}, alphabet, transitions, d.initial, d.finals, labels)


def minimize(d: Nfa) -> Nfa:
    """
    Minimal complete DFA for L(d) (Moore partition refinement).
    Accepts any machine; non-deterministic input is determinized first.
    """
    if not d.is_deterministic:
        d = determinize(d)
    d = complete(d)
    symbols = sorted(d.alphabet)
    reachable = nx.descendants(graph(d), d.initial) | {d.initial}
    block = {q: (q in d.finals) for q in reachable}
    while True:
        signature = {
            q: (block[q],) + tuple(block[next(iter(d.delta[(q, s)]))] for s in symbols)
            for q in reachable
        }
        names: Dict[tuple, int] = {}
        for q in sorted(reachable):
            names.setdefault(signature[q], len(names))
        refined = {q: names[signature[q]] for q in reachable}
        if len(set(refined.values())) == len(set(block.values())):
            block = refined
            break
        block = refined
    # renumber blocks so the initial block is 0 and the rest follow BFS order
    order: Dict[int, int] = {}
    queue = deque([block[d.initial]])
    order[block[d.initial]] = 0
    representative = {}
    for q in sorted(reachable):
        representative.setdefault(block[q], q)
    transitions = set()
    while queue:
        b = queue.popleft()
        q = representative[b]
        for s in symbols:
            target = block[next(iter(d.delta[(q, s)]))]
            if target not in order:
                order[target] = len(order)
                queue.append(target)
            transitions.add((order[b], s, order[target]))
    finals = {order[block[q]] for q in reachable if q in d.finals}
    return make(order.values(), d.alphabet, transitions, 0, finals)


def complement(a: Nfa, over: Iterable[str]) -> Nfa:
    over = frozenset(over) | a.alphabet
    d = complete(determinize(with_alphabet(a, over)), over)
    return make(d.states, over, d.transitions, d.initial, d.states - d.finals, d.labels)


def canonical(a: Nfa) -> Nfa:
    """Trimmed minimal DFA; equal languages give isomorphic results."""
    return trim(minimize(a))


# ----- Comparison ------

def counterexample(a: Nfa, b: Nfa) -> Optional[Word]:
    """
    A shortest word in L(a) - L(b), or None when L(a) is included in L(b).
    Breadth-first search over pairs of reachable state sets.
    """
    start = (start_set(a), start_set(b))
    seen = {start}
    queue = deque([(start, ())])
    symbols = sorted(a.alphabet)
    while queue:
        (sa, sb), w = queue.popleft()
        if sa & a.finals and not sb & b.finals:
            return w
        for s in symbols:
            na = step(a, sa, s)
            if not na:
                continue
            nb = step(b, sb, s)
            pair = (na, nb)
            if pair not in seen:
                seen.add(pair)
                queue.append((pair, w + (s,)))
    return None


def includes(a: Nfa, b: Nfa) -> bool:
    """L(a) is a subset of L(b)."""
    return counterexample(a, b) is None


def equivalent(a: Nfa, b: Nfa) -> bool:
    return includes(a, b) and includes(b, a)


def words(a: Nfa, max_len: int) -> Set[Word]:
    """Every accepted word of length at most max_len."""
    a = trim(a)
    found: Set[Word] = set()
    frontier = {((), start_set(a))}
    for length in range(max_len + 1):
        next_frontier = set()
        for w, current in frontier:
            if current & a.finals:
                found.add(w)
            if length == max_len:
                continue
            for s in sorted(a.alphabet):
                target = step(a, current, s)
                if target:
                    next_frontier.add((w + (s,), target))
        frontier = next_frontier
    return found


# ----- Symbol-level rewriting ------

def used_symbols(a: Nfa) -> FrozenSet[str]:
    return frozenset(s for _, s, _ in trim(a).transitions if s is not EPS)


def rename_symbols(a: Nfa, mapping: Union[Mapping[str, str], Callable[[str], str]]) -> Nfa:
    fn = mapping if callable(mapping) else (lambda s: mapping.get(s, s))
    transitions = {(p, None if s is EPS else fn(s), q) for p, s, q in a.transitions}
    return make(a.states, {fn(s) for s in a.alphabet}, transitions, a.initial, a.finals, a.labels)


def restrict(a: Nfa, symbols: Iterable[str]) -> Nfa:
    """Drop every transition whose symbol lies outside `symbols`."""
    symbols = frozenset(symbols)
    transitions = {(p, s, q) for p, s, q in a.transitions if s is EPS or s in symbols}
    return make(a.states, a.alphabet & symbols, transitions, a.initial, a.finals, a.labels)


def substitute(a: Nfa, table: Mapping[str, Nfa]) -> Nfa:
    """Replace each transition on a symbol of `table` by a copy of its automaton."""
    base, _ = relabel(a, 0)
    states = set(base.states)
    transitions = set()
    labels = dict(base.labels)
    alphabet = set(base.alphabet) - set(table)
    next_id = len(states)
    for p, s, q in sorted(base.transitions, key=_transition_key):
        if s is EPS or s not in table:
            transitions.add((p, s, q))
            continue
        copy, _ = relabel(table[s], next_id)
        next_id += len(copy.states)
        states |= copy.states
        labels.update(copy.labels)
        alphabet |= copy.alphabet
        transitions |= copy.transitions
        transitions.add((p, EPS, copy.initial))
        transitions |= {(f, EPS, q) for f in copy.finals}
    return make(states, alphabet, transitions, base.initial, base.finals, labels)


# ----- Delimiters and local automata ------

def word_relation(a: Nfa, w: Iterable[str]) -> FrozenSet[Tuple[int, int]]:
    """Pairs (q, q') with (q, w, q') in the extended transition relation."""
    a = remove_epsilon(a)
    return frozenset((q, r) for q in a.states for r in run(a, w, {q}))


def delimited_pairs(a: Nfa, w: Iterable[str]) -> FrozenSet[Tuple[int, int]]:
    return word_relation(a, tuple(w))


def delimiter_states(a: Nfa, w: Iterable[str]) -> Tuple[FrozenSet[int], FrozenSet[int]]:
    """(Ini(a, w), Fin(a, w)); for the empty word both are all states."""
    w = tuple(w)
    if not w:
        return a.states, a.states
    pairs = delimited_pairs(a, w)
    return frozenset(q for q, _ in pairs), frozenset(r for _, r in pairs)


def box_pairs(a: Nfa, cells: Iterable[Iterable[str]]) -> FrozenSet[Tuple[int, int]]:
    """
    Pairs (q, q') delimiting some string of the box, by composing the
    one-cell relations; the empty box relates every state to itself.
    """
    a = remove_epsilon(a)
    relation = {(q, q) for q in a.states}
    for cell in cells:
        cell = frozenset(cell)
        hop = {(p, r) for p, s, r in a.transitions if s in cell}
        by_source: Dict[int, Set[int]] = {}
        for p, r in hop:
            by_source.setdefault(p, set()).add(r)
        relation = {(q, r) for q, p in relation for r in by_source.get(p, ())}
        if not relation:
            break
    return frozenset(relation)


def box_delimiters(a: Nfa, cells: Iterable[Iterable[str]]) -> Tuple[FrozenSet[int], FrozenSet[int]]:
    cells = [frozenset(c) for c in cells]
    if not cells:
        return a.states, a.states
    pairs = box_pairs(a, cells)
    return frozenset(q for q, _ in pairs), frozenset(r for _, r in pairs)


def local_automaton(a: Nfa, qi: int, qf: int) -> Nfa:
    """
    The fragment of `a` made of the transitions on paths from qi to qf, with
    initial qi and single final qf. States keep their ids and labels from `a`.
    """
    if qi not in a.states or qf not in a.states:
        raise ValueError(f"states {qi}, {qf} must belong to the automaton")
    a = remove_epsilon(a)
    g = graph(a)
    forward = nx.descendants(g, qi) | {qi}
    backward = nx.ancestors(g, qf) | {qf}
    transitions = {(p, s, q) for p, s, q in a.transitions
                   if p in forward and q in backward}
    states = {qi, qf} | {p for p, _, _ in transitions} | {q for _, _, q in transitions}
    return make(states, a.alphabet, transitions, qi, {qf}, {q: a.label(q) for q in states})


def sample_words(a: Nfa, max_len: int, limit: int = 50) -> List[Word]:
    return sorted(words(a, max_len), key=lambda w: (len(w), w))[:limit]
