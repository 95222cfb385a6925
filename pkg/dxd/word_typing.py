# word_typing.py
"""
Word and box designs.

A word design pairs a target automaton with a kernel word
w0 f1 w1 ... fn wn; a typing gives one automaton per function. The perfect
automaton Ω glues local automata of the target: segment pieces delimited by
the words wi and slot pieces between them. Its slot unions Ωi bound every
sound typing from above, and the searches below look for typings among
unions of the cells of Dec(Ωi).

Box kernels replace each word wi by a box (a sequence of symbol sets) and
reuse every algorithm with box delimiters.
"""
import itertools
import logging
import math
import re
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple, Union

import networkx as nx
from more_itertools import unique_everseen
from tqdm import tqdm

from dxd import automata as fa
from dxd.automata import Nfa, Word
from dxd.config import Caps, load_caps
from dxd.errors import (ArityError, IncompatibleDesignError, KernelError, ParseError,
                        ResourceCapExceeded)
from dxd.log import progress_enabled
from dxd.trees import FUNCTION_PREFIX, function_name, is_function

logger = logging.getLogger(__name__)

Typing = List[Nfa]
Cell = FrozenSet[str]


def _check_functions(functions: Sequence[str]) -> None:
    seen = set()
    for f in functions:
        if f in seen:
            raise KernelError(f"function @{f} occurs twice", "duplicate-function")
        seen.add(f)


@dataclass(frozen=True)
class KernelWord:
    segments: Tuple[Word, ...]
    functions: Tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(tuple(w) for w in self.segments))
        object.__setattr__(self, "functions", tuple(function_name(f) for f in self.functions))
        if len(self.segments) != len(self.functions) + 1:
            raise ValueError("a kernel word has one more segment than functions")
        _check_functions(self.functions)

    @property
    def arity(self) -> int:
        return len(self.functions)

    @classmethod
    def from_labels(cls, labels: Sequence[str]) -> "KernelWord":
        """From a kernel string: element labels and '@f' docking points."""
        segments: List[List[str]] = [[]]
        functions = []
        for label in labels:
            if is_function(label):
                functions.append(function_name(label))
                segments.append([])
            else:
                segments[-1].append(label)
        return cls(tuple(tuple(s) for s in segments), tuple(functions))

    @classmethod
    def parse(cls, text: str, char_symbols: bool = False) -> "KernelWord":
        """`a @f1 c @f2 e`; with char_symbols every letter of a token is a symbol."""
        labels: List[str] = []
        for m in re.finditer(r"\S+", text):
            token = m.group()
            if is_function(token):
                if len(token) == 1:
                    raise ParseError("function name missing after '@'", position=m.start())
                labels.append(token)
            elif char_symbols:
                labels.extend(token)
            else:
                labels.append(token)
        return cls.from_labels(labels)

    def __str__(self) -> str:
        parts = [" ".join(self.segments[0])]
        for f, w in zip(self.functions, self.segments[1:]):
            parts.append(f"{FUNCTION_PREFIX}{f}")
            parts.append(" ".join(w))
        return " ".join(p for p in parts if p) or "ε"


@dataclass(frozen=True)
class KernelBox:
    boxes: Tuple[Tuple[Cell, ...], ...]
    functions: Tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "boxes", tuple(tuple(frozenset(c) for c in b) for b in self.boxes))
        object.__setattr__(self, "functions", tuple(function_name(f) for f in self.functions))
        if len(self.boxes) != len(self.functions) + 1:
            raise ValueError("a kernel box has one more box than functions")
        if any(not c for b in self.boxes for c in b):
            raise ValueError("box cells must be non-empty")
        _check_functions(self.functions)

    @property
    def arity(self) -> int:
        return len(self.functions)

    @classmethod
    def from_word(cls, w: KernelWord) -> "KernelBox":
        return cls(tuple(tuple(frozenset({s}) for s in seg) for seg in w.segments), w.functions)

    @classmethod
    def parse(cls, text: str) -> "KernelBox":
        """`{a,b}{c} @f1 {d}`; a bare symbol is a one-symbol cell."""
        boxes: List[List[Cell]] = [[]]
        functions = []
        pos = 0
        token = re.compile(r"\s*(?:\{(?P<cell>[^}]*)\}|(?P<fn>@\S+?)(?=[\s{]|$)|(?P<sym>[^\s{}@]+))")
        while pos < len(text):
            m = token.match(text, pos)
            if not m or m.end() == pos:
                if not text[pos:].strip():
                    break
                raise ParseError(f"unexpected {text[pos:].strip()[0]!r} in box kernel", position=pos)
            if m.group("cell") is not None:
                cell = frozenset(s for s in re.split(r"[\s,]+", m.group("cell")) if s)
                if not cell:
                    raise ParseError("empty box cell", position=m.start("cell"))
                boxes[-1].append(cell)
            elif m.group("fn"):
                functions.append(function_name(m.group("fn")))
                boxes.append([])
            else:
                boxes[-1].append(frozenset({m.group("sym")}))
            pos = m.end()
        return cls(tuple(tuple(b) for b in boxes), tuple(functions))

    def __str__(self) -> str:
        def show(box):
            return "".join("{" + ",".join(sorted(c)) + "}" for c in box)
        parts = [show(self.boxes[0])]
        for f, b in zip(self.functions, self.boxes[1:]):
            parts += [f"{FUNCTION_PREFIX}{f}", show(b)]
        return " ".join(p for p in parts if p) or "ε"


Kernel = Union[KernelWord, KernelBox]


@dataclass(frozen=True)
class WordDesign:
    target: Nfa
    kernel: Kernel

    def __post_init__(self):
        if any(s.startswith(FUNCTION_PREFIX) for s in self.target.alphabet):
            raise ValueError("target alphabet must not contain function symbols")

    @property
    def arity(self) -> int:
        return self.kernel.arity


def _segment_automaton(kernel: Kernel, i: int) -> Nfa:
    if isinstance(kernel, KernelBox):
        return fa.concat_all(fa.any_symbol(c) for c in kernel.boxes[i])
    return fa.word(kernel.segments[i])


def w_tau(kernel: Kernel, typing: Sequence[Nfa]) -> Nfa:
    """w0 τ1 w1 ... τn wn as one automaton."""
    typing = list(typing)
    if len(typing) != kernel.arity:
        raise ArityError(f"kernel has {kernel.arity} functions, typing has {len(typing)} types")
    parts = [_segment_automaton(kernel, 0)]
    for i, t in enumerate(typing, 1):
        parts += [t, _segment_automaton(kernel, i)]
    return fa.concat_all(parts)


# ----- Perfect automaton ------

@dataclass(frozen=True)
class Component:
    kind: str  # "segment" or "slot"
    index: int
    start: int
    end: int
    automaton: Nfa = field(compare=False)

    @property
    def key(self) -> Tuple[str, int, int, int]:
        return (self.kind, self.index, self.start, self.end)


@dataclass
class PerfectAutomaton:
    target: Nfa
    kernel: Kernel
    components: List[Component]
    links: List[Tuple[Component, Component]]
    slots: List[List[Nfa]]  # Aut(Ω_i) for i = 1..n, deduplicated by language
    composite: Nfa

    @property
    def compatible(self) -> bool:
        return bool(self.components)

    @property
    def arity(self) -> int:
        return self.kernel.arity

    def automata(self, i: int) -> List[Nfa]:
        """Aut(Ω_i), slots numbered from 1."""
        return self.slots[i - 1]

    def slot_type(self, i: int) -> Nfa:
        """Ω_i: the union of the legal slot automata of slot i."""
        return fa.union_all(self.slots[i - 1], self.target.alphabet)


def _relations(a: Nfa, kernel: Kernel) -> List[FrozenSet[Tuple[int, int]]]:
    if isinstance(kernel, KernelBox):
        return [fa.box_pairs(a, box) for box in kernel.boxes]
    return [fa.delimited_pairs(a, w) for w in kernel.segments]


def _language_key(a: Nfa):
    c = fa.canonical(a)
    return (c.transitions, c.finals)


def build_perfect(a: Nfa, kernel: Kernel) -> PerfectAutomaton:
    """
    Assemble Ω over the minimal DFA of `a`: segment automata A(q, q') for
    every pair delimiting w_i, slot automata A(q, r) from Fin(w_{i-1}) to
    Ini(w_i), epsilon links where an end state matches a start state, then
    keep only the pieces lying on a path from a first segment starting at the
    initial state to a last segment ending in a final state.
    """
    a = fa.canonical(a)
    n = kernel.arity
    relations = _relations(a, kernel)
    reach = graph_reach(a)
    g = nx.DiGraph()
    source, sink = ("source",), ("sink",)
    for i, pairs in enumerate(relations):
        for q, q2 in pairs:
            g.add_node(("segment", i, q, q2))
            if i == 0 and q == a.initial:
                g.add_edge(source, ("segment", i, q, q2))
            if i == n and q2 in a.finals:
                g.add_edge(("segment", i, q, q2), sink)
    for i in range(1, n + 1):
        ends = {q2 for _, q2 in relations[i - 1]}
        starts = {q for q, _ in relations[i]}
        for q in sorted(ends):
            for r in sorted(starts & reach[q]):
                slot = ("slot", i, q, r)
                for p, q2 in relations[i - 1]:
                    if q2 == q:
                        g.add_edge(("segment", i - 1, p, q), slot)
                for r2, r3 in relations[i]:
                    if r2 == r:
                        g.add_edge(slot, ("segment", i, r, r3))
    legal = set()
    if source in g and sink in g:
        legal = (nx.descendants(g, source) & nx.ancestors(g, sink)) - {source, sink}
    order = sorted(legal, key=lambda node: (node[1], node[0] == "segment", node[2], node[3]))
    components = [Component(kind, i, q, r, fa.local_automaton(a, q, r)) for kind, i, q, r in order]
    by_key = {c.key: c for c in components}
    links = [(by_key[u], by_key[v]) for u, v in g.edges if u in by_key and v in by_key]
    slots: List[List[Nfa]] = []
    for i in range(1, n + 1):
        pieces = [c.automaton for c in components if c.kind == "slot" and c.index == i]
        slots.append(list(unique_everseen(pieces, key=_language_key)))
    composite = _assemble(a, components, links, n)
    logger.debug("perfect automaton: %d legal components, slot sizes %s",
                 len(components), [len(s) for s in slots])
    return PerfectAutomaton(a, kernel, components, links, slots, composite)


def graph_reach(a: Nfa) -> Dict[int, FrozenSet[int]]:
    g = fa.graph(a)
    return {q: frozenset(nx.descendants(g, q) | {q}) for q in a.states}


def _assemble(a: Nfa, components: List[Component], links, n: int) -> Nfa:
    states = {0}
    transitions = set()
    labels = {0: "initial"}
    entry: Dict[tuple, int] = {}
    exit_: Dict[tuple, int] = {}
    offset = 1
    for c in components:
        copy, mapping = fa.relabel(c.automaton, offset)
        offset += len(copy.states)
        states |= copy.states
        transitions |= copy.transitions
        labels.update({mapping[q]: (c.key, q) for q in c.automaton.states})
        entry[c.key] = mapping[c.start]
        exit_[c.key] = mapping[c.end]
    finals = set()
    for c in components:
        if c.kind == "segment" and c.index == 0 and c.start == a.initial:
            transitions.add((0, fa.EPS, entry[c.key]))
        if c.kind == "segment" and c.index == n and c.end in a.finals:
            finals.add(exit_[c.key])
    for u, v in links:
        transitions.add((exit_[u.key], fa.EPS, entry[v.key]))
    return fa.make(states, a.alphabet, transitions, 0, finals, labels)


def compatible(a: Nfa, kernel: Kernel) -> bool:
    """Some extension of the kernel lies in L(a)."""
    return build_perfect(a, kernel).compatible


def omega_typing(p: PerfectAutomaton) -> Typing:
    if not p.compatible:
        raise IncompatibleDesignError(f"no extension of {p.kernel} is accepted by the target")
    return [p.slot_type(i) for i in range(1, p.arity + 1)]


def sequences(p: PerfectAutomaton, limit: int = 100) -> Iterator[Typing]:
    """Typings read off Seq(Ω): one slot automaton per slot along a path of Ω."""
    after: Dict[tuple, List[Component]] = {}
    for u, v in p.links:
        after.setdefault(u.key, []).append(v)
    firsts = [c for c in p.components if c.kind == "segment" and c.index == 0
              and c.start == p.target.initial]
    count = 0
    stack = [(c, ()) for c in reversed(firsts)]
    while stack and count < limit:
        c, chosen = stack.pop()
        if c.kind == "slot":
            chosen = chosen + (c.automaton,)
        if c.kind == "segment" and c.index == p.arity and c.end in p.target.finals:
            count += 1
            yield list(chosen)
        for nxt in reversed(after.get(c.key, [])):
            stack.append((nxt, chosen))


# ----- Decomposition ------

def decompose(p: PerfectAutomaton, i: int) -> List[Nfa]:
    """
    Dec(Ω_i): the non-empty languages ∩A1 − ∪A2 over the splits of Aut(Ω_i)
    into a non-empty A1 and its complement A2. Cells are pairwise disjoint and
    cover Ω_i.
    """
    automata = p.automata(i)
    cells = [fa.canonical(automata[0])] if automata else []
    for other in automata[1:]:
        other = fa.canonical(other)
        refined = []
        for c in cells:
            refined += [fa.canonical(fa.intersect(c, other)), fa.canonical(fa.difference(c, other))]
        covered = fa.union_all(cells, p.target.alphabet) if cells else fa.empty()
        refined.append(fa.canonical(fa.difference(other, covered)))
        cells = [c for c in refined if not fa.is_empty(c)]
    return cells


# ----- Checks ------

def sound(d: WordDesign, typing: Sequence[Nfa]) -> bool:
    return fa.includes(w_tau(d.kernel, typing), d.target)


def check_local(d: WordDesign, typing: Sequence[Nfa]) -> bool:
    return fa.equivalent(w_tau(d.kernel, typing), d.target)


def local_counterexample(d: WordDesign, typing: Sequence[Nfa]) -> Optional[Tuple[str, Word]]:
    """('unsound', w) for an extension outside the target, ('incomplete', w) for a missed target word."""
    ext = w_tau(d.kernel, typing)
    w = fa.counterexample(ext, d.target)
    if w is not None:
        return "unsound", w
    w = fa.counterexample(d.target, ext)
    if w is not None:
        return "incomplete", w
    return None


def check_maximal_local(d: WordDesign, typing: Sequence[Nfa],
                        p: Optional[PerfectAutomaton] = None) -> bool:
    """
    Local, and no cell of any Dec(Ω_i) can be added to τ_i: a cell that meets
    τ_i without being inside it, or that is disjoint from τ_i and keeps the
    typing sound, shows the typing is not maximal.
    """
    typing = list(typing)
    if not check_local(d, typing):
        return False
    p = p or build_perfect(d.target, d.kernel)
    for i in range(1, d.arity + 1):
        tau = typing[i - 1]
        for cell in decompose(p, i):
            if fa.includes(cell, tau):
                continue
            if not fa.is_empty(fa.intersect(cell, tau)):
                return False
            extended = typing[:i - 1] + [fa.union(tau, cell)] + typing[i:]
            if sound(d, extended):
                return False
    return True


def exists_perfect(d: WordDesign) -> Optional[Typing]:
    """(Ω_n) when it is local, else None."""
    p = build_perfect(d.target, d.kernel)
    if not p.compatible:
        return None
    omega = omega_typing(p)
    if check_local(d, omega):
        return omega
    return None


def check_perfect(d: WordDesign, typing: Sequence[Nfa]) -> bool:
    perfect = exists_perfect(d)
    if perfect is None:
        return False
    return len(perfect) == len(typing) and all(fa.equivalent(x, y) for x, y in zip(perfect, typing))


def dominates(upper: Sequence[Nfa], lower: Sequence[Nfa]) -> bool:
    """Slotwise inclusion of `lower` in `upper`."""
    return all(fa.includes(l, u) for u, l in zip(upper, lower))


# ----- Searches over cell vectors ------

def _check_caps(p: PerfectAutomaton, decs: List[List[Nfa]], caps: Caps) -> int:
    for i, automata in enumerate(p.slots, 1):
        if len(automata) > caps.slot_automata:
            raise ResourceCapExceeded("slot_automata", caps.slot_automata,
                                      f"slot {i} has {len(automata)} legal automata")
    total = math.prod((2 ** len(cells)) - 1 for cells in decs)
    if total > caps.search_vectors:
        raise ResourceCapExceeded("search_vectors", caps.search_vectors,
                                  f"{total} cell vectors to examine")
    return total


def _size_vectors(sizes: Sequence[int]) -> Iterator[Tuple[int, ...]]:
    """Per-slot subset sizes by decreasing total, larger leading slots first."""
    ranges = [range(k, 0, -1) for k in sizes]
    by_total: Dict[int, List[Tuple[int, ...]]] = {}
    for combo in itertools.product(*ranges):
        by_total.setdefault(sum(combo), []).append(combo)
    for total in sorted(by_total, reverse=True):
        yield from by_total[total]


def cell_vectors(decs: Sequence[Sequence[Nfa]]) -> Iterator[Tuple[Tuple[int, ...], ...]]:
    """
    Every vector (D_1..D_n) of non-empty cell subsets, by decreasing total
    number of cells, ties broken lexicographically slot by slot.
    """
    sizes = [len(cells) for cells in decs]
    for combo in _size_vectors(sizes):
        choices = [itertools.combinations(range(len(cells)), k) for cells, k in zip(decs, combo)]
        yield from itertools.product(*choices)


def _typing_of(decs: Sequence[Sequence[Nfa]], vector, alphabet) -> Typing:
    return [fa.union_all((cells[j] for j in chosen), alphabet) for cells, chosen in zip(decs, vector)]


def _search(d: WordDesign, caps: Optional[Caps], maximal: bool, collect: bool):
    caps = caps or load_caps()
    p = build_perfect(d.target, d.kernel)
    if not p.compatible:
        return p, []
    if d.arity == 0:
        return p, ([((), [])] if check_local(d, []) else [])
    decs = [decompose(p, i) for i in range(1, d.arity + 1)]
    total = _check_caps(p, decs, caps)
    found = []
    vectors = cell_vectors(decs)
    if progress_enabled():
        vectors = tqdm(vectors, total=total, desc="cell vectors", leave=False)
    for vector in vectors:
        if collect and any(_covers(v, vector) for v, _ in found):
            continue
        typing = _typing_of(decs, vector, d.target.alphabet)
        if not check_local(d, typing):
            continue
        if maximal and not collect and not check_maximal_local(d, typing, p):
            continue
        logger.info("local typing found with cells %s", vector)
        found.append((vector, typing))
        if not collect:
            break
    return p, found


def _covers(upper, lower) -> bool:
    """Each D_i of `lower` is inside the one of `upper`, `upper` being strictly larger."""
    return upper != lower and all(set(l) <= set(u) for u, l in zip(upper, lower))


def exists_local(d: WordDesign, caps: Optional[Caps] = None) -> Optional[Typing]:
    """
    A local typing built from Dec(Ω) cells, or None when there is none.
    Raises ResourceCapExceeded instead of answering when the search is too large.
    """
    _, found = _search(d, caps, maximal=False, collect=False)
    return found[0][1] if found else None


def exists_ml(d: WordDesign, caps: Optional[Caps] = None) -> Optional[Typing]:
    _, found = _search(d, caps, maximal=True, collect=False)
    return found[0][1] if found else None


def all_maximal_local(d: WordDesign, caps: Optional[Caps] = None) -> List[Typing]:
    """Every maximal local typing, in search order."""
    _, found = _search(d, caps, maximal=True, collect=True)
    return [typing for vector, typing in found
            if not any(_covers(other, vector) for other, _ in found)]


# ----- Box designs ------

def build_perfect_box(a: Nfa, kernel: KernelBox) -> PerfectAutomaton:
    return build_perfect(a, kernel)


def exists_local_box(d: WordDesign, caps: Optional[Caps] = None) -> Optional[Typing]:
    return exists_local(d, caps)


def exists_ml_box(d: WordDesign, caps: Optional[Caps] = None) -> Optional[Typing]:
    return exists_ml(d, caps)


def exists_perfect_box(d: WordDesign) -> Optional[Typing]:
    """
    The word criterion applied to a box kernel: (Ω_n) is returned when
    B(Ω_n) is equivalent to the target. Proven for word kernels only; callers
    report results of this path as an extended criterion.
    """
    return exists_perfect(d)
