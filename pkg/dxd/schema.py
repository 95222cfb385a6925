# schema.py
"""
Regular tree grammars: DTDs, single-type EDTDs (SDTDs) and EDTDs.

A grammar maps (specialized) names to content models. Specialized names are
written `base#k` and μ(base#k) = base; a DTD uses plain element names only and
μ is the identity. Names without a rule are leaves (content ε).

Text format:

    class: edtd
    mechanism: nre
    root: eurostat
    eurostat -> averages, (nationalIndex#A, nationalIndex#B)+
    nationalIndex#A -> country, Good, index
"""
import logging
from collections import deque
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple, Union

from dxd import automata as fa
from dxd import regex as rx
from dxd.automata import Nfa
from dxd.config import Caps
from dxd.errors import (EmptyLanguageError, GrammarError, NotRepresentableError,
                        ParseError)
from dxd.regex import Regex

logger = logging.getLogger(__name__)

SPECIALIZATION_MARK = "#"


class GrammarClass(str, Enum):
    DTD = "dtd"
    SDTD = "sdtd"
    EDTD = "edtd"


class Mechanism(str, Enum):
    NFA = "nfa"
    DFA = "dfa"
    NRE = "nre"
    DRE = "dre"

    @property
    def is_regex(self) -> bool:
        return self in (Mechanism.NRE, Mechanism.DRE)


def base_name(name: str) -> str:
    return name.split(SPECIALIZATION_MARK, 1)[0]


# ----- Content models ------

@dataclass(frozen=True)
class ContentModel:
    mechanism: Mechanism
    payload: Union[Nfa, Regex]

    def __post_init__(self):
        if self.mechanism.is_regex != isinstance(self.payload, Regex):
            raise TypeError(f"{self.mechanism.value} content needs a "
                            f"{'regex' if self.mechanism.is_regex else 'automaton'} payload")
        if self.mechanism is Mechanism.DFA and not self.payload.is_deterministic:
            raise GrammarError("dfa content model is not deterministic")
        if self.mechanism is Mechanism.DRE and not rx.is_dre(self.payload):
            raise GrammarError(f"'{rx.to_text(self.payload)}' is not a deterministic expression")

    @cached_property
    def nfa(self) -> Nfa:
        if self.mechanism.is_regex:
            return rx.to_nfa(self.payload)
        return self.payload

    @cached_property
    def symbols(self) -> FrozenSet[str]:
        """Symbols occurring on some accepted word."""
        return fa.used_symbols(self.nfa)

    @cached_property
    def nullable(self) -> bool:
        return fa.accepts(self.nfa, ())

    def text(self) -> str:
        if self.mechanism.is_regex:
            return rx.to_text(self.payload)
        return rx.to_text(rx.from_nfa(self.nfa))

    def rename(self, mapping: Mapping[str, str], caps: Optional[Caps] = None) -> "ContentModel":
        if self.mechanism.is_regex:
            renamed = rx.rename(self.payload, mapping)
            if self.mechanism is Mechanism.DRE and not rx.is_dre(renamed):
                return ContentModel.from_nfa(Mechanism.DRE, rx.to_nfa(renamed), caps)
            return ContentModel(self.mechanism, renamed)
        renamed = fa.rename_symbols(self.nfa, mapping)
        if self.mechanism is Mechanism.DFA and not renamed.is_deterministic:
            renamed = fa.canonical(renamed)
        return ContentModel(self.mechanism, renamed)

    def restrict(self, keep: Iterable[str], caps: Optional[Caps] = None) -> "ContentModel":
        """Only the words over `keep`."""
        keep = frozenset(keep)
        if self.mechanism.is_regex:
            table = {s: rx.EMPTY for s in rx.symbols(self.payload) - keep}
            pruned = rx.substitute(self.payload, table)
            if self.mechanism is Mechanism.DRE and not rx.is_dre(pruned):
                return ContentModel.from_nfa(Mechanism.DRE, rx.to_nfa(pruned), caps)
            return ContentModel(self.mechanism, pruned)
        return ContentModel(self.mechanism, fa.trim(fa.restrict(self.nfa, keep)))

    @classmethod
    def parse(cls, mechanism: Mechanism, text: str) -> "ContentModel":
        r = rx.parse_regex(text)
        if mechanism.is_regex:
            return cls(mechanism, r)
        a = rx.to_nfa(r)
        return cls(mechanism, fa.canonical(a) if mechanism is Mechanism.DFA else a)

    @classmethod
    def from_nfa(cls, mechanism: Mechanism, a: Nfa, caps: Optional[Caps] = None) -> "ContentModel":
        """
        Express L(a) with the given mechanism. Raises NotRepresentableError when
        a deterministic expression is requested for a language that has none.
        """
        if mechanism is Mechanism.NFA:
            return cls(mechanism, fa.trim(a))
        if mechanism is Mechanism.DFA:
            return cls(mechanism, fa.canonical(a))
        if mechanism is Mechanism.NRE:
            return cls(mechanism, rx.from_nfa(a))
        r = rx.to_dre(a, caps)
        if r is None:
            raise NotRepresentableError(
                f"'{rx.to_text(rx.from_nfa(a))}' has no deterministic expression")
        return cls(mechanism, r)

    @classmethod
    def epsilon(cls, mechanism: Mechanism) -> "ContentModel":
        return _EPSILON_MODELS[mechanism]


_EPSILON_MODELS = {
    m: ContentModel(m, rx.EPSILON if m.is_regex else fa.epsilon()) for m in Mechanism
}


def same_language(c1: ContentModel, c2: ContentModel) -> bool:
    return fa.equivalent(c1.nfa, c2.nfa)


# ----- Grammars ------

@dataclass(frozen=True, eq=False)
class TreeGrammar:
    kind: GrammarClass
    mechanism: Mechanism
    start: str
    rules: Mapping[str, ContentModel]
    mu: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        rules = {n: c for n, c in self.rules.items()}
        names = {self.start} | set(rules)
        for c in rules.values():
            names |= c.symbols
        mu = {n: self.mu.get(n, base_name(n)) for n in names}
        object.__setattr__(self, "rules", rules)
        object.__setattr__(self, "mu", mu)
        for n, c in rules.items():
            if c.mechanism is not self.mechanism:
                raise GrammarError(f"rule for {n!r} uses {c.mechanism.value}, grammar uses {self.mechanism.value}")

    @cached_property
    def names(self) -> FrozenSet[str]:
        return frozenset(self.mu)

    @cached_property
    def elements(self) -> FrozenSet[str]:
        return frozenset(self.mu.values())

    def content(self, name: str) -> ContentModel:
        return self.rules.get(name) or ContentModel.epsilon(self.mechanism)

    def specializations(self, element: str) -> List[str]:
        return sorted(n for n, a in self.mu.items() if a == element)

    @property
    def root_element(self) -> str:
        return self.mu[self.start]

    def __repr__(self) -> str:
        return (f"TreeGrammar({self.kind.value}/{self.mechanism.value}, root={self.start}, "
                f"names={len(self.names)})")


def make_grammar(kind: Union[str, GrammarClass], mechanism: Union[str, Mechanism], start: str,
                 rules: Mapping[str, Union[str, ContentModel]],
                 mu: Optional[Mapping[str, str]] = None) -> TreeGrammar:
    """Build a grammar from rule texts (or ready content models)."""
    kind, mechanism = GrammarClass(kind), Mechanism(mechanism)
    models = {n: c if isinstance(c, ContentModel) else ContentModel.parse(mechanism, c)
              for n, c in rules.items()}
    return TreeGrammar(kind, mechanism, start, models, dict(mu or {}))


def with_kind(g: TreeGrammar, kind: GrammarClass) -> TreeGrammar:
    return replace(g, kind=kind)


def lift_dtd(g: TreeGrammar) -> TreeGrammar:
    """A DTD read as an SDTD with the identity μ."""
    return with_kind(g, GrammarClass.SDTD) if g.kind is GrammarClass.DTD else g


def rename_names(g: TreeGrammar, mapping: Mapping[str, str], caps: Optional[Caps] = None) -> TreeGrammar:
    """Rename specialized names; μ follows the renaming."""
    m = lambda n: mapping.get(n, n)
    rules = {m(n): c.rename(mapping, caps) for n, c in g.rules.items()}
    mu = {m(n): a for n, a in g.mu.items()}
    return TreeGrammar(g.kind, g.mechanism, m(g.start), rules, mu)


def readable(g: TreeGrammar, caps: Optional[Caps] = None) -> TreeGrammar:
    """
    Canonical names: a plain element name when it has a single specialization,
    `a#1`, `a#2`, ... in breadth-first order otherwise.
    """
    order = list(reachable(g))
    by_element: Dict[str, List[str]] = {}
    for n in order:
        by_element.setdefault(g.mu[n], []).append(n)
    mapping = {}
    for a, names in by_element.items():
        if len(names) == 1:
            mapping[names[0]] = a
        else:
            for k, n in enumerate(names, 1):
                mapping[n] = f"{a}{SPECIALIZATION_MARK}{k}"
    if all(k == v for k, v in mapping.items()):
        return g
    # two steps so that a target name never collides with a source name
    tmp = {n: f"{n}{SPECIALIZATION_MARK}~{i}" for i, n in enumerate(order)}
    staged = rename_names(g, tmp, caps)
    return rename_names(staged, {tmp[n]: mapping[n] for n in order}, caps)


# ----- Dual automaton, bound marking, reduction ------

def reachable(g: TreeGrammar, origin: Optional[str] = None) -> List[str]:
    """Names reachable from `origin` (default: the root), breadth-first."""
    origin = origin or g.start
    seen = [origin]
    known = {origin}
    queue = deque([origin])
    while queue:
        n = queue.popleft()
        for b in sorted(g.content(n).symbols):
            if b not in known:
                known.add(b)
                seen.append(b)
                queue.append(b)
    return seen


def dual(g: TreeGrammar) -> Nfa:
    """
    The vertical automaton: state 0 is q0, names get states 1..n in sorted
    order, edges read element names. Deterministic exactly for single-type
    grammars. State labels are the names (q0 is labelled None).
    """
    order = sorted(g.names)
    state = {n: i for i, n in enumerate(order, 1)}
    transitions = {(0, g.mu[g.start], state[g.start])}
    for a in order:
        for b in g.content(a).symbols:
            transitions.add((state[a], g.mu[b], state[b]))
    finals = {state[a] for a in order if g.content(a).nullable}
    labels = {0: None, **{i: n for n, i in state.items()}}
    return fa.make(range(len(order) + 1), g.elements, transitions, 0, finals, labels)


def mark_bound(g: TreeGrammar) -> FrozenSet[str]:
    """
    Names deriving at least one finite tree: start from the names with ε in
    their content and add a name as soon as its content has a word over bound
    names, until nothing changes.
    """
    bound = {n for n in g.names if g.content(n).nullable}
    changed = True
    while changed:
        changed = False
        for n in sorted(g.names - bound):
            if not fa.is_empty(fa.restrict(g.content(n).nfa, bound)):
                bound.add(n)
                changed = True
    return frozenset(bound)


def is_reduced(g: TreeGrammar) -> bool:
    bound = mark_bound(g)
    return bound >= g.names and set(reachable(g)) == set(g.names)


def reduce(g: TreeGrammar, caps: Optional[Caps] = None) -> TreeGrammar:
    """
    Drop the names that derive no finite tree or are unreachable, and rewrite
    every content model to the words over the remaining names.
    """
    bound = mark_bound(g)
    if g.start not in bound:
        raise EmptyLanguageError(f"grammar rooted at {g.start!r} defines no tree")
    rules = {}
    for n in bound:
        c = g.content(n)
        if not c.symbols <= bound:
            c = c.restrict(bound, caps)
        rules[n] = c
    pruned = TreeGrammar(g.kind, g.mechanism, g.start, rules, {n: g.mu[n] for n in bound})
    keep = set(reachable(pruned))
    rules = {n: c for n, c in rules.items() if n in keep and c is not ContentModel.epsilon(g.mechanism)}
    reduced = TreeGrammar(g.kind, g.mechanism, g.start, rules, {n: g.mu[n] for n in keep})
    logger.debug("reduced grammar %s: %d -> %d names", g.start, len(g.names), len(reduced.names))
    return reduced


def reroot(g: TreeGrammar, name: str) -> TreeGrammar:
    """The grammar of the trees derived from `name`."""
    if name not in g.names:
        raise KeyError(name)
    moved = TreeGrammar(g.kind, g.mechanism, name, g.rules, g.mu)
    keep = set(reachable(moved))
    return TreeGrammar(g.kind, g.mechanism, name,
                       {n: c for n, c in g.rules.items() if n in keep},
                       {n: g.mu[n] for n in keep})


def is_single_type(g: TreeGrammar) -> bool:
    """No content model mentions two specializations of one element name."""
    for n in reachable(g):
        seen: Dict[str, str] = {}
        for b in g.content(n).symbols:
            if seen.setdefault(g.mu[b], b) != b:
                return False
    return True


def check_class(g: TreeGrammar) -> None:
    """Raise GrammarError when `g` breaks the constraints of its declared class."""
    if g.kind is GrammarClass.DTD:
        special = sorted(n for n in g.names if g.mu[n] != n)
        if special:
            raise GrammarError(f"a dtd cannot use specialized names: {', '.join(special)}")
    elif g.kind is GrammarClass.SDTD and not is_single_type(g):
        raise GrammarError("sdtd is not single-type: a content model mixes specializations of one element")


# ----- Text format ------

_HEADERS = ("class", "mechanism", "root")


def parse_grammar(text: str, source: Optional[str] = None) -> TreeGrammar:
    """Parse the text format without reducing."""
    header: Dict[str, str] = {}
    rules: Dict[str, Tuple[str, int, int]] = {}
    order: List[str] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        arrow = "->" if "->" in line else ("→" if "→" in line else None)
        if arrow is None:
            key, sep, value = line.partition(":")
            key = key.strip().lower()
            if not sep or key not in _HEADERS:
                raise GrammarError(f"expected 'name -> content' or a header ({', '.join(_HEADERS)})",
                                   line=lineno, source=source)
            if key in header:
                raise GrammarError(f"duplicate header {key!r}", line=lineno, source=source)
            header[key] = value.strip()
            continue
        head, _, body = line.partition(arrow)
        head = head.strip()
        if not head or not rx.is_name(head):
            raise GrammarError(f"bad rule head {head!r}", line=lineno, source=source)
        if head in rules:
            raise GrammarError(f"duplicate rule for {head!r}", line=lineno, source=source)
        rules[head] = (body.strip(), lineno, raw.index(arrow) + len(arrow))
        order.append(head)
    if not rules and "root" not in header:
        raise GrammarError("empty grammar", source=source)
    try:
        kind = GrammarClass(header.get("class", "dtd").lower())
        mechanism = Mechanism(header.get("mechanism", "nre").lower())
    except ValueError as e:
        raise GrammarError(str(e), source=source) from e
    start = header.get("root") or order[0]
    models = {}
    for head in order:
        body, lineno, offset = rules[head]
        try:
            models[head] = ContentModel.parse(mechanism, body or "()")
        except ParseError as e:
            column = None if e.position is None else offset + e.position
            raise GrammarError(f"rule {head!r}: {e.message}", position=column,
                               line=lineno, source=source) from e
    g = TreeGrammar(kind, mechanism, start, models)
    check_class(g)
    return g


def load_grammar(text: str, source: Optional[str] = None,
                 caps: Optional[Caps] = None) -> Tuple[TreeGrammar, bool]:
    """Parse and reduce; also says whether the input was already reduced."""
    g = parse_grammar(text, source)
    was_reduced = is_reduced(g)
    g = reduce(g, caps) if not was_reduced else g
    check_class(g)
    if not was_reduced:
        logger.info("%s: grammar was not reduced, useless names dropped", source or "grammar")
    return g, was_reduced


def dump_grammar(g: TreeGrammar) -> str:
    lines = [f"class: {g.kind.value}", f"mechanism: {g.mechanism.value}", f"root: {g.start}"]
    heads = [n for n in reachable(g) if n in g.rules]
    heads += sorted(n for n in g.rules if n not in heads)
    for n in heads:
        lines.append(f"{n} -> {g.rules[n].text()}")
    return "\n".join(lines) + "\n"
