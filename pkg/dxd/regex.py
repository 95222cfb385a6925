# regex.py
"""
Regular expressions: text syntax, Glushkov automata, derivatives, and the
deterministic (one-unambiguous) expression machinery.

Text syntax
    atoms        identifiers, `ε` or `%e` (empty word), `%0` or `∅` (empty set)
    grouping     ( ... )
    postfix      `*`, `?`, `+` (a `+` glued to its operand and not followed by
                 another operand is the postfix plus)
    concatenation  juxtaposition, `,` or `·`
    alternation  `|`, or an infix `+`
"""
import logging
import re as _re
from dataclasses import dataclass
from functools import reduce
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Set, Tuple

import networkx as nx

from dxd import automata as fa
from dxd.automata import Nfa
from dxd.config import Caps, load_caps
from dxd.errors import ParseError, ResourceCapExceeded

logger = logging.getLogger(__name__)


# ----- AST ------

class Regex:
    __slots__ = ()

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Epsilon(Regex):
    pass


@dataclass(frozen=True)
class EmptySet(Regex):
    pass


@dataclass(frozen=True)
class Sym(Regex):
    name: str
    position: Optional[int] = None


@dataclass(frozen=True)
class Concat(Regex):
    left: Regex
    right: Regex


@dataclass(frozen=True)
class Alt(Regex):
    left: Regex
    right: Regex


@dataclass(frozen=True)
class Opt(Regex):
    inner: Regex


@dataclass(frozen=True)
class Plus(Regex):
    inner: Regex


@dataclass(frozen=True)
class Star(Regex):
    inner: Regex


EPSILON = Epsilon()
EMPTY = EmptySet()
UNARY = (Opt, Plus, Star)
BINARY = (Concat, Alt)


def children(r: Regex) -> Tuple[Regex, ...]:
    if isinstance(r, BINARY):
        return (r.left, r.right)
    if isinstance(r, UNARY):
        return (r.inner,)
    return ()


def size(r: Regex) -> int:
    return 1 + sum(size(c) for c in children(r))


def symbols(r: Regex) -> FrozenSet[str]:
    if isinstance(r, Sym):
        return frozenset({r.name})
    return frozenset().union(*(symbols(c) for c in children(r)))


# ----- Smart constructors ------

def cat(left: Regex, right: Regex) -> Regex:
    if isinstance(left, EmptySet) or isinstance(right, EmptySet):
        return EMPTY
    if isinstance(left, Epsilon):
        return right
    if isinstance(right, Epsilon):
        return left
    return Concat(left, right)


def alt(left: Regex, right: Regex) -> Regex:
    if isinstance(left, EmptySet):
        return right
    if isinstance(right, EmptySet) or left == right:
        return left
    if isinstance(left, Epsilon):
        return opt(right)
    if isinstance(right, Epsilon):
        return opt(left)
    return Alt(left, right)


def star(inner: Regex) -> Regex:
    if isinstance(inner, (EmptySet, Epsilon)):
        return EPSILON
    if isinstance(inner, (Star, Plus, Opt)):
        return Star(inner.inner)
    return Star(inner)


def plus(inner: Regex) -> Regex:
    if isinstance(inner, (EmptySet, Epsilon, Star, Plus)):
        return inner
    if isinstance(inner, Opt):
        return Star(inner.inner)
    return Plus(inner)


def opt(inner: Regex) -> Regex:
    if isinstance(inner, EmptySet):
        return EPSILON
    if nullable(inner):
        return inner
    if isinstance(inner, Plus):
        return Star(inner.inner)
    return Opt(inner)


def cat_all(parts: Iterable[Regex]) -> Regex:
    return reduce(cat, parts, EPSILON)


def alt_all(parts: Iterable[Regex]) -> Regex:
    return reduce(alt, parts, EMPTY)


def simplify(r: Regex) -> Regex:
    if isinstance(r, Concat):
        return cat(simplify(r.left), simplify(r.right))
    if isinstance(r, Alt):
        return alt(simplify(r.left), simplify(r.right))
    if isinstance(r, Star):
        return star(simplify(r.inner))
    if isinstance(r, Plus):
        return plus(simplify(r.inner))
    if isinstance(r, Opt):
        return opt(simplify(r.inner))
    return r


def substitute(r: Regex, table: Mapping[str, Regex]) -> Regex:
    """Replace symbols by expressions; the result is simplified."""
    if isinstance(r, Sym):
        return table.get(r.name, r)
    if isinstance(r, Concat):
        return cat(substitute(r.left, table), substitute(r.right, table))
    if isinstance(r, Alt):
        return alt(substitute(r.left, table), substitute(r.right, table))
    if isinstance(r, Star):
        return star(substitute(r.inner, table))
    if isinstance(r, Plus):
        return plus(substitute(r.inner, table))
    if isinstance(r, Opt):
        return opt(substitute(r.inner, table))
    return r


def rename(r: Regex, mapping: Mapping[str, str]) -> Regex:
    return substitute(r, {a: Sym(b) for a, b in mapping.items()})


# ----- Parsing ------

IDENT = r"[A-Za-z_][A-Za-z0-9_.:#\-]*"
_TOKEN = _re.compile(rf"\s*(?:(?P<ident>{IDENT})|(?P<eps>ε|%e)|(?P<empty>%0|∅)|(?P<op>[()|,·*?+]))")
_CHAR_TOKEN = _re.compile(r"\s*(?:(?P<ident>[A-Za-z0-9_])|(?P<eps>ε|%e)|(?P<empty>%0|∅)|(?P<op>[()|,·*?+]))")
_OPERAND_START = ("ident", "eps", "empty", "(")


def is_name(text: str) -> bool:
    return _re.fullmatch(IDENT, text) is not None


@dataclass
class _Token:
    kind: str
    value: str
    position: int
    glued: bool


def _tokenize(text: str, char_symbols: bool) -> List[_Token]:
    pattern = _CHAR_TOKEN if char_symbols else _TOKEN
    tokens: List[_Token] = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = pattern.match(text, pos)
        if m is None:
            stripped = len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[pos + stripped]!r}", position=pos + stripped)
        kind = m.lastgroup
        value = m.group(kind)
        start = m.start(kind)
        kind = value if kind == "op" else kind
        tokens.append(_Token(kind, value, start, start == pos))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str, char_symbols: bool):
        self.text = text
        self.tokens = _tokenize(text, char_symbols)
        self.i = 0

    def peek(self, offset: int = 0) -> Optional[_Token]:
        j = self.i + offset
        return self.tokens[j] if j < len(self.tokens) else None

    def error(self, message: str) -> ParseError:
        tok = self.peek()
        position = tok.position if tok else len(self.text)
        return ParseError(message, position=position)

    def parse(self) -> Regex:
        if not self.tokens:
            raise ParseError("empty expression (write ε or %e for the empty word)", position=0)
        r = self.alternation()
        if self.peek() is not None:
            raise self.error(f"unexpected {self.peek().value!r}")
        return r

    def _is_postfix_plus(self) -> bool:
        tok = self.peek()
        if tok is None or tok.kind != "+" or not tok.glued:
            return False
        following = self.peek(1)
        return following is None or following.kind not in _OPERAND_START or not following.glued

    def alternation(self) -> Regex:
        left = self.concatenation()
        while True:
            tok = self.peek()
            if tok is None or tok.kind not in ("|", "+"):
                return left
            self.i += 1
            left = Alt(left, self.concatenation())

    def concatenation(self) -> Regex:
        left = self.postfix()
        while True:
            tok = self.peek()
            if tok is None:
                return left
            if tok.kind in (",", "·"):
                self.i += 1
                left = Concat(left, self.postfix())
            elif tok.kind in _OPERAND_START:
                left = Concat(left, self.postfix())
            else:
                return left

    def postfix(self) -> Regex:
        r = self.atom()
        while True:
            tok = self.peek()
            if tok is None:
                return r
            if tok.kind == "*":
                r = Star(r)
            elif tok.kind == "?":
                r = Opt(r)
            elif tok.kind == "+" and self._is_postfix_plus():
                r = Plus(r)
            else:
                return r
            self.i += 1

    def atom(self) -> Regex:
        tok = self.peek()
        if tok is None:
            raise self.error("expression ends where an operand is expected")
        self.i += 1
        if tok.kind == "ident":
            return Sym(tok.value)
        if tok.kind == "eps":
            return EPSILON
        if tok.kind == "empty":
            return EMPTY
        if tok.kind == "(":
            if self.peek() is not None and self.peek().kind == ")":
                self.i += 1
                return EPSILON
            inner = self.alternation()
            closing = self.peek()
            if closing is None or closing.kind != ")":
                raise self.error("missing ')'")
            self.i += 1
            return inner
        self.i -= 1
        raise self.error(f"unexpected {tok.value!r}")


def parse_regex(text: str, *, char_symbols: bool = False) -> Regex:
    """
    Parse the text syntax. With char_symbols every letter or digit is its own
    symbol, so "(ab)+" reads as Plus(Concat(a, b)).
    """
    return _Parser(text, char_symbols).parse()


# ----- Printing ------

_PREC = {Alt: 0, Concat: 1, Opt: 2, Plus: 2, Star: 2}


def to_text(r: Regex, char_symbols: bool = False) -> str:
    sep = "" if char_symbols else ", "

    def wrap(child: Regex, level: int) -> str:
        text = go(child)
        if _PREC.get(type(child), 3) < level:
            return f"({text})"
        return text

    def go(node: Regex) -> str:
        if isinstance(node, Epsilon):
            return "ε"
        if isinstance(node, EmptySet):
            return "%0"
        if isinstance(node, Sym):
            return node.name
        if isinstance(node, Alt):
            right = go(node.right)
            if isinstance(node.right, Alt):
                right = f"({right})"
            return f"{wrap(node.left, 0)} | {right}"
        if isinstance(node, Concat):
            right = wrap(node.right, 2) if isinstance(node.right, Concat) else wrap(node.right, 1)
            return f"{wrap(node.left, 1)}{sep}{right}"
        op = {Opt: "?", Plus: "+", Star: "*"}[type(node)]
        return f"{wrap(node.inner, 3)}{op}"

    return go(r)


# ----- Glushkov automaton ------

def marked(r: Regex) -> Regex:
    """Number symbol occurrences 1..k from left to right."""
    counter = [0]

    def go(node: Regex) -> Regex:
        if isinstance(node, Sym):
            counter[0] += 1
            return Sym(node.name, counter[0])
        if isinstance(node, BINARY):
            left = go(node.left)
            return type(node)(left, go(node.right))
        if isinstance(node, UNARY):
            return type(node)(go(node.inner))
        return node

    return go(r)


def nullable(r: Regex) -> bool:
    if isinstance(r, (Epsilon, Star, Opt)):
        return True
    if isinstance(r, (EmptySet, Sym)):
        return False
    if isinstance(r, Concat):
        return nullable(r.left) and nullable(r.right)
    if isinstance(r, Alt):
        return nullable(r.left) or nullable(r.right)
    return nullable(r.inner)


def _first(r: Regex) -> Set[int]:
    if isinstance(r, Sym):
        return {r.position}
    if isinstance(r, Concat):
        return _first(r.left) | (_first(r.right) if nullable(r.left) else set())
    if isinstance(r, Alt):
        return _first(r.left) | _first(r.right)
    if isinstance(r, UNARY):
        return _first(r.inner)
    return set()


def _last(r: Regex) -> Set[int]:
    if isinstance(r, Sym):
        return {r.position}
    if isinstance(r, Concat):
        return _last(r.right) | (_last(r.left) if nullable(r.right) else set())
    if isinstance(r, Alt):
        return _last(r.left) | _last(r.right)
    if isinstance(r, UNARY):
        return _last(r.inner)
    return set()


def _follow(r: Regex, table: Dict[int, Set[int]]) -> None:
    if isinstance(r, Concat):
        for p in _last(r.left):
            table[p] |= _first(r.right)
    if isinstance(r, (Star, Plus)):
        for p in _last(r.inner):
            table[p] |= _first(r.inner)
    for c in children(r):
        _follow(c, table)


def _positions(r: Regex) -> Dict[int, str]:
    if isinstance(r, Sym):
        return {r.position: r.name}
    out: Dict[int, str] = {}
    for c in children(r):
        out.update(_positions(c))
    return out


def to_nfa(r: Regex, alphabet: Iterable[str] = ()) -> Nfa:
    """Epsilon-free position automaton: state 0 plus one state per symbol occurrence."""
    m = marked(r)
    names = _positions(m)
    follow: Dict[int, Set[int]] = {p: set() for p in names}
    _follow(m, follow)
    transitions = {(0, names[p], p) for p in _first(m)}
    transitions |= {(p, names[q], q) for p in follow for q in follow[p]}
    finals = set(_last(m)) | ({0} if nullable(m) else set())
    labels = {0: None, **{p: (names[p], p) for p in names}}
    return fa.make({0} | set(names), set(alphabet) | set(names.values()), transitions, 0, finals, labels)


def is_dre(r: Regex) -> bool:
    """No two positions with the same symbol compete: the position automaton is deterministic."""
    return to_nfa(r).is_deterministic


# ----- Derivatives ------

def derivative(r: Regex, a: str) -> Regex:
    if isinstance(r, Sym):
        return EPSILON if r.name == a else EMPTY
    if isinstance(r, Concat):
        head = cat(derivative(r.left, a), r.right)
        return alt(head, derivative(r.right, a)) if nullable(r.left) else head
    if isinstance(r, Alt):
        return alt(derivative(r.left, a), derivative(r.right, a))
    if isinstance(r, Star):
        return cat(derivative(r.inner, a), r)
    if isinstance(r, Plus):
        return cat(derivative(r.inner, a), star(r.inner))
    if isinstance(r, Opt):
        return derivative(r.inner, a)
    return EMPTY


def matches(r: Regex, w: Iterable[str]) -> bool:
    for a in w:
        r = derivative(r, a)
        if isinstance(r, EmptySet):
            return False
    return nullable(r)


# ----- Automaton to expression ------

def from_nfa(a: Nfa) -> Regex:
    """State elimination over the trimmed machine."""
    a = fa.trim(fa.remove_epsilon(a))
    if not a.finals:
        return EMPTY
    start, end = "start", "end"
    edges: Dict[Tuple, Regex] = {}

    def add(p, q, r):
        edges[(p, q)] = alt(edges.get((p, q), EMPTY), r)

    add(start, a.initial, EPSILON)
    for f in a.finals:
        add(f, end, EPSILON)
    for p, s, q in sorted(a.transitions, key=fa._transition_key):
        add(p, q, Sym(s))
    for k in sorted(a.states):
        loop = star(edges.pop((k, k), EMPTY))
        incoming = [(p, r) for (p, q), r in edges.items() if q == k]
        outgoing = [(q, r) for (p, q), r in edges.items() if p == k]
        for p, _ in incoming:
            del edges[(p, k)]
        for q, _ in outgoing:
            del edges[(k, q)]
        for p, rin in incoming:
            for q, rout in outgoing:
                add(p, q, cat(cat(rin, loop), rout))
    return edges.get((start, end), EMPTY)


# ----- One-unambiguity ------

def _consistent(m: Nfa) -> Dict[str, int]:
    """Symbols a for which every final state moves on a to one common state f(a)."""
    if not m.finals:
        return {}
    result = {}
    for a in sorted(m.alphabet):
        targets = {m.delta.get((f, a)) for f in m.finals}
        if len(targets) == 1:
            target = targets.pop()
            if target is not None:
                result[a] = next(iter(target))
    return result


def _cut(m: Nfa, consistent: Mapping[str, int]) -> Nfa:
    transitions = {(p, s, q) for p, s, q in m.transitions
                   if not (p in m.finals and s in consistent)}
    return fa.make(m.states, m.alphabet, transitions, m.initial, m.finals, m.labels)


def _orbits(m: Nfa) -> Dict[int, FrozenSet[int]]:
    g = fa.graph(m)
    orbit_of = {}
    for component in nx.strongly_connected_components(g):
        component = frozenset(component)
        for q in component:
            orbit_of[q] = component
    return orbit_of


def _nontrivial(m: Nfa, orbit: FrozenSet[int]) -> bool:
    if len(orbit) > 1:
        return True
    q = next(iter(orbit))
    return any(p == q and r == q for p, _, r in m.transitions)


def _gates(m: Nfa, orbit: FrozenSet[int]) -> Set[int]:
    return {q for q in orbit
            if q in m.finals or any(r not in orbit for _, r in m.outgoing[q])}


def _exits(m: Nfa, q: int, orbit: FrozenSet[int]) -> FrozenSet[Tuple[str, int]]:
    return frozenset((s, r) for s, r in m.outgoing[q] if r not in orbit)


def _has_orbit_property(m: Nfa, orbit_of: Mapping[int, FrozenSet[int]]) -> bool:
    for orbit in set(orbit_of.values()):
        gates = _gates(m, orbit)
        signatures = {(q in m.finals, _exits(m, q, orbit)) for q in gates}
        if len(signatures) > 1:
            return False
    return True


def _orbit_automaton(m: Nfa, q: int, orbit: FrozenSet[int]) -> Nfa:
    transitions = {(p, s, r) for p, s, r in m.transitions if p in orbit and r in orbit}
    return fa.canonical(fa.make(orbit, m.alphabet, transitions, q, _gates(m, orbit)))


def _one_unambiguous(m: Nfa) -> bool:
    if not m.transitions:
        return True
    consistent = _consistent(m)
    whole = _orbits(m)[m.initial]
    if whole == m.states and _nontrivial(m, whole) and not consistent:
        return False
    cut = _cut(m, consistent)
    orbit_of = _orbits(cut)
    if not _has_orbit_property(cut, orbit_of):
        return False
    for orbit in set(orbit_of.values()):
        if _nontrivial(cut, orbit):
            if not _one_unambiguous(_orbit_automaton(cut, min(orbit), orbit)):
                return False
    return True


def is_one_unambiguous(a: Nfa) -> bool:
    """Whether L(a) is denoted by some deterministic expression (orbit-property test)."""
    return _one_unambiguous(fa.canonical(a))


class _DreBuilder:
    def __init__(self, caps: Caps):
        self.caps = caps
        self.memo: Dict[tuple, Regex] = {}

    def charge(self, r: Regex) -> Regex:
        if size(r) > self.caps.regex_nodes:
            raise ResourceCapExceeded("regex_nodes", self.caps.regex_nodes,
                                      "deterministic expression grows past the cap")
        return r

    def dre(self, m: Nfa) -> Regex:
        """m is canonical: trimmed and minimal."""
        if not m.finals:
            return EMPTY
        key = ("dre", m.transitions, m.finals, m.initial)
        if key in self.memo:
            return self.memo[key]
        consistent = _consistent(m)
        cut = _cut(m, consistent)
        orbit_of = _orbits(cut)
        head = self.orbit_dre(cut, cut.initial, orbit_of)
        if consistent:
            loops = alt_all(cat(Sym(a), self.orbit_dre(cut, target, orbit_of))
                            for a, target in sorted(consistent.items()))
            head = cat(head, star(loops))
        self.memo[key] = self.charge(head)
        return head

    def orbit_dre(self, m: Nfa, q: int, orbit_of: Mapping[int, FrozenSet[int]]) -> Regex:
        key = ("orbit", m.transitions, m.finals, q)
        if key in self.memo:
            return self.memo[key]
        orbit = orbit_of[q]
        inner = self.dre(_orbit_automaton(m, q, orbit)) if _nontrivial(m, orbit) else EPSILON
        gates = _gates(m, orbit)
        exits = set()
        final = False
        for g in gates:
            exits |= _exits(m, g, orbit)
            final = final or g in m.finals
        tail = [EPSILON] if final else []
        tail += [cat(Sym(s), self.orbit_dre(m, r, orbit_of)) for s, r in sorted(exits)]
        result = self.charge(cat(inner, alt_all(tail)))
        self.memo[key] = result
        return result


def to_dre(a: Nfa, caps: Optional[Caps] = None) -> Optional[Regex]:
    """
    A deterministic expression for L(a), or None when the language is not
    one-unambiguous. Raises ResourceCapExceeded past caps.regex_nodes.
    """
    m = fa.canonical(a)
    if not _one_unambiguous(m):
        return None
    r = _DreBuilder(caps or load_caps()).dre(m)
    if not is_dre(r) or not fa.equivalent(to_nfa(r), m):
        raise RuntimeError(f"deterministic expression synthesis failed for {to_text(r)}")
    logger.debug("dre synthesized with %d nodes", size(r))
    return r
