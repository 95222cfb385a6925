# bottom_up.py
"""
Bottom-up designs: a kernel plus one local type per docking point.

build_t_tau glues the local types into the kernel (the grammar T(τ1..τn)),
cons decides whether that language is definable in the design's class and
synthesize_type returns the global type when it is.

Naming inside T(τ1..τn):
  - the element node with preorder number j (counting from 1) is `label#j`;
  - a name n of the i-th local type becomes `n#f` (or `base#k.f` for a
    specialized `base#k`), f being the function name;
  - names copied from another grammar for fixed kernel data end in `#0` / `.0`.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from dxd import automata as fa
from dxd import regex as rx
from dxd.config import Caps
from dxd.document import KernelDoc
from dxd.errors import ArityError, GrammarError, NotRepresentableError
from dxd.schema import (SPECIALIZATION_MARK, ContentModel, GrammarClass, Mechanism,
                        TreeGrammar, is_single_type, reachable, readable, reduce,
                        reroot)
from dxd.tree_automata import equivalent_grammar
from dxd.trees import Path, function_name, is_function, postorder, preorder

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BottomUpDesign:
    kernel: KernelDoc
    typing: Tuple[TreeGrammar, ...]
    kind: GrammarClass = GrammarClass.EDTD
    mechanism: Optional[Mechanism] = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "typing", tuple(self.typing))
        object.__setattr__(self, "kind", GrammarClass(self.kind))
        if len(self.typing) != self.kernel.arity:
            raise ArityError(f"kernel has {self.kernel.arity} functions, typing has {len(self.typing)} types")
        mechanisms = {g.mechanism for g in self.typing}
        if self.mechanism is None:
            if len(mechanisms) > 1:
                raise GrammarError(f"typing mixes mechanisms {sorted(m.value for m in mechanisms)}")
            object.__setattr__(self, "mechanism", mechanisms.pop() if mechanisms else Mechanism.NRE)
        else:
            object.__setattr__(self, "mechanism", Mechanism(self.mechanism))
        for f, g in zip(self.kernel.functions, self.typing):
            check_root_fresh(f, g)
            if self.kind is GrammarClass.DTD and g.kind is not GrammarClass.DTD:
                raise GrammarError(f"type of {f} must be a dtd for a dtd design")
            if self.kind is GrammarClass.SDTD and not is_single_type(g):
                raise GrammarError(f"type of {f} must be single-type for an sdtd design")


def check_root_fresh(fname: str, g: TreeGrammar) -> None:
    for n in g.names:
        if g.start in g.content(n).symbols:
            raise GrammarError(f"root {g.start!r} of the type of {fname} occurs below the root")


# ----- Names ------

def kernel_name(label: str, index: int) -> str:
    return f"{label}{SPECIALIZATION_MARK}{index}"


def _suffixed(name: str, suffix: str) -> str:
    base, sep, rest = name.partition(SPECIALIZATION_MARK)
    return f"{base}{SPECIALIZATION_MARK}{rest}.{suffix}" if sep else f"{base}{SPECIALIZATION_MARK}{suffix}"


def typed_name(name: str, fname: str) -> str:
    return _suffixed(name, function_name(fname))


def anchor_name(name: str) -> str:
    return _suffixed(name, "0")


def kernel_names(k: KernelDoc) -> Dict[Path, str]:
    """The witness name of every element node of the kernel."""
    names = {}
    for path, node in preorder(k.tree):
        if not is_function(node.label):
            names[path] = kernel_name(node.label, len(names) + 1)
    return names


# ----- T(τ1..τn) ------

def _build_mechanism(typing: Sequence[TreeGrammar], mechanism: Optional[Mechanism]) -> Mechanism:
    if mechanism is not None and not mechanism.is_regex:
        return Mechanism.NFA
    if mechanism is not None:
        return mechanism
    mechanisms = {g.mechanism for g in typing}
    if mechanisms and all(m.is_regex for m in mechanisms):
        return Mechanism.DRE if mechanisms == {Mechanism.DRE} else Mechanism.NRE
    return Mechanism.NFA if mechanisms else Mechanism.NRE


def _convert(c: ContentModel, mechanism: Mechanism) -> ContentModel:
    if c.mechanism is mechanism:
        return c
    if mechanism is Mechanism.NFA:
        return ContentModel(Mechanism.NFA, c.nfa)
    return ContentModel(mechanism, c.payload)


def _symbols_model(names: Sequence[str], mechanism: Mechanism) -> ContentModel:
    if mechanism.is_regex:
        return ContentModel(mechanism, rx.alt_all(rx.Sym(n) for n in sorted(names)))
    return ContentModel(Mechanism.NFA, fa.make({0, 1}, names, {(0, n, 1) for n in names}, 0, {1}))


def _concat_models(parts: Sequence[ContentModel], mechanism: Mechanism) -> ContentModel:
    if mechanism.is_regex:
        return ContentModel(mechanism, rx.cat_all(p.payload for p in parts))
    joined = fa.concat_all(p.nfa for p in parts)
    return ContentModel(Mechanism.NFA, fa.trim(fa.remove_epsilon(joined)))


def build_t_tau(k: KernelDoc, typing: Sequence[TreeGrammar],
                mechanism: Optional[Mechanism] = None,
                anchors: Optional[Mapping[Path, Sequence[str]]] = None,
                anchor_grammar: Optional[TreeGrammar] = None) -> TreeGrammar:
    """
    The EDTD T(τ1..τn) whose language is the set of extensions of k by trees
    of the local types. The content of a kernel node concatenates, child by
    child, the witness of an element child or the root content of the type of
    a function child.

    `anchors` maps the paths of some kernel nodes to names of `anchor_grammar`;
    such a node is not expanded and its parent accepts there any tree derived
    from one of those names.
    """
    typing = list(typing)
    if len(typing) != k.arity:
        raise ArityError(f"kernel has {k.arity} functions, typing has {len(typing)} types")
    anchors = dict(anchors or {})
    mech = _build_mechanism(typing, mechanism)
    rules: Dict[str, ContentModel] = {}
    mu: Dict[str, str] = {}
    roots: Dict[str, ContentModel] = {}
    for fname, g in zip(k.functions, typing):
        check_root_fresh(fname, g)
        mapping = {n: typed_name(n, fname) for n in g.names}
        for n in g.names - {g.start}:
            mu[mapping[n]] = g.mu[n]
            if n in g.rules:
                rules[mapping[n]] = _convert(g.content(n).rename(mapping), mech)
        roots[fname] = _convert(g.content(g.start).rename(mapping), mech)
    names = kernel_names(k)
    skipped = set()
    for path, node in preorder(k.tree):
        if is_function(node.label) or path in skipped:
            continue
        mu[names[path]] = node.label
        if path in anchors and path != ():
            skipped.update(p for p, _ in preorder(node, path))
            continue
        if not node.children:
            continue
        parts = []
        for i, child in enumerate(node.children):
            p = path + (i,)
            if is_function(child.label):
                parts.append(roots[function_name(child.label)])
            elif p in anchors:
                parts.append(_symbols_model([anchor_name(n) for n in anchors[p]], mech))
            else:
                parts.append(_symbols_model([names[p]], mech))
        rules[names[path]] = _concat_models(parts, mech)
    if anchors:
        copies = set()
        for p, targets in anchors.items():
            for n in targets:
                copies.update(reachable(anchor_grammar, n))
        mapping = {n: anchor_name(n) for n in anchor_grammar.names}
        for n in copies:
            mu[mapping[n]] = anchor_grammar.mu[n]
            if n in anchor_grammar.rules:
                rules[mapping[n]] = _convert(anchor_grammar.content(n).rename(mapping), mech)
    t = TreeGrammar(GrammarClass.EDTD, mech, names[()], rules, mu)
    logger.debug("T(tau) for %s: %d names", k, len(t.names))
    return t


# ----- Consistency and synthesis ------

def _with_rule(g: TreeGrammar, name: str, c: ContentModel) -> TreeGrammar:
    rules = dict(g.rules)
    rules[name] = c
    return TreeGrammar(g.kind, g.mechanism, g.start, rules, g.mu)


def merge_witnesses(k: KernelDoc, t: TreeGrammar, caps: Optional[Caps] = None) -> Optional[TreeGrammar]:
    """
    Walk the kernel from the leaf parents up to the root; in the content of
    each kernel node, specializations of one element must have equal subtree
    languages and are merged into one. None when two of them differ or a
    merged dre content model has no deterministic expression.
    """
    names = kernel_names(k)
    for path, node in postorder(k.tree):
        if is_function(node.label) or not node.children or names[path] not in t.rules:
            continue
        name = names[path]
        groups: Dict[str, List[str]] = {}
        for s in sorted(t.content(name).symbols):
            groups.setdefault(t.mu[s], []).append(s)
        mapping = {}
        for element, members in groups.items():
            if len(members) < 2:
                continue
            rep = members[0]
            for other in members[1:]:
                if not equivalent_grammar(reroot(t, rep), reroot(t, other)):
                    logger.info("%s: %s and %s derive different trees", name, rep, other)
                    return None
                mapping[other] = rep
        if mapping:
            try:
                t = _with_rule(t, name, t.content(name).rename(mapping, caps))
            except NotRepresentableError:
                logger.info("%s: merged content has no deterministic expression", name)
                return None
    return TreeGrammar(GrammarClass.SDTD, t.mechanism, t.start, t.rules, t.mu)


def as_dtd(g: TreeGrammar, caps: Optional[Caps] = None) -> Optional[TreeGrammar]:
    """
    The DTD of a single-type grammar whose specializations of each element
    have the same content up to μ; None otherwise.
    """
    g = reduce(g, caps)
    groups: Dict[str, List[str]] = {}
    for n in sorted(g.names):
        groups.setdefault(g.mu[n], []).append(n)
    rules = {}
    for a, members in groups.items():
        contents = [g.content(n).rename(g.mu, caps) for n in members]
        if any(not fa.equivalent(contents[0].nfa, c.nfa) for c in contents[1:]):
            logger.info("element %s has specializations with different content", a)
            return None
        rules[a] = contents[0]
    return TreeGrammar(GrammarClass.DTD, g.mechanism, g.mu[g.start], rules)


def consistent_type(d: BottomUpDesign, caps: Optional[Caps] = None) -> Optional[TreeGrammar]:
    t = build_t_tau(d.kernel, d.typing, d.mechanism)
    if d.kind is GrammarClass.EDTD:
        return t
    merged = merge_witnesses(d.kernel, t, caps)
    if merged is None or d.kind is GrammarClass.SDTD:
        return merged
    return as_dtd(merged, caps)


def cons(d: BottomUpDesign, caps: Optional[Caps] = None) -> bool:
    """Whether the extensions of the design form a language of its class."""
    if d.kind is GrammarClass.EDTD:
        return True
    return consistent_type(d, caps) is not None


def to_mechanism(g: TreeGrammar, mechanism: Mechanism, caps: Optional[Caps] = None) -> TreeGrammar:
    if g.mechanism is mechanism:
        return g
    rules = {n: ContentModel.from_nfa(mechanism, c.nfa, caps) for n, c in g.rules.items()}
    return TreeGrammar(g.kind, mechanism, g.start, rules, g.mu)


def synthesize_type(d: BottomUpDesign, caps: Optional[Caps] = None) -> Optional[TreeGrammar]:
    """
    type_T(τ1..τn): the global type of the design in its class and mechanism,
    reduced; None when the design is not consistent.
    """
    g = consistent_type(d, caps)
    if g is None:
        return None
    g = to_mechanism(reduce(g, caps), d.mechanism, caps)
    return readable(g, caps)
