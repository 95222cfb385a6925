# tree_typing.py
"""
Top-down tree designs ⟨τ, T⟩ and their typing problems.

DTD and SDTD designs reduce to one word design per kernel node: the content
model of the node's name against the node's children string. EDTD designs
are first normalized; an assignment κ of specialization sets to kernel nodes
then induces one box design per node, whose cells are the κ sets of the
element children.

Kernel data mode: with "conform", a proper kernel subtree without docking
points is instance data. It is validated against the name it receives, and
the global checks accept there any tree of the names validating it. With
"exact", every node without function children must have a singleton content
language equal to its children string.
"""
import itertools
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, Iterator, List, Mapping, Optional, Sequence, Tuple

from more_itertools import powerset
from tqdm import tqdm

from dxd import automata as fa
from dxd import schema
from dxd import word_typing as wt
from dxd.automata import Nfa, Word
from dxd.bottom_up import BottomUpDesign, build_t_tau, cons, kernel_names
from dxd.config import KERNEL_DATA_MODES, Caps, load_caps
from dxd.document import KernelDoc, is_closed, state_sets
from dxd.errors import (ConfigError, GrammarError, InconsistentTypingError,
                        NotRepresentableError, ResourceCapExceeded)
from dxd.log import progress_enabled
from dxd.schema import (ContentModel, GrammarClass, Mechanism, TreeGrammar, dual, is_reduced,
                        is_single_type, reduce, reroot)
from dxd.tree_automata import equivalent_grammar, grammar_includes, normalize
from dxd.trees import Path, UTree, function_name, is_function, preorder, subtree

logger = logging.getLogger(__name__)

TreeTyping = List[TreeGrammar]
Kappa = Dict[Path, FrozenSet[str]]


class Property(str, Enum):
    LOC = "loc"
    ML = "ml"
    PERF = "perf"


@dataclass(frozen=True)
class TreeDesign:
    target: TreeGrammar
    kernel: KernelDoc
    kind: Optional[GrammarClass] = None

    def __post_init__(self):
        kind = GrammarClass(self.kind or self.target.kind)
        target = self.target if is_reduced(self.target) else reduce(self.target)
        if kind is GrammarClass.DTD and target.kind is not GrammarClass.DTD:
            raise GrammarError(f"a dtd design needs a dtd target, got {target.kind.value}")
        if kind is GrammarClass.SDTD:
            target = schema.lift_dtd(target)
            if not is_single_type(target):
                raise GrammarError("an sdtd design needs a single-type target")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "target", target)

    @property
    def arity(self) -> int:
        return self.kernel.arity


@dataclass(frozen=True)
class InducedDesign:
    path: Path
    names: FrozenSet[str]  # lab(x), the witness of x, or κ(x)
    design: wt.WordDesign

    @property
    def functions(self) -> Tuple[str, ...]:
        return self.design.kernel.functions


@dataclass
class Induction:
    designs: List[InducedDesign] = field(default_factory=list)
    fixed: Dict[Path, FrozenSet[str]] = field(default_factory=dict)
    names: Dict[Path, str] = field(default_factory=dict)
    failure: Optional[str] = None
    rejected: bool = False  # the kernel leaves the dual automaton

    @property
    def possible(self) -> bool:
        return self.failure is None


def _check_mode(kernel_data: str) -> None:
    if kernel_data not in KERNEL_DATA_MODES:
        raise ConfigError(f"kernel data mode must be one of {KERNEL_DATA_MODES}, got {kernel_data!r}")


def fixed_paths(k: KernelDoc, kernel_data: str = "conform") -> List[Path]:
    """Roots of the maximal proper subtrees holding no docking point (conform mode only)."""
    _check_mode(kernel_data)
    if kernel_data == "exact":
        return []
    found: List[Path] = []
    for path, node in preorder(k.tree):
        if path and is_closed(node) and not _inside(path, found):
            found.append(path)
    return found


def _inside(path: Path, roots: Sequence[Path]) -> bool:
    """Strictly below one of `roots`."""
    return any(len(r) < len(path) and path[:len(r)] == r for r in roots)


def _validating(node: UTree, g: TreeGrammar) -> FrozenSet[str]:
    return state_sets(node, g)[()]


def anchors(d: TreeDesign, kernel_data: str = "conform") -> Dict[Path, FrozenSet[str]]:
    """Fixed kernel subtrees mapped to the target names validating them."""
    return {p: _validating(subtree(d.kernel.tree, p), d.target) for p in fixed_paths(d.kernel, kernel_data)}


# ----- DTD and SDTD reductions ------

def _induce_witnessed(g: TreeGrammar, k: KernelDoc, kernel_data: str) -> Induction:
    """
    Walk the dual automaton top-down to name every kernel node, then build
    ⟨π(x̃), w_x⟩ for each node that is not fixed data.
    """
    out = Induction()
    walk = dual(g)
    fixed = fixed_paths(k, kernel_data)
    states: Dict[Path, FrozenSet[int]] = {(): frozenset({walk.initial})}
    for path, node in preorder(k.tree):
        if is_function(node.label) or _inside(path, fixed):
            continue
        reached = fa.step(walk, states[path[:-1]] if path else states[()], node.label)
        if not reached:
            out.failure = f"no name of the target derives {node.label} at {list(path)}"
            out.rejected = True
            return out
        states[path] = reached
        out.names[path] = walk.label(min(reached))
    for path, node in preorder(k.tree):
        if is_function(node.label) or _inside(path, fixed):
            continue
        name = out.names[path]
        if path in fixed:
            valid = _validating(node, g)
            out.fixed[path] = valid
            if name not in valid:
                out.failure = f"fixed subtree at {list(path)} is not valid for {name}"
                return out
            continue
        labels = [c.label if is_function(c.label) else out.names[path + (i,)]
                  for i, c in enumerate(node.children)]
        design = wt.WordDesign(g.content(name).nfa, wt.KernelWord.from_labels(labels))
        out.designs.append(InducedDesign(path, frozenset({name}), design))
    logger.debug("induced %d word designs, %d fixed subtrees", len(out.designs), len(out.fixed))
    return out


def induce_dtd(d: TreeDesign, kernel_data: str = "conform") -> Induction:
    """One design ⟨π(lab(x)), ch-str(x)⟩ per element node."""
    if d.kind is not GrammarClass.DTD:
        raise GrammarError("induce_dtd needs a dtd design")
    return _induce_witnessed(d.target, d.kernel, kernel_data)


def induce_sdtd(d: TreeDesign, kernel_data: str = "conform") -> Induction:
    """One design ⟨π(x̃), w_x⟩ per element node, x̃ being the witness of x."""
    if d.kind is GrammarClass.EDTD:
        raise GrammarError("induce_sdtd needs a dtd or sdtd design")
    return _induce_witnessed(schema.lift_dtd(d.target), d.kernel, kernel_data)


def _induce(d: TreeDesign, kernel_data: str) -> Induction:
    return induce_dtd(d, kernel_data) if d.kind is GrammarClass.DTD else induce_sdtd(d, kernel_data)


def fresh_root(g: TreeGrammar, fname: str) -> str:
    root = f"root_{function_name(fname)}"
    while root in g.names:
        root += "_"
    return root


def lift_typing(d: TreeDesign, slots: Mapping[str, Nfa], base: Optional[TreeGrammar] = None,
                caps: Optional[Caps] = None) -> TreeTyping:
    """
    Tree types from word types: τ_i has every rule of the target (or `base`)
    plus root_fi → slot type of f_i. When the target mechanism cannot express
    some slot, the whole typing falls back to nfa content models.
    """
    base = base or d.target
    mechanism = base.mechanism
    try:
        roots = {f: ContentModel.from_nfa(mechanism, slots[f], caps) for f in d.kernel.functions}
    except NotRepresentableError as e:
        logger.warning("typing kept as nfa content models: %s", e)
        mechanism = Mechanism.NFA
        roots = {f: ContentModel.from_nfa(mechanism, slots[f]) for f in d.kernel.functions}
    rules = {n: ContentModel(Mechanism.NFA, c.nfa) if mechanism is not base.mechanism else c
             for n, c in base.rules.items()}
    typing = []
    for f in d.kernel.functions:
        root = fresh_root(base, f)
        g = TreeGrammar(d.kind, mechanism, root, {**rules, root: roots[f]}, {**base.mu, root: root})
        typing.append(reduce(g, caps))
    return typing


def lift_dtd(d: TreeDesign, slots: Mapping[str, Nfa], caps: Optional[Caps] = None) -> TreeTyping:
    if d.kind is not GrammarClass.DTD:
        raise GrammarError("lift_dtd needs a dtd design")
    return lift_typing(d, slots, caps=caps)


def _solver(prop: Property, boxed: bool):
    if prop is Property.LOC:
        return wt.exists_local_box if boxed else wt.exists_local
    if prop is Property.ML:
        return wt.exists_ml_box if boxed else wt.exists_ml
    perfect = wt.exists_perfect_box if boxed else wt.exists_perfect
    return lambda design, caps: perfect(design)


def _solve(designs: Sequence[InducedDesign], prop: Property, caps: Caps) -> Optional[Dict[str, Nfa]]:
    slots: Dict[str, Nfa] = {}
    for ind in designs:
        solve = _solver(prop, isinstance(ind.design.kernel, wt.KernelBox))
        typing = solve(ind.design, caps)
        if typing is None:
            logger.info("node %s: no %s word typing", list(ind.path), prop.value)
            return None
        slots.update(zip(ind.functions, typing))
    return slots


def dtd_sdtd_exists(d: TreeDesign, prop: Property, caps: Optional[Caps] = None,
                    kernel_data: str = "conform") -> Optional[TreeTyping]:
    caps = caps or load_caps()
    ind = _induce(d, kernel_data)
    if not ind.possible:
        logger.info("no typing possible: %s", ind.failure)
        return None
    slots = _solve(ind.designs, Property(prop), caps)
    if slots is None:
        return None
    return lift_typing(d, slots, caps=caps)


def _word_slots(d: TreeDesign, ind: Induction, typing: Sequence[TreeGrammar]) -> Dict[str, Nfa]:
    """
    Root content of each τ_i over target names: a child name b̃ of τ_i becomes
    the specialization of μ(b̃) that the target allows under the parent's name.
    """
    g = d.target
    by_name = dict(zip(d.kernel.functions, typing))
    slots = {}
    for design in ind.designs:
        parent = next(iter(design.names))
        allowed = {g.mu[s]: s for s in g.content(parent).symbols}
        for f in design.functions:
            t = by_name[f]
            table = {n: allowed.get(t.mu[n], n) for n in t.content(t.start).symbols}
            slots[f] = fa.rename_symbols(t.content(t.start).nfa, table)
    return slots


def require_consistent(d: TreeDesign, typing: Sequence[TreeGrammar], caps: Optional[Caps] = None) -> None:
    """Raise InconsistentTypingError when the typing is not consistent for the design's class."""
    if not cons(BottomUpDesign(d.kernel, tuple(typing), d.kind), caps):
        raise InconsistentTypingError(f"typing is not {d.kind.value}-consistent for {d.kernel}")


def dtd_sdtd_check(d: TreeDesign, prop: Property, typing: Sequence[TreeGrammar],
                   caps: Optional[Caps] = None, kernel_data: str = "conform") -> bool:
    caps = caps or load_caps()
    typing = list(typing)
    require_consistent(d, typing, caps)
    ind = _induce(d, kernel_data)
    if ind.rejected:
        raise InconsistentTypingError(ind.failure)
    if not ind.possible or not global_check(d, typing, caps, kernel_data):
        return False
    if prop is Property.LOC:
        return True
    slots = _word_slots(d, ind, typing)
    for design in ind.designs:
        local = [slots[f] for f in design.functions]
        if prop is Property.ML and not wt.check_maximal_local(design.design, local):
            logger.info("node %s: word typing is not maximal", list(design.path))
            return False
        if prop is Property.PERF and not wt.check_perfect(design.design, local):
            logger.info("node %s: word typing is not perfect", list(design.path))
            return False
    return True


def dtd_sdtd_problems(d: TreeDesign, prop: Property, typing: Optional[Sequence[TreeGrammar]] = None,
                      caps: Optional[Caps] = None, kernel_data: str = "conform"):
    """The check problem when a typing is given, the ∃-problem otherwise."""
    if d.kind is GrammarClass.EDTD:
        raise GrammarError("dtd_sdtd_problems needs a dtd or sdtd design")
    if typing is None:
        return dtd_sdtd_exists(d, Property(prop), caps, kernel_data)
    return dtd_sdtd_check(d, Property(prop), typing, caps, kernel_data)


def dtd_sdtd_all_maximal_local(d: TreeDesign, caps: Optional[Caps] = None,
                               kernel_data: str = "conform") -> List[TreeTyping]:
    """The product of the maximal local typings of the induced designs."""
    caps = caps or load_caps()
    ind = _induce(d, kernel_data)
    if not ind.possible:
        return []
    per_node = []
    for design in ind.designs:
        found = wt.all_maximal_local(design.design, caps)
        if not found:
            return []
        per_node.append([dict(zip(design.functions, t)) for t in found])
    out = []
    for combo in itertools.product(*per_node):
        slots = {f: a for part in combo for f, a in part.items()}
        out.append(lift_typing(d, slots, caps=caps))
    return out


# ----- Global check ------

def global_check(d: TreeDesign, typing: Sequence[TreeGrammar], caps: Optional[Caps] = None,
                 kernel_data: str = "conform") -> bool:
    """T(τ1..τn) against the target, fixed data generalized in conform mode."""
    fixed = anchors(d, kernel_data)
    t = build_t_tau(d.kernel, typing, Mechanism.NFA, fixed or None, d.target if fixed else None)
    same = equivalent_grammar(t, d.target)
    logger.debug("global check for %s: %s", d.kernel, same)
    return same


def edtd_loc(d: TreeDesign, typing: Sequence[TreeGrammar], caps: Optional[Caps] = None,
             kernel_data: str = "conform") -> bool:
    return global_check(d, typing, caps, kernel_data)


# ----- EDTD reductions ------

@dataclass
class _EdtdFrame:
    """The normalized target and the part of κ that does not vary."""
    target: TreeGrammar
    base: Kappa
    fixed: List[Path]
    free: List[Tuple[Path, List[FrozenSet[str]]]]
    failure: Optional[str] = None


def _frame(d: TreeDesign, kernel_data: str, caps: Caps) -> _EdtdFrame:
    nt = normalize(d.target, caps)
    fixed = fixed_paths(d.kernel, kernel_data)
    frame = _EdtdFrame(nt, {}, fixed, [])
    if nt.mu[nt.start] != d.kernel.tree.label:
        frame.failure = f"the target root is {nt.root_element}, the kernel root is {d.kernel.tree.label}"
        return frame
    frame.base[()] = frozenset({nt.start})
    for path, node in preorder(d.kernel.tree):
        if not path or is_function(node.label) or _inside(path, fixed):
            continue
        if path in fixed:
            frame.base[path] = _validating(node, nt)
            if not frame.base[path]:
                frame.failure = f"fixed subtree at {list(path)} is valid for no name"
                return frame
            continue
        names = nt.specializations(node.label)
        if not names:
            frame.failure = f"the target has no element {node.label}"
            return frame
        frame.free.append((path, [frozenset(s) for s in powerset(names) if s]))
    return frame


def kappa_assignments(d: TreeDesign, caps: Optional[Caps] = None,
                      kernel_data: str = "conform") -> Iterator[Kappa]:
    """
    Every κ: kernel nodes in document order, subsets by increasing size then
    lexicographically. Raises ResourceCapExceeded past the kappa_assignments cap.
    """
    caps = caps or load_caps()
    frame = _frame(d, kernel_data, caps)
    if frame.failure:
        return
    yield from _assignments(frame, caps)


def _assignments(frame: _EdtdFrame, caps: Caps) -> Iterator[Kappa]:
    total = math.prod(len(choices) for _, choices in frame.free)
    if total > caps.kappa_assignments:
        raise ResourceCapExceeded("kappa_assignments", caps.kappa_assignments,
                                  f"{total} assignments to examine")
    logger.debug("%d kappa assignments", total)
    paths = [p for p, _ in frame.free]
    combos = itertools.product(*(choices for _, choices in frame.free))
    if progress_enabled():
        combos = tqdm(combos, total=total, desc="kappa", leave=False)
    for combo in combos:
        kappa = dict(frame.base)
        kappa.update(zip(paths, combo))
        yield kappa


def induce_edtd(d: TreeDesign, kappa: Kappa, target: TreeGrammar,
                fixed: Sequence[Path] = ()) -> List[InducedDesign]:
    """The box designs D^x_κ = ⟨∪π(κ(x)), B^x⟩ of the nodes that are not fixed data."""
    designs = []
    for path, node in preorder(d.kernel.tree):
        if is_function(node.label) or path in fixed or _inside(path, fixed):
            continue
        names = kappa[path]
        union = fa.union_all((target.content(n).nfa for n in sorted(names)), target.names)
        boxes: List[List[FrozenSet[str]]] = [[]]
        functions = []
        for i, child in enumerate(node.children):
            if is_function(child.label):
                functions.append(function_name(child.label))
                boxes.append([])
            else:
                boxes[-1].append(kappa[path + (i,)])
        kernel = wt.KernelBox(tuple(tuple(b) for b in boxes), tuple(functions))
        designs.append(InducedDesign(path, names, wt.WordDesign(union, kernel)))
    return designs


def _edtd_candidates(d: TreeDesign, prop: Property, caps: Caps,
                     kernel_data: str) -> Iterator[Tuple[Kappa, TreeTyping]]:
    frame = _frame(d, kernel_data, caps)
    if frame.failure:
        logger.info("no typing possible: %s", frame.failure)
        return
    for kappa in _assignments(frame, caps):
        slots = _solve(induce_edtd(d, kappa, frame.target, frame.fixed), prop, caps)
        if slots is not None:
            logger.info("kappa %s admits a %s typing", _kappa_text(kappa), prop.value)
            yield kappa, lift_typing(d, slots, base=frame.target, caps=caps)


def _kappa_text(kappa: Kappa) -> str:
    return ", ".join(f"{list(p)}={{{','.join(sorted(s))}}}" for p, s in sorted(kappa.items()))


def edtd_exists_local(d: TreeDesign, caps: Optional[Caps] = None,
                      kernel_data: str = "conform") -> Optional[TreeTyping]:
    caps = caps or load_caps()
    return next((t for _, t in _edtd_candidates(d, Property.LOC, caps, kernel_data)), None)


def edtd_exists_ml(d: TreeDesign, caps: Optional[Caps] = None,
                   kernel_data: str = "conform") -> Optional[TreeTyping]:
    """
    The first κ whose box designs all admit a maximal local typing. For dre
    targets the candidate must also survive the sweep over every other κ.
    """
    caps = caps or load_caps()
    sweep: Optional[List[TreeTyping]] = None
    for _, typing in _edtd_candidates(d, Property.ML, caps, kernel_data):
        if d.target.mechanism is not Mechanism.DRE:
            return typing
        if sweep is None:
            sweep = edtd_all_maximal_local(d, caps, kernel_data)
        if not any(strictly_dominates(m, typing) for m in sweep):
            return typing
    return None


def _positional_cell(target: TreeGrammar, union: Nfa, node: UTree, j: int,
                     fixed: Kappa, path: Path) -> FrozenSet[str]:
    """Names ã of the j-th child such that some word of `union` fits the children with ã at j."""
    pieces = []
    for i, child in enumerate(node.children):
        if is_function(child.label):
            pieces.append(fa.universal(target.names))
        elif i != j:
            cell = fixed.get(path + (i,)) or target.specializations(child.label)
            pieces.append(fa.any_symbol(cell))
        else:
            pieces.append(None)
    found = set()
    for name in target.specializations(node.children[j].label):
        pattern = fa.concat_all(fa.symbol(name) if p is None else p for p in pieces)
        if not fa.is_empty(fa.intersect(union, pattern)):
            found.add(name)
    return frozenset(found)


def perfect_kappa(d: TreeDesign, caps: Optional[Caps] = None,
                  kernel_data: str = "conform") -> Tuple[Optional[Kappa], TreeGrammar, List[Path]]:
    """
    κ computed top-down: a child gets every specialization that occurs at its
    position in some children word of its parent's names. None when a
    position admits no name.
    """
    caps = caps or load_caps()
    frame = _frame(d, kernel_data, caps)
    if frame.failure:
        logger.info("no typing possible: %s", frame.failure)
        return None, frame.target, frame.fixed
    nt = frame.target
    kappa = dict(frame.base)
    for path, node in preorder(d.kernel.tree):
        if is_function(node.label) or path in frame.fixed or _inside(path, frame.fixed):
            continue
        union = fa.union_all((nt.content(n).nfa for n in sorted(kappa[path])), nt.names)
        for j, child in enumerate(node.children):
            p = path + (j,)
            if is_function(child.label) or p in frame.fixed:
                continue
            kappa[p] = _positional_cell(nt, union, node, j, frame.base, path)
            if not kappa[p]:
                logger.info("no specialization fits %s at %s", child.label, list(p))
                return None, nt, frame.fixed
    return kappa, nt, frame.fixed


def edtd_exists_perfect(d: TreeDesign, caps: Optional[Caps] = None,
                        kernel_data: str = "conform") -> Optional[TreeTyping]:
    caps = caps or load_caps()
    kappa, nt, fixed = perfect_kappa(d, caps, kernel_data)
    if kappa is None:
        return None
    slots = _solve(induce_edtd(d, kappa, nt, fixed), Property.PERF, caps)
    if slots is None:
        return None
    return lift_typing(d, slots, base=nt, caps=caps)


def same_typing(t1: Sequence[TreeGrammar], t2: Sequence[TreeGrammar]) -> bool:
    return len(t1) == len(t2) and all(equivalent_grammar(a, b) for a, b in zip(t1, t2))


def dominates(upper: Sequence[TreeGrammar], lower: Sequence[TreeGrammar]) -> bool:
    """Slotwise inclusion of `lower` in `upper`."""
    return all(grammar_includes(l, u) for u, l in zip(upper, lower))


def strictly_dominates(upper: Sequence[TreeGrammar], lower: Sequence[TreeGrammar]) -> bool:
    return dominates(upper, lower) and not dominates(lower, upper)


def edtd_check_perfect(d: TreeDesign, typing: Sequence[TreeGrammar], caps: Optional[Caps] = None,
                       kernel_data: str = "conform") -> bool:
    require_consistent(d, typing, caps)
    perfect = edtd_exists_perfect(d, caps, kernel_data)
    return perfect is not None and same_typing(perfect, typing)


def edtd_all_maximal_local(d: TreeDesign, caps: Optional[Caps] = None,
                           kernel_data: str = "conform") -> List[TreeTyping]:
    """
    Maximal local typings over every κ: the per-node maximal local box
    typings are combined, duplicates dropped, dominated ones filtered out.
    """
    caps = caps or load_caps()
    frame = _frame(d, kernel_data, caps)
    if frame.failure:
        return []
    found: List[TreeTyping] = []
    for kappa in _assignments(frame, caps):
        per_node = []
        for design in induce_edtd(d, kappa, frame.target, frame.fixed):
            typings = wt.all_maximal_local(design.design, caps)
            if not typings:
                per_node = None
                break
            per_node.append([dict(zip(design.functions, t)) for t in typings])
        if per_node is None:
            continue
        for combo in itertools.product(*per_node):
            slots = {f: a for part in combo for f, a in part.items()}
            typing = lift_typing(d, slots, base=frame.target, caps=caps)
            if not any(same_typing(typing, other) for other in found):
                found.append(typing)
    return [t for t in found if not any(strictly_dominates(u, t) for u in found)]


def edtd_check_ml(d: TreeDesign, typing: Sequence[TreeGrammar], caps: Optional[Caps] = None,
                  kernel_data: str = "conform") -> bool:
    """Local, and no induced typing of any κ lies strictly above."""
    caps = caps or load_caps()
    typing = list(typing)
    require_consistent(d, typing, caps)
    if not edtd_loc(d, typing, caps, kernel_data):
        return False
    return not any(strictly_dominates(m, typing) for m in edtd_all_maximal_local(d, caps, kernel_data))


def induced_kappa(d: TreeDesign, typing: Sequence[TreeGrammar], caps: Optional[Caps] = None,
                  kernel_data: str = "conform") -> Kappa:
    """
    κ of a typing: ã belongs to κ(x) when every tree of the normalized target
    derived from ã is also derived from x's name in T(τ1..τn).
    """
    caps = caps or load_caps()
    nt = normalize(d.target, caps)
    fixed = anchors(d, kernel_data)
    t = build_t_tau(d.kernel, typing, Mechanism.NFA, fixed or None, d.target if fixed else None)
    names = kernel_names(d.kernel)
    kappa: Kappa = {}
    for path, node in preorder(d.kernel.tree):
        if is_function(node.label) or _inside(path, list(fixed)):
            continue
        if path in fixed:
            kappa[path] = _validating(node, nt)
            continue
        here = reroot(t, names[path])
        kappa[path] = frozenset(n for n in nt.specializations(node.label)
                                if grammar_includes(reroot(nt, n), here))
    return kappa


# ----- Dispatch by class ------

def exists_typing(d: TreeDesign, prop: Property, caps: Optional[Caps] = None,
                  kernel_data: str = "conform") -> Optional[TreeTyping]:
    _check_mode(kernel_data)
    prop = Property(prop)
    if d.kind is not GrammarClass.EDTD:
        return dtd_sdtd_exists(d, prop, caps, kernel_data)
    search = {Property.LOC: edtd_exists_local, Property.ML: edtd_exists_ml,
              Property.PERF: edtd_exists_perfect}[prop]
    return search(d, caps, kernel_data)


def check_typing(d: TreeDesign, prop: Property, typing: Sequence[TreeGrammar],
                 caps: Optional[Caps] = None, kernel_data: str = "conform") -> bool:
    _check_mode(kernel_data)
    prop = Property(prop)
    if d.kind is not GrammarClass.EDTD:
        return dtd_sdtd_check(d, prop, typing, caps, kernel_data)
    if prop is Property.LOC:
        require_consistent(d, typing, caps)
        return edtd_loc(d, typing, caps, kernel_data)
    if prop is Property.ML:
        return edtd_check_ml(d, typing, caps, kernel_data)
    return edtd_check_perfect(d, typing, caps, kernel_data)


def all_maximal_local(d: TreeDesign, caps: Optional[Caps] = None,
                      kernel_data: str = "conform") -> List[TreeTyping]:
    _check_mode(kernel_data)
    if d.kind is GrammarClass.EDTD:
        return edtd_all_maximal_local(d, caps, kernel_data)
    return dtd_sdtd_all_maximal_local(d, caps, kernel_data)


@dataclass
class NodeDiagnosis:
    path: Path
    candidate: Optional[wt.Typing]  # (Ω_n) of the node design, None when incompatible
    counterexample: Optional[Tuple[str, Word]]


def explain_no_perfect(d: TreeDesign, caps: Optional[Caps] = None,
                       kernel_data: str = "conform") -> Optional[NodeDiagnosis]:
    """The first node design without a perfect typing, with its Ω candidate."""
    caps = caps or load_caps()
    if d.kind is GrammarClass.EDTD:
        kappa, nt, fixed = perfect_kappa(d, caps, kernel_data)
        if kappa is None:
            return NodeDiagnosis((), None, None)
        designs = induce_edtd(d, kappa, nt, fixed)
    else:
        ind = _induce(d, kernel_data)
        if not ind.possible:
            return NodeDiagnosis((), None, None)
        designs = ind.designs
    for ind in designs:
        p = wt.build_perfect(ind.design.target, ind.design.kernel)
        if not p.compatible:
            return NodeDiagnosis(ind.path, None, None)
        omega = wt.omega_typing(p)
        problem = wt.local_counterexample(ind.design, omega)
        if problem is not None:
            return NodeDiagnosis(ind.path, omega, problem)
    return None
