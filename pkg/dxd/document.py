# document.py
"""
Kernel documents, their extensions and validation of trees against grammars.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple

from dxd import automata as fa
from dxd.automata import Nfa
from dxd.errors import ArityError, KernelError
from dxd.schema import GrammarClass, TreeGrammar
from dxd.trees import (Path, UTree, function_label, function_name, is_function,
                       parse_tree, postorder, preorder, subtree, tree_text)

logger = logging.getLogger(__name__)

__all__ = ["KernelDoc", "Extension", "parse_tree", "parse_kernel", "kernel_from_tree",
           "materialize", "kernel_string", "kernel_nodes", "validate", "witness",
           "first_violation", "tree_text"]


@dataclass(frozen=True)
class KernelDoc:
    tree: UTree
    functions: Tuple[str, ...]  # function names in document order, without the '@'

    @property
    def arity(self) -> int:
        return len(self.functions)

    def function_path(self, name: str) -> Path:
        for path, node in preorder(self.tree):
            if node.label == function_label(name):
                return path
        raise KeyError(name)

    def __str__(self) -> str:
        return tree_text(self.tree)


@dataclass(frozen=True)
class Extension:
    """The tree t_i supplied for each function f_i; root labels are discarded."""
    assignment: Mapping[str, UTree] = field(default_factory=dict)

    def __getitem__(self, name: str) -> UTree:
        return self.assignment[function_name(name)]

    def __contains__(self, name: str) -> bool:
        return function_name(name) in self.assignment


def kernel_from_tree(tree: UTree, source: Optional[str] = None) -> KernelDoc:
    if is_function(tree.label):
        raise KernelError(f"the root {tree.label} is a function", "function-root", source=source)
    functions: List[str] = []
    for _, node in preorder(tree):
        if not is_function(node.label):
            continue
        name = function_name(node.label)
        if node.children:
            raise KernelError(f"function {node.label} has children", "non-leaf-function", source=source)
        if name in functions:
            raise KernelError(f"function {node.label} occurs twice", "duplicate-function", source=source)
        functions.append(name)
    return KernelDoc(tree, tuple(functions))


def parse_kernel(text: str, source: Optional[str] = None) -> KernelDoc:
    return kernel_from_tree(parse_tree(text, source), source)


def materialize(k: KernelDoc, e: Extension) -> UTree:
    """Replace every docking point by the children of the tree assigned to it."""
    missing = [f for f in k.functions if f not in e]
    if missing:
        raise ArityError(f"no tree assigned to {', '.join(missing)}")

    def expand(node: UTree) -> UTree:
        children: List[UTree] = []
        for child in node.children:
            if is_function(child.label):
                children.extend(e[child.label].children)
            else:
                children.append(expand(child))
        return UTree(node.label, tuple(children))

    return expand(k.tree)


def kernel_string(k: KernelDoc, path: Path = ()) -> Tuple[str, ...]:
    """Child labels of the node at `path`; docking points keep their '@' label."""
    return subtree(k.tree, path).child_labels


def kernel_nodes(k: KernelDoc) -> List[Tuple[Path, UTree]]:
    return list(preorder(k.tree))


def is_closed(node: UTree) -> bool:
    """True when no docking point lies in the subtree."""
    return not any(is_function(n.label) for _, n in preorder(node))


# ----- Validation ------

def _step_sets(a: Nfa, current: FrozenSet[int], options: FrozenSet[str]) -> FrozenSet[int]:
    moved = set()
    for s in options:
        moved |= fa.step(a, current, s)
    return frozenset(moved)


def accepts_sets(a: Nfa, sets: Sequence[FrozenSet[str]]) -> bool:
    """Some word c_1..c_k with c_i in sets[i] is accepted by a."""
    current = fa.start_set(a)
    for options in sets:
        current = _step_sets(a, current, options)
        if not current:
            return False
    return bool(current & a.finals)


def state_sets(t: UTree, g: TreeGrammar) -> Dict[Path, FrozenSet[str]]:
    """
    Bottom-up run of the tree automaton of g: for each node, the names whose
    subtree language contains the subtree at that node.
    """
    candidates: Dict[str, List[str]] = {}
    for n, a in g.mu.items():
        candidates.setdefault(a, []).append(n)
    out: Dict[Path, FrozenSet[str]] = {}
    for path, node in postorder(t):
        child_sets = [out[path + (i,)] for i in range(len(node.children))]
        if any(not s for s in child_sets):
            out[path] = frozenset()
            continue
        out[path] = frozenset(n for n in candidates.get(node.label, ())
                              if accepts_sets(g.content(n).nfa, child_sets))
    return out


def validate(t: UTree, g: TreeGrammar) -> bool:
    return g.start in state_sets(t, g)[()]


def _choose(a: Nfa, sets: Sequence[FrozenSet[str]]) -> Optional[List[str]]:
    a = fa.remove_epsilon(a)
    layers = [frozenset({a.initial})]
    for options in sets:
        layers.append(_step_sets(a, layers[-1], options))
    ends = sorted(layers[-1] & a.finals)
    if not ends:
        return None
    target = ends[0]
    word: List[str] = []
    for i in range(len(sets) - 1, -1, -1):
        for q in sorted(layers[i]):
            hit = next((s for s in sorted(sets[i]) if target in a.delta.get((q, s), ())), None)
            if hit is not None:
                word.append(hit)
                target = q
                break
    return word[::-1]


def witness(t: UTree, g: TreeGrammar) -> Optional[UTree]:
    """
    A relabelling of t by specialized names that g derives; the unique one for
    single-type grammars. None when t is not in L(g).
    """
    sets = state_sets(t, g)
    if g.start not in sets[()]:
        return None

    def assign(path: Path, node: UTree, name: str) -> UTree:
        child_sets = [sets[path + (i,)] for i in range(len(node.children))]
        names = _choose(g.content(name).nfa, child_sets)
        return UTree(name, tuple(assign(path + (i,), c, n)
                                 for i, (c, n) in enumerate(zip(node.children, names))))

    return assign((), t, g.start)


def first_violation(t: UTree, g: TreeGrammar) -> Optional[Path]:
    """
    Where t fails g. For a DTD, the first node in document order whose label is
    unknown or whose children string is rejected; otherwise the first node
    (bottom-up) that no name derives. The root when only its label is wrong.
    """
    if g.kind is GrammarClass.DTD:
        for path, node in preorder(t):
            if node.label not in g.names or not fa.accepts(g.content(node.label).nfa, node.child_labels):
                return path
        return None if t.label == g.start else ()
    sets = state_sets(t, g)
    if g.start in sets[()]:
        return None
    for path, _ in postorder(t):
        if not sets[path]:
            return path
    return ()
