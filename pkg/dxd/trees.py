# trees.py
"""
Ordered unranked trees and their term syntax.

    s(a, @f1, b(@f2))

Labels are symbol tokens; `@name` marks a function leaf (a docking point).
Whitespace is insignificant and commas between children are optional.
"""
import re
from dataclasses import dataclass
from typing import Iterator, List, Optional, Tuple

from dxd.errors import ParseError

FUNCTION_PREFIX = "@"
Path = Tuple[int, ...]

_LABEL = r"[A-Za-z_][A-Za-z0-9_.:#\-]*"
_TOKEN = re.compile(rf"\s*(?:(?P<label>@?{_LABEL})|(?P<op>[(),]))")


def is_function(label: str) -> bool:
    return label.startswith(FUNCTION_PREFIX)


def function_name(label: str) -> str:
    return label[len(FUNCTION_PREFIX):] if is_function(label) else label


def function_label(name: str) -> str:
    return name if is_function(name) else FUNCTION_PREFIX + name


@dataclass(frozen=True)
class UTree:
    label: str
    children: Tuple["UTree", ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @property
    def child_labels(self) -> Tuple[str, ...]:
        """ch-str: the labels of the children, left to right."""
        return tuple(c.label for c in self.children)

    def __len__(self) -> int:
        return 1 + sum(len(c) for c in self.children)

    def __str__(self) -> str:
        return tree_text(self)


def leaf(label: str) -> UTree:
    return UTree(label)


def node(label: str, *children: UTree) -> UTree:
    return UTree(label, children)


def preorder(t: UTree, path: Path = ()) -> Iterator[Tuple[Path, UTree]]:
    """Document order: (path, subtree) pairs, the root having the empty path."""
    yield path, t
    for i, child in enumerate(t.children):
        yield from preorder(child, path + (i,))


def postorder(t: UTree, path: Path = ()) -> Iterator[Tuple[Path, UTree]]:
    for i, child in enumerate(t.children):
        yield from postorder(child, path + (i,))
    yield path, t


def subtree(t: UTree, path: Path) -> UTree:
    for i in path:
        t = t.children[i]
    return t


def relabel(t: UTree, fn) -> UTree:
    return UTree(fn(t.label), tuple(relabel(c, fn) for c in t.children))


def labels(t: UTree) -> List[str]:
    return [n.label for _, n in preorder(t)]


def tree_text(t: UTree) -> str:
    if not t.children:
        return t.label
    return f"{t.label}({', '.join(tree_text(c) for c in t.children)})"


def path_text(path: Path) -> str:
    return "/" + "/".join(str(i) for i in path)


# ----- Parsing ------

class _TreeParser:
    def __init__(self, text: str, source: Optional[str]):
        self.text = text
        self.source = source
        self.tokens = []
        pos = 0
        while True:
            m = _TOKEN.match(text, pos)
            if not m:
                if text[pos:].strip():
                    start = len(text) - len(text[pos:].lstrip())
                    raise self.error(f"unexpected character {text[start]!r}", start)
                break
            if m.group("label"):
                self.tokens.append(("label", m.group("label"), m.start("label")))
            else:
                self.tokens.append((m.group("op"), m.group("op"), m.start("op")))
            pos = m.end()
        self.i = 0

    def error(self, message: str, position: Optional[int]) -> ParseError:
        line = None
        if position is not None:
            line = self.text.count("\n", 0, position) + 1
            position = position - (self.text.rfind("\n", 0, position) + 1)
        return ParseError(message, position=position, line=line, source=self.source)

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def parse(self) -> UTree:
        if not self.tokens:
            raise self.error("empty tree", None)
        t = self.tree()
        rest = self.peek()
        if rest is not None:
            raise self.error(f"unexpected {rest[1]!r} after the tree", rest[2])
        return t

    def tree(self) -> UTree:
        tok = self.peek()
        if tok is None:
            raise self.error("unexpected end of input, expected a label", len(self.text))
        kind, value, pos = tok
        if kind != "label":
            raise self.error(f"expected a label, found {value!r}", pos)
        self.i += 1
        children = []
        nxt = self.peek()
        if nxt is not None and nxt[0] == "(":
            self.i += 1
            while True:
                nxt = self.peek()
                if nxt is None:
                    raise self.error(f"unclosed '(' after {value!r}", pos)
                if nxt[0] == ")":
                    self.i += 1
                    break
                if nxt[0] == ",":
                    self.i += 1
                    continue
                children.append(self.tree())
        return UTree(value, tuple(children))


def parse_tree(text: str, source: Optional[str] = None) -> UTree:
    return _TreeParser(text, source).parse()
