"""Lexicon, unordered binary trees, head markings, quotients and workspaces.

Trees are strictly binary and unordered: children are stored in canonical
key order, so structurally equal trees compare (and hash) equal.  Vertices
are addressed by their path from the root, a tuple of 0/1 canonical child
indices; the root address is ``()``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence, Union

Address = tuple  # path from root, e.g. () or (0, 1)

MAX_ENUM_LEAVES = 7


class TreeError(ValueError):
    """Raised for malformed trees, markings or unknown vertex addresses."""


@dataclass(eq=False, frozen=True)
class LexItem:
    """A lexical token.  Identity (and equality) is the id alone; repeated
    occurrences of the same surface form get distinct ids."""

    id: str
    label: str = ""

    def __post_init__(self):
        if not self.id:
            raise TreeError("LexItem id must be nonempty")

    def __eq__(self, other):
        return isinstance(other, LexItem) and self.id == other.id

    def __hash__(self):
        return hash(self.id)

    def __repr__(self):
        return f"LexItem({self.id!r})"


class Lexicon:
    """A finite set of lexical items with unique ids."""

    def __init__(self, items: Iterable[LexItem]):
        self.items = list(items)
        self.by_id = {}
        for it in self.items:
            if it.id in self.by_id:
                raise TreeError(f"duplicate lexicon id {it.id!r}")
            self.by_id[it.id] = it

    def __len__(self):
        return len(self.items)

    def __iter__(self) -> Iterator[LexItem]:
        return iter(self.items)

    def __getitem__(self, item_id: str) -> LexItem:
        try:
            return self.by_id[item_id]
        except KeyError:
            raise TreeError(f"unknown lexicon id {item_id!r}") from None

    def to_json(self) -> dict:
        return {"items": [{"id": it.id, "label": it.label} for it in self.items]}

    @classmethod
    def from_json(cls, doc: dict) -> "Lexicon":
        return cls(LexItem(d["id"], d.get("label", "")) for d in doc["items"])

    @classmethod
    def load(cls, path) -> "Lexicon":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


@dataclass(frozen=True)
class Leaf:
    item: LexItem

    @property
    def key(self) -> str:
        return self.item.id

    def __repr__(self):
        return self.key


@dataclass(frozen=True)
class Node:
    children: tuple  # ordered canonically at construction
    key: str = field(default="", compare=False)

    def __post_init__(self):
        a, b = self.children
        if a.key > b.key:
            object.__setattr__(self, "children", (b, a))
            a, b = b, a
        object.__setattr__(self, "key", "{" + a.key + "," + b.key + "}")

    def __eq__(self, other):
        return isinstance(other, Node) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return self.key


SynTree = Union[Leaf, Node]


def leaf(item: LexItem) -> Leaf:
    return Leaf(item)


def merge(t1: SynTree, t2: SynTree) -> Node:
    """The binary structure-building operation; commutative by canonical
    child ordering, non-associative as trees."""
    return Node((t1, t2))


def is_leaf(t: SynTree) -> bool:
    return isinstance(t, Leaf)


def leaves(t: SynTree) -> list:
    """Leaf items in canonical traversal order (a multiset, as a list)."""
    if is_leaf(t):
        return [t.item]
    out = []
    for c in t.children:
        out.extend(leaves(c))
    return out


def leaf_count(t: SynTree) -> int:
    return 1 if is_leaf(t) else sum(leaf_count(c) for c in t.children)


def subtree_at(t: SynTree, addr: Address) -> SynTree:
    cur = t
    for step in addr:
        if is_leaf(cur):
            raise TreeError(f"address {addr} walks past a leaf")
        cur = cur.children[step]
    return cur


def addresses(t: SynTree) -> list:
    """All vertex addresses in preorder (root first)."""
    out = [()]
    if not is_leaf(t):
        for i, c in enumerate(t.children):
            out.extend([(i,) + a for a in addresses(c)])
    return out


def internal_addresses(t: SynTree) -> list:
    return [a for a in addresses(t) if not is_leaf(subtree_at(t, a))]


def leaf_addresses(t: SynTree) -> list:
    return [a for a in addresses(t) if is_leaf(subtree_at(t, a))]


def accessible_terms(t: SynTree, include_leaves: bool = True) -> list:
    """Full subtrees rooted at non-root vertices, as (address, subtree) pairs.

    Leaves count as accessible by default; pass include_leaves=False for the
    stricter convention.
    """
    out = []
    for a in addresses(t):
        if a == ():
            continue
        sub = subtree_at(t, a)
        if include_leaves or not is_leaf(sub):
            out.append((a, sub))
    return out


def quotient(t: SynTree, addr: Address) -> SynTree:
    """Remove the subtree at a non-root vertex and contract the unary parent."""
    if addr == ():
        raise TreeError("cannot quotient at the root")
    result = quotient_many(t, [addr])
    assert result is not None  # single non-root removal always leaves the sibling
    return result


def quotient_many(t: SynTree, addrs: Sequence[Address]) -> Optional[SynTree]:
    """Remove several pairwise-disjoint subtrees at once; returns None when
    nothing remains (the formal unit)."""
    addrset = set(map(tuple, addrs))
    all_addrs = set(addresses(t))
    for a in addrset:
        if a not in all_addrs:
            raise TreeError(f"unknown vertex address {a}")
    for a, b in itertools.combinations(addrset, 2):
        if a == b[: len(a)] or b == a[: len(b)]:
            raise TreeError(f"addresses {a} and {b} are nested")

    def walk(sub: SynTree, prefix: Address) -> Optional[SynTree]:
        if prefix in addrset:
            return None
        if is_leaf(sub):
            return sub
        kept = [walk(c, prefix + (i,)) for i, c in enumerate(sub.children)]
        kept = [k for k in kept if k is not None]
        if not kept:
            return None
        if len(kept) == 1:
            return kept[0]  # contract the unary vertex
        return merge(kept[0], kept[1])

    return walk(t, ())


def enumerate_trees(labels: Sequence[LexItem], cap: int = MAX_ENUM_LEAVES) -> list:
    """All structurally distinct unordered binary trees over the given leaf
    multiset, deduplicated by canonical key."""
    n = len(labels)
    if n < 1:
        raise TreeError("need at least one label")
    if n > cap:
        raise TreeError(f"{n} leaves exceeds the enumeration cap {cap}")

    def build(idx: tuple) -> list:
        if len(idx) == 1:
            return [Leaf(labels[idx[0]])]
        first, rest = idx[0], idx[1:]
        seen, out = set(), []
        for r in range(0, len(rest)):
            for combo in itertools.combinations(rest, r):
                left = (first,) + combo
                right = tuple(i for i in rest if i not in combo)
                if not right:
                    continue
                for t1 in build(left):
                    for t2 in build(right):
                        t = merge(t1, t2)
                        if t.key not in seen:
                            seen.add(t.key)
                            out.append(t)
        return out

    out = build(tuple(range(n)))
    return sorted(out, key=lambda t: t.key)


# -- head markings -----------------------------------------------------------


@dataclass(frozen=True)
class HeadMarking:
    """Per internal vertex, which canonical child (0 or 1) lies toward the head."""

    mark: dict

    def validate(self, t: SynTree) -> None:
        want = set(internal_addresses(t))
        got = set(map(tuple, self.mark))
        if want != got:
            raise TreeError(f"marking covers {sorted(got)}, tree needs {sorted(want)}")
        for a, side in self.mark.items():
            if side not in (0, 1):
                raise TreeError(f"mark at {a} must be 0 or 1, got {side!r}")

    def head_leaf(self, t: SynTree, addr: Address = ()) -> Address:
        """Follow marked edges from a vertex down to its head leaf."""
        cur = addr
        while not is_leaf(subtree_at(t, cur)):
            cur = cur + (self.mark[cur],)
        return cur


def first_child_marking(t: SynTree) -> HeadMarking:
    return HeadMarking({a: 0 for a in internal_addresses(t)})


def head_paths(t: SynTree, h: HeadMarking) -> dict:
    """Partition the vertex set into maximal marked-edge paths, one per leaf.

    Returns leaf address -> tuple of path vertices, ordered top-down.
    """
    h.validate(t)
    paths = {}
    for la in leaf_addresses(t):
        top = la
        while top != ():
            parent = top[:-1]
            if h.mark[parent] != top[-1]:
                break
            top = parent
        chain, cur = [top], top
        while cur != la:
            cur = cur + (h.mark[cur],)
            chain.append(cur)
        paths[la] = tuple(chain)
    return paths


# -- workspaces --------------------------------------------------------------


@dataclass(frozen=True)
class Workspace:
    """A multiset of syntactic objects; the empty workspace is the unit."""

    components: tuple = ()

    def __post_init__(self):
        ordered = tuple(sorted(self.components, key=lambda t: t.key))
        object.__setattr__(self, "components", ordered)

    @property
    def key(self) -> str:
        return " | ".join(t.key for t in self.components) or "1"

    def __eq__(self, other):
        return isinstance(other, Workspace) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __len__(self):
        return len(self.components)

    def __repr__(self):
        return self.key

    def is_unit(self) -> bool:
        return not self.components

    def union(self, other: "Workspace") -> "Workspace":
        return Workspace(self.components + other.components)

    def leaf_items(self) -> list:
        out = []
        for t in self.components:
            out.extend(leaves(t))
        return out


def workspace(*trees: SynTree) -> Workspace:
    return Workspace(tuple(trees))


# -- bracket notation --------------------------------------------------------


def format_tree(t: SynTree) -> str:
    return t.key


def parse_tree(text: str, lexicon: Lexicon) -> SynTree:
    """Parse nested-bracket notation such as ``{a,{b,c}}`` over lexicon ids."""
    pos = 0

    def skip_ws():
        nonlocal pos
        while pos < len(text) and text[pos].isspace():
            pos += 1

    def parse() -> SynTree:
        nonlocal pos
        skip_ws()
        if pos >= len(text):
            raise TreeError("unexpected end of tree expression")
        if text[pos] == "{":
            pos += 1
            left = parse()
            skip_ws()
            if pos >= len(text) or text[pos] != ",":
                raise TreeError(f"expected ',' at position {pos} in {text!r}")
            pos += 1
            right = parse()
            skip_ws()
            if pos >= len(text) or text[pos] != "}":
                raise TreeError(f"expected '}}' at position {pos} in {text!r}")
            pos += 1
            return merge(left, right)
        start = pos
        while pos < len(text) and text[pos] not in "{},":
            pos += 1
        token = text[start:pos].strip()
        if not token:
            raise TreeError(f"empty token at position {start} in {text!r}")
        return Leaf(lexicon[token])

    out = parse()
    skip_ws()
    if pos != len(text):
        raise TreeError(f"trailing input at position {pos} in {text!r}")
    return out


def addr_to_str(addr: Address) -> str:
    return "".join(str(i) for i in addr)


def addr_from_str(s: str) -> Address:
    return tuple(int(ch) for ch in s)
