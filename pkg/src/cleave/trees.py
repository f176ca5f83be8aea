"""Binary rooted planar trees with labelled leaves: grafting and the symmetric group action.

Internal vertices are numbered 1..k-1 in depth-first preorder (vertex, left subtree,
right subtree); decorations of a tree are listed in that order.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import permutations
from typing import Iterator, Union

from .errors import BadIndex


@dataclass(frozen=True)
class Leaf:
    label: int


@dataclass(frozen=True)
class Node:
    left: "TreeNode"
    right: "TreeNode"


TreeNode = Union[Leaf, Node]


def _leaves(t: TreeNode) -> Iterator[Leaf]:
    if isinstance(t, Leaf):
        yield t
    else:
        yield from _leaves(t.left)
        yield from _leaves(t.right)


def _nodes(t: TreeNode) -> Iterator[Node]:
    if isinstance(t, Node):
        yield t
        yield from _nodes(t.left)
        yield from _nodes(t.right)


def _relabel(t: TreeNode, f) -> TreeNode:
    if isinstance(t, Leaf):
        return Leaf(f(t.label))
    return Node(_relabel(t.left, f), _relabel(t.right, f))


@dataclass(frozen=True)
class BinaryTree:
    root: TreeNode

    def __post_init__(self):
        labels = sorted(l.label for l in _leaves(self.root))
        if labels != list(range(1, len(labels) + 1)):
            raise ValueError(f"leaf labels {labels} are not 1..k")

    @cached_property
    def arity(self) -> int:
        return sum(1 for _ in _leaves(self.root))

    def leaf_labels(self) -> list[int]:
        """Labels in planar (left to right) order."""
        return [l.label for l in _leaves(self.root)]

    def internal_count(self) -> int:
        return self.arity - 1

    def paths(self) -> dict[int, tuple[tuple[int, int], ...]]:
        """Leaf label -> root-to-leaf path as (vertex index, side) pairs, side -1 left / +1 right."""
        out: dict[int, tuple] = {}
        counter = [0]

        def walk(t, path):
            if isinstance(t, Leaf):
                out[t.label] = tuple(path)
                return
            counter[0] += 1
            v = counter[0]
            walk(t.left, path + [(v, -1)])
            walk(t.right, path + [(v, +1)])

        walk(self.root, [])
        return out

    def vertex_paths(self) -> list[tuple[tuple[int, int], ...]]:
        """For vertex v (1-based, index v-1): path of (ancestor, side) from the root to v."""
        out: list = []

        def walk(t, path):
            if isinstance(t, Leaf):
                return
            out.append(tuple(path))
            v = len(out)
            walk(t.left, path + [(v, -1)])
            walk(t.right, path + [(v, +1)])

        walk(self.root, [])
        return out

    def to_json(self):
        def enc(t):
            if isinstance(t, Leaf):
                return {"leaf": t.label}
            return {"node": [enc(t.left), enc(t.right)]}
        return enc(self.root)

    @classmethod
    def from_json(cls, d) -> "BinaryTree":
        def dec(x):
            if "leaf" in x:
                return Leaf(int(x["leaf"]))
            l, r = x["node"]
            return Node(dec(l), dec(r))
        return cls(dec(d))

    def __repr__(self) -> str:
        def s(t):
            if isinstance(t, Leaf):
                return str(t.label)
            return f"({s(t.left)} {s(t.right)})"
        return f"Tree[{s(self.root)}]"


L1 = BinaryTree(Leaf(1))


def corolla2(labels=(1, 2)) -> BinaryTree:
    return BinaryTree(Node(Leaf(labels[0]), Leaf(labels[1])))


def graft_nodes(t: TreeNode, i: int, s: TreeNode, m: int) -> TreeNode:
    """Replace leaf i of t by s (whose labels are 1..m), renumbering per operadic indexing."""
    def shift_t(l):
        return l if l < i else l + m - 1

    def go(x):
        if isinstance(x, Leaf):
            if x.label == i:
                return _relabel(s, lambda l: l + i - 1)
            return Leaf(shift_t(x.label))
        return Node(go(x.left), go(x.right))

    return go(t)


def graft(T: BinaryTree, i: int, S: BinaryTree) -> BinaryTree:
    if not 1 <= i <= T.arity:
        raise BadIndex(f"leaf {i} not in 1..{T.arity}")
    return BinaryTree(graft_nodes(T.root, i, S.root, S.arity))


def left_blown(k: int) -> BinaryTree:
    if k < 1:
        raise ValueError("k must be positive")
    t: TreeNode = Leaf(k)
    for i in range(k - 1, 0, -1):
        t = Node(t, Leaf(i))
    return BinaryTree(t)


def check_perm(sigma, k: int) -> tuple[int, ...]:
    s = tuple(int(x) for x in sigma)
    if sorted(s) != list(range(1, k + 1)):
        raise ValueError(f"{s} is not a permutation of 1..{k}")
    return s


def act_sigma(sigma, T: BinaryTree) -> BinaryTree:
    """Relabel leaf j as sigma(j); sigma is given one-line as (sigma(1), ..., sigma(k))."""
    s = check_perm(sigma, T.arity)
    return BinaryTree(_relabel(T.root, lambda l: s[l - 1]))


def perm_compose(a, b) -> tuple[int, ...]:
    """(a o b)(j) = a(b(j))."""
    return tuple(a[x - 1] for x in b)


def perm_inverse(a) -> tuple[int, ...]:
    out = [0] * len(a)
    for j, x in enumerate(a, start=1):
        out[x - 1] = j
    return tuple(out)


def shapes(k: int) -> Iterator[TreeNode]:
    """All planar binary shapes with k leaves, leaves labelled 1..k left to right."""
    def gen(lo, hi):
        if lo == hi:
            yield Leaf(lo)
            return
        for mid in range(lo, hi):
            for l in gen(lo, mid):
                for r in gen(mid + 1, hi):
                    yield Node(l, r)
    yield from gen(1, k)


def all_trees(k: int) -> Iterator[BinaryTree]:
    """All labelled planar binary trees of arity k."""
    for sh in shapes(k):
        for p in permutations(range(1, k + 1)):
            yield BinaryTree(_relabel(sh, lambda l, p=p: p[l - 1]))


def equivariance_perm(sigma, pi, i: int, m: int) -> tuple[int, ...]:
    """The permutation tau with (sigma.f) o_{sigma(i)} (pi.g) = tau.(f o_i g).

    sigma acts on the k inputs of f, pi on the m inputs of g.
    """
    k = len(sigma)
    si = sigma[i - 1]
    tau = [0] * (k + m - 1)
    for j in range(1, k + 1):
        if j == i:
            continue
        pos = j if j < i else j + m - 1
        sj = sigma[j - 1]
        tau[pos - 1] = sj if sj < si else sj + m - 1
    for l in range(1, m + 1):
        tau[i + l - 2] = si + pi[l - 1] - 1
    return tuple(tau)
