"""The cleavage operad: elements up to chop-equivalence, composition, rewrites."""
from __future__ import annotations

import numpy as np

from . import tolerances
from .cleaving import DecoratedTree, DNode, DTree, cleaving_report, leaf_timber
from .errors import BadIndex, BadVertex, ColourMismatch, NotApplicable, NotCleaving, NotParallel
from .geometry import OrientedHyperplane, antipodally_parallel, reverse
from .regions import SphereRegion, engine_for, region_components, region_mask, regions_equal
from .trees import BinaryTree, Leaf, act_sigma, check_perm, graft_nodes, left_blown


class CleavageElement:
    """A cleaving decorated tree standing for its chop-equivalence class."""

    def __init__(self, rep: DecoratedTree):
        bad = cleaving_report(rep)
        if bad is not None:
            raise NotCleaving(f"vertex {bad} does not cleave its timber", step=bad)
        self.rep = rep
        self.timber = leaf_timber(rep)

    @property
    def arity(self) -> int:
        return self.rep.arity

    @property
    def n(self) -> int:
        return self.rep.n

    @property
    def input(self) -> SphereRegion:
        return self.rep.input

    @property
    def tree(self) -> BinaryTree:
        return self.rep.tree

    @property
    def decorations(self):
        return self.rep.decorations

    def __eq__(self, other) -> bool:
        if not isinstance(other, CleavageElement):
            return NotImplemented
        return chop_equivalent(self, other)

    __hash__ = None

    def __repr__(self) -> str:
        return f"Cleav({self.rep.tree!r}, {list(self.rep.decorations)})"

    def to_json(self) -> dict:
        return self.rep.to_json()

    @classmethod
    def from_json(cls, d: dict, n: int | None = None) -> "CleavageElement":
        return cls(DecoratedTree.from_json(d, n))


def unit(U: SphereRegion) -> CleavageElement:
    return CleavageElement(DecoratedTree(BinaryTree(Leaf(1)), (), U))


def _graft_d(f: DTree, i: int, g: DTree, m: int) -> DTree:
    """graft_nodes for decorated trees: decorations travel with their vertices."""
    def relabel(t, shift):
        if isinstance(t, Leaf):
            return Leaf(t.label + shift)
        return DNode(relabel(t.left, shift), relabel(t.right, shift), t.plane)

    def go(t):
        if isinstance(t, Leaf):
            if t.label == i:
                return relabel(g, i - 1)
            return Leaf(t.label if t.label < i else t.label + m - 1)
        return DNode(go(t.left), go(t.right), t.plane)

    return go(f)


def compose_i(f: CleavageElement, i: int, g: CleavageElement) -> CleavageElement:
    if not 1 <= i <= f.arity:
        raise BadIndex(f"input {i} not in 1..{f.arity}")
    if g.n != f.n or not regions_equal(g.input, f.timber[i - 1]):
        raise ColourMismatch(f"input colour of g differs from leaf {i} of f")
    root = _graft_d(f.rep.droot(), i, g.rep.droot(), g.arity)
    d = DecoratedTree.from_droot(root, f.input)
    # shape sanity: the undecorated graft agrees
    assert d.tree.root == graft_nodes(f.tree.root, i, g.tree.root, g.arity)
    return CleavageElement(d)


def chop_equivalent(a: CleavageElement, b: CleavageElement) -> bool:
    if a.arity != b.arity or a.n != b.n:
        return False
    eng = engine_for(a.n, a.rep.planes() + b.rep.planes())
    if not np.array_equal(region_mask(eng, a.input), region_mask(eng, b.input)):
        return False
    return all(np.array_equal(region_mask(eng, x), region_mask(eng, y))
               for x, y in zip(a.timber, b.timber))


def sigma_action(sigma, a: CleavageElement) -> CleavageElement:
    s = check_perm(sigma, a.arity)
    return CleavageElement(DecoratedTree(act_sigma(s, a.tree), a.decorations, a.input))


# ---------------------------------------------------------------- rewrites


def _vertex_map(root: DTree, fn, v: int) -> DTree:
    """Apply fn to the v-th internal vertex (preorder, 1-based)."""
    counter = [0]
    hit = [False]

    def go(t):
        if isinstance(t, Leaf):
            return t
        counter[0] += 1
        if counter[0] == v:
            hit[0] = True
            return fn(t)
        return DNode(go(t.left), go(t.right), t.plane)

    out = go(root)
    if not hit[0]:
        raise BadVertex(f"no internal vertex {v}")
    return out


def c_rewrite(a: CleavageElement, v: int) -> CleavageElement:
    """Swap the branches above v and reverse its decoration."""
    if not 1 <= v <= a.arity - 1:
        raise BadVertex(f"no internal vertex {v}")
    root = _vertex_map(a.rep.droot(), lambda t: DNode(t.right, t.left, reverse(t.plane)), v)
    return CleavageElement(DecoratedTree.from_droot(root, a.input))


def b_rewrite(a: CleavageElement, v: int, child: str | None = None) -> CleavageElement:
    """Exchange v with an internal child w whose decoration is antipodally parallel.

    Right child:  v(A, w(B, C))  ->  w(B, v(A, C))
    Left child:   v(w(A, B), C)  ->  w(v(A, C), B)
    Decorations are kept as they are.
    """
    if not 1 <= v <= a.arity - 1:
        raise BadVertex(f"no internal vertex {v}")

    def fn(t: DNode):
        side = child
        if side is None:
            side = "right" if isinstance(t.right, DNode) else "left"
        w = t.right if side == "right" else t.left
        if not isinstance(w, DNode):
            raise BadVertex(f"vertex {v} has no internal {side} child")
        if not antipodally_parallel(t.plane, w.plane):
            raise NotApplicable("decorations are not antipodally parallel")
        if side == "right":
            return DNode(w.left, DNode(t.left, w.right, t.plane), w.plane)
        return DNode(DNode(w.left, t.right, t.plane), w.right, w.plane)

    root = _vertex_map(a.rep.droot(), fn, v)
    return CleavageElement(DecoratedTree.from_droot(root, a.input))


def _canonical_direction(nu: np.ndarray) -> np.ndarray:
    eps = tolerances.current().unit
    for c in nu:
        if abs(c) > eps:
            return nu if c > 0 else -nu
    return nu


def normalize_parallel(a: CleavageElement) -> CleavageElement:
    """Left-blown representative with all planes along +nu0, offsets falling along the spine."""
    k = a.arity
    if k == 1:
        return a
    eps = tolerances.current().unit
    nu0 = _canonical_direction(a.decorations[0].nu)
    offsets = []
    for P in a.decorations:
        if np.max(np.abs(P.nu - nu0)) <= eps:
            offsets.append(P.offset)
        elif np.max(np.abs(P.nu + nu0)) <= eps:
            offsets.append(-P.offset)
        else:
            raise NotParallel(f"{P} is not parallel to {tuple(nu0)}")
    offsets.sort(reverse=True)
    normal = tuple(float(c) for c in nu0)
    decs = tuple(OrientedHyperplane(normal, p) for p in offsets)
    # leaf label at slab position t (t = 1 is the slab above the largest offset)
    labels = [0] * k
    for lab, R in enumerate(a.timber, start=1):
        _, wit = region_components(R)
        h = float(np.dot(nu0, wit[0]))
        t = 1 + sum(1 for p in offsets if h < p)
        labels[t - 1] = lab
    # in left_blown(k) the leaf labelled t sits in slab t
    d = DecoratedTree(act_sigma(tuple(labels), left_blown(k)), decs, a.input)
    return CleavageElement(d)


def same_representative(a: CleavageElement, b: CleavageElement, tol: float = 1e-12) -> bool:
    if a.tree != b.tree or len(a.decorations) != len(b.decorations):
        return False
    return all(np.allclose(P.nu, Q.nu, atol=tol, rtol=0) and abs(P.offset - Q.offset) <= tol
               for P, Q in zip(a.decorations, b.decorations))


def is_caterpillar(a: CleavageElement) -> bool:
    eps = tolerances.current().unit
    e1 = np.zeros(a.n + 1)
    e1[0] = 1.0
    return all(min(np.max(np.abs(P.nu - e1)), np.max(np.abs(P.nu + e1))) <= eps
               for P in a.decorations)
