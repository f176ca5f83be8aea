"""Decorated trees, the recursive timber assignment and the cleaving predicate."""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Union

import numpy as np

from .errors import NonGeneric, NotCleaving
from .geometry import OrientedHyperplane
from .regions import Constraint, SphereRegion, complement_profile, engine_for, region_mask
from .trees import BinaryTree, Leaf, Node, TreeNode


@dataclass(frozen=True)
class DNode:
    """Internal vertex carrying its decoration; children are DNode or Leaf."""
    left: "DTree"
    right: "DTree"
    plane: OrientedHyperplane


DTree = Union[DNode, Leaf]


def attach(tree: BinaryTree, decorations) -> DTree:
    it = iter(decorations)

    def go(t: TreeNode) -> DTree:
        if isinstance(t, Leaf):
            return t
        P = next(it)
        return DNode(go(t.left), go(t.right), P)

    return go(tree.root)


def detach(root: DTree) -> tuple[BinaryTree, tuple[OrientedHyperplane, ...]]:
    decs: list[OrientedHyperplane] = []

    def go(t: DTree) -> TreeNode:
        if isinstance(t, Leaf):
            return t
        decs.append(t.plane)
        return Node(go(t.left), go(t.right))

    shape = go(root)
    return BinaryTree(shape), tuple(decs)


@dataclass(frozen=True)
class DecoratedTree:
    tree: BinaryTree
    decorations: tuple[OrientedHyperplane, ...]
    input: SphereRegion

    def __post_init__(self):
        if len(self.decorations) != self.tree.arity - 1:
            raise ValueError(f"{len(self.decorations)} decorations for arity {self.tree.arity}")
        for P in self.decorations:
            if P.ambient_dim != self.input.n + 1:
                raise ValueError(f"{P} does not live in R^{self.input.n + 1}")

    @property
    def n(self) -> int:
        return self.input.n

    @property
    def arity(self) -> int:
        return self.tree.arity

    def planes(self) -> list[OrientedHyperplane]:
        return list(self.decorations) + self.input.planes()

    def droot(self) -> DTree:
        return attach(self.tree, self.decorations)

    @classmethod
    def from_droot(cls, root: DTree, input: SphereRegion) -> "DecoratedTree":
        t, decs = detach(root)
        return cls(t, decs, input)

    def with_decoration(self, v: int, P: OrientedHyperplane) -> "DecoratedTree":
        decs = list(self.decorations)
        decs[v - 1] = P
        return replace(self, decorations=tuple(decs))

    def to_json(self) -> dict:
        return {"n": self.n, "tree": self.tree.to_json(),
                "decorations": [P.to_json() for P in self.decorations], "input": self.input.to_json()}

    @classmethod
    def from_json(cls, d: dict, n: int | None = None) -> "DecoratedTree":
        decs = tuple(OrientedHyperplane.from_json(p) for p in d["decorations"])
        if n is None:
            n = len(decs[0].normal) - 1 if decs else d.get("n")
        return cls(BinaryTree.from_json(d["tree"]), decs, SphereRegion.from_json(d["input"], n))


@dataclass(frozen=True)
class TimberAssignment:
    vertices: tuple[SphereRegion, ...]     # U_v for internal vertices 1..k-1
    leaves: dict                           # leaf label -> region

    def leaf_list(self) -> list[SphereRegion]:
        return [self.leaves[l] for l in sorted(self.leaves)]


def assign_timber(d: DecoratedTree) -> TimberAssignment:
    vregions = []
    leaves = {}
    U = d.input

    def go(t: DTree, cons: tuple):
        R = SphereRegion(U.n, U.constraints + cons)
        if isinstance(t, Leaf):
            leaves[t.label] = R
            return
        vregions.append(R)
        go(t.left, cons + (Constraint(t.plane, -1),))
        go(t.right, cons + (Constraint(t.plane, +1),))

    go(d.droot(), ())
    return TimberAssignment(tuple(vregions), leaves)


def _engine(d: DecoratedTree):
    return engine_for(d.n, d.planes())


def cleaving_report(d: DecoratedTree) -> int | None:
    """First (1-based, preorder) internal vertex where cleaving fails, or None."""
    eng = _engine(d)
    ta = assign_timber(d)
    for v, (R, P) in enumerate(zip(ta.vertices, d.decorations), start=1):
        m = region_mask(eng, R)
        s = eng.plane_signs(P)
        if not (m & (s > 0)).any() or not (m & (s < 0)).any():
            return v
    if d.arity == 1 and not region_mask(eng, d.input).any():
        return 0
    return None


def is_cleaving(d: DecoratedTree) -> bool:
    return cleaving_report(d) is None


def is_cleaving_safe(d: DecoratedTree) -> bool:
    """is_cleaving with degenerate configurations counted as non-cleaving."""
    try:
        return is_cleaving(d)
    except NonGeneric:
        return False


def leaf_timber(d: DecoratedTree) -> list[SphereRegion]:
    bad = cleaving_report(d)
    if bad is not None:
        raise NotCleaving(f"vertex {bad} does not cleave its timber", step=bad)
    return assign_timber(d).leaf_list()


def in_ob_cleave(U: SphereRegion) -> bool:
    """Every component of the closed complement has Euler characteristic 1."""
    return all(chi == 1 for chi in complement_profile(U))


def expand_homotopy(U: SphereRegion, t: float) -> SphereRegion:
    """Push every bounding plane away from U; at t = 1 all of them have left the sphere.

    Writing a constraint as <nu', x> > p' (nu' pointing into U), the offset moves
    linearly p'(t) = (1 - t) p' - t; constraints with p'(t) <= -1 no longer cut S^n
    and are dropped.
    """
    if not 0.0 <= t <= 1.0:
        raise ValueError("t must lie in [0, 1]")
    out = []
    for c in U.constraints:
        p_in = c.sign * c.plane.offset
        p_t = (1.0 - t) * p_in - t
        if p_t <= -1.0:
            continue
        out.append(Constraint(OrientedHyperplane(c.plane.normal, c.sign * p_t), c.sign, c.closed))
    return SphereRegion(U.n, tuple(out))


def translated(d: DecoratedTree, v: int, delta: float) -> DecoratedTree:
    P = d.decorations[v - 1]
    return d.with_decoration(v, OrientedHyperplane(P.normal, P.offset + delta))


def cleaving_interval_of(d: DecoratedTree, v: int, steps: int = 50, tol: float = 1e-6) -> tuple[float, float]:
    """Maximal ]j-, j+[ of translations of decoration v along its normal that keep d cleaving."""
    p = d.decorations[v - 1].offset

    def ok(delta):
        return is_cleaving_safe(translated(d, v, delta))

    def edge(limit):
        prev = 0.0
        for j in range(1, steps + 1):
            x = limit * j / steps
            if j == steps or not ok(x):
                lo, hi = prev, x
                while abs(hi - lo) > tol:
                    mid = 0.5 * (lo + hi)
                    if ok(mid):
                        lo = mid
                    else:
                        hi = mid
                return 0.5 * (lo + hi)
            prev = x
        return limit

    return edge(-1.0 - p), edge(1.0 - p)


def gamma_epsilon(d: DecoratedTree, eps: float, steps: int = 50) -> tuple[DecoratedTree, bool]:
    """Pull decorations that sit within eps of leaving their cleaving interval toward its centre.

    Returns the new decorated tree and whether it is still cleaving.
    """
    if not is_cleaving(d):
        raise NotCleaving("gamma_epsilon needs a cleaving tree")
    shifts = []
    for v in range(1, d.arity):
        jm, jp = cleaving_interval_of(d, v, steps=steps)
        centre = 0.5 * (jm + jp)
        jmin = min(abs(jm), jp)
        if jmin < eps:
            shifts.append(float(np.sign(centre)) * min(eps - jmin, abs(centre)))
        else:
            shifts.append(0.0)
    out = d
    for v, s in enumerate(shifts, start=1):
        if s != 0.0:
            out = translated(out, v, s)
    return out, is_cleaving_safe(out)
