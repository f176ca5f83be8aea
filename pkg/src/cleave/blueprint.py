"""Blueprints: the cut faces left inside D^{n+1} by the recursive bisection."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse.csgraph import connected_components

from .cleaving import assign_timber
from .errors import AmbiguousComponent
from .operad import CleavageElement
from .regions import BallFace, Constraint, engine_for, faces_adjacent, region_mask


@dataclass(frozen=True)
class Blueprint:
    faces: tuple[BallFace, ...]
    component_of: tuple[int, ...]     # face index -> component id

    @property
    def components(self) -> int:
        return len(set(self.component_of))

    def partition(self) -> list[list[int]]:
        out: dict[int, list[int]] = {}
        for f, c in enumerate(self.component_of):
            out.setdefault(c, []).append(f)
        return [out[c] for c in sorted(out)]


def faces_of(a: CleavageElement) -> tuple[BallFace, ...]:
    ta = assign_timber(a.rep)
    return tuple(BallFace(P, tuple(Constraint(c.plane, c.sign, True) for c in R.constraints))
                 for P, R in zip(a.decorations, ta.vertices))


def blueprint(a: CleavageElement) -> Blueprint:
    faces = faces_of(a)
    m = len(faces)
    adj = np.zeros((m, m), dtype=bool)
    for i in range(m):
        adj[i, i] = True
        for j in range(i + 1, m):
            adj[i, j] = adj[j, i] = faces_adjacent(faces[i], faces[j])
    if m == 0:
        return Blueprint((), ())
    _, lab = connected_components(adj, directed=False)
    return Blueprint(faces, tuple(int(x) for x in lab))


def blueprint_components(B: Blueprint | CleavageElement) -> int:
    if isinstance(B, CleavageElement):
        B = blueprint(B)
    return B.components


def _complements(a: CleavageElement):
    eng = engine_for(a.n, a.rep.planes())
    out = []
    for R in a.timber:
        mask = ~region_mask(eng, R)
        count, labels = eng.components(mask)
        out.append((mask, count, labels))
    return eng, out


def complement_components(a: CleavageElement) -> int:
    _, comps = _complements(a)
    return sum(c for _, c, _ in comps)


def component_map(a: CleavageElement) -> dict[tuple[int, int], int]:
    """(leaf label, complement component index) -> blueprint component id.

    A complement component is sent to the blueprint component of the faces whose
    carriers hold its boundary against the leaf timber.
    """
    B = blueprint(a)
    eng, comps = _complements(a)
    paths = a.tree.paths()
    arr = eng.arr
    zero_on = {}
    for v, P in enumerate(a.decorations, start=1):
        zero_on[v] = eng.plane_signs(P) == 0
    e = arr.edges
    out = {}
    for lab, (mask, count, labels) in enumerate(comps, start=1):
        inside = ~mask
        # complement strata touching the open timber
        touch = np.zeros(arr.size, dtype=bool)
        sel = inside[e[:, 0]] & mask[e[:, 1]]
        touch[e[sel, 1]] = True
        sel = inside[e[:, 1]] & mask[e[:, 0]]
        touch[e[sel, 0]] = True
        ancestors = [v for v, _ in paths[lab]]
        for comp in range(count):
            bd = touch & (labels == comp)
            hit = set()
            for v in ancestors:
                if (bd & zero_on[v]).any():
                    hit.add(B.component_of[v - 1])
            if len(hit) != 1:
                raise AmbiguousComponent(
                    f"leaf {lab}, complement component {comp}: blueprint components {sorted(hit)}")
            out[(lab, comp)] = hit.pop()
    return out


def fiber_sizes(a: CleavageElement) -> list[int]:
    cm = component_map(a)
    counts: dict[int, int] = {}
    for c in cm.values():
        counts[c] = counts.get(c, 0) + 1
    return sorted(counts.values())


def codim_invariant(a: CleavageElement) -> int:
    return complement_components(a) - blueprint_components(a)


def dominates(a: CleavageElement, i: int, j: int) -> bool:
    """P_i dominates P_j: they meet inside the ball and P_j's face lies on one side of P_i."""
    if i == j:
        return False
    faces = faces_of(a)
    Pi, Fj = a.decorations[i - 1], faces[j - 1]
    if not faces_adjacent(BallFace(Pi, ()), BallFace(Fj.carrier, ())):
        return False
    ext = _face_values(Fj, Pi)
    if ext is None:
        return False
    lo, hi = ext
    eps = 1e-9
    return (hi > eps) != (lo < -eps)


def _face_values(F: BallFace, P):
    from .regions import face_extent
    ext = face_extent(F, P.nu)
    if ext is None:
        return None
    return ext[0] - P.offset, ext[1] - P.offset
