"""Sign-constrained subsets of S^n and flat faces inside the ball D^{n+1}.

Queries go through an engine: the exact stratification (default) or the sampling
mesh (oracle). Select with set_engine or the `engine=` keyword.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import arrangement as _arr
from . import tolerances
from .errors import NumericFailure
from .geometry import OrientedHyperplane, Rotation, make_hyperplane, parallel, rotate, same_plane
from .mesh import MeshEngine


@dataclass(frozen=True)
class Constraint:
    plane: OrientedHyperplane
    sign: int                 # +1: positive side, -1: negative side
    closed: bool = False

    def holds(self, x, eps: float | None = None) -> bool:
        e = tolerances.current().side if eps is None else eps
        v = self.sign * self.plane.value(x)
        return v >= -e if self.closed else v > e

    def to_json(self) -> dict:
        return {"plane": self.plane.to_json(), "sign": "+" if self.sign > 0 else "-",
                "closed": self.closed}

    @classmethod
    def from_json(cls, d) -> "Constraint":
        return cls(OrientedHyperplane.from_json(d["plane"]), 1 if d["sign"] in ("+", 1) else -1,
                   bool(d.get("closed", False)))


@dataclass(frozen=True)
class SphereRegion:
    n: int
    constraints: tuple[Constraint, ...] = ()

    @classmethod
    def full(cls, n: int) -> "SphereRegion":
        return cls(n, ())

    @classmethod
    def of(cls, n: int, *items) -> "SphereRegion":
        """Region from (plane, sign) or (plane, sign, closed) tuples."""
        return cls(n, tuple(Constraint(*it) for it in items))

    def planes(self) -> list[OrientedHyperplane]:
        return [c.plane for c in self.constraints]

    def restrict(self, plane: OrientedHyperplane, sign: int, closed: bool = False) -> "SphereRegion":
        return SphereRegion(self.n, self.constraints + (Constraint(plane, sign, closed),))

    def closure(self) -> "SphereRegion":
        return SphereRegion(self.n, tuple(Constraint(c.plane, c.sign, True) for c in self.constraints))

    def interior(self) -> "SphereRegion":
        return SphereRegion(self.n, tuple(Constraint(c.plane, c.sign, False) for c in self.constraints))

    @property
    def is_full(self) -> bool:
        return not self.constraints

    def contains(self, x, eps: float | None = None) -> bool:
        return all(c.holds(x, eps) for c in self.constraints)

    def rotated(self, rho: Rotation) -> "SphereRegion":
        return SphereRegion(self.n, tuple(Constraint(rotate(rho, c.plane), c.sign, c.closed)
                                          for c in self.constraints))

    def to_json(self):
        if self.is_full:
            return "full"
        return {"n": self.n, "constraints": [c.to_json() for c in self.constraints]}

    @classmethod
    def from_json(cls, d, n: int | None = None) -> "SphereRegion":
        if d == "full":
            if n is None:
                raise ValueError("'full' region needs n")
            return cls.full(n)
        return cls(int(d["n"]), tuple(Constraint.from_json(c) for c in d["constraints"]))


@dataclass(frozen=True)
class BallFace:
    """carrier ∩ D^{n+1} ∩ closed half-spaces."""
    carrier: OrientedHyperplane
    constraints: tuple[Constraint, ...] = field(default=())

    @property
    def ambient_dim(self) -> int:
        return self.carrier.ambient_dim


# ---------------------------------------------------------------- engines

_ENGINE = {"kind": "exact", "mesh_level": 6}


def set_engine(kind: str = "exact", mesh_level: int | None = None) -> dict:
    if kind not in ("exact", "mesh"):
        raise ValueError(f"unknown engine {kind!r}")
    prev = dict(_ENGINE)
    _ENGINE["kind"] = kind
    if mesh_level is not None:
        _ENGINE["mesh_level"] = int(mesh_level)
    return prev


def engine_config() -> dict:
    return dict(_ENGINE)


class ExactEngine:
    def __init__(self, arr: _arr.Arrangement):
        self.arr = arr
        self.n = arr.n

    @property
    def size(self) -> int:
        return self.arr.size

    def plane_signs(self, P) -> np.ndarray:
        return self.arr.plane_signs(P)

    def components(self, mask):
        return self.arr.components(mask)

    def euler(self, mask, closed: bool) -> int:
        if closed or self.n == 2:
            return self.arr.euler_c(mask)
        count, _ = self.components(mask)
        return 0 if mask.all() else count

    def point(self, labels: np.ndarray, comp: int) -> np.ndarray:
        idx = np.flatnonzero(labels == comp)
        best = idx[np.argmax(self.arr.dims[idx])]
        return self.arr.points[best].copy()


class SampleEngine:
    def __init__(self, mesh: MeshEngine):
        self.mesh = mesh
        self.n = mesh.n

    @property
    def size(self) -> int:
        return self.mesh.size

    def plane_signs(self, P) -> np.ndarray:
        return self.mesh.plane_signs(P)

    def components(self, mask):
        return self.mesh.components(mask)

    def euler(self, mask, closed: bool) -> int:
        return self.mesh.euler(mask)

    def point(self, labels, comp) -> np.ndarray:
        return self.mesh.points[np.flatnonzero(labels == comp)[0]].copy()


def engine_for(n: int, planes, engine: str | None = None):
    kind = engine or _ENGINE["kind"]
    planes = list(planes)
    if kind == "exact":
        return ExactEngine(_arr.arrangement(n, planes))
    _arr.unique_circles(n, planes)
    return SampleEngine(MeshEngine(n, _ENGINE["mesh_level"]))


def region_mask(eng, R: SphereRegion) -> np.ndarray:
    m = np.ones(eng.size, dtype=bool)
    for c in R.constraints:
        s = eng.plane_signs(c.plane) * c.sign
        m &= (s >= 0) if c.closed else (s > 0)
    return m


def _eng(R: SphereRegion, engine):
    return engine_for(R.n, R.planes(), engine)


# ---------------------------------------------------------------- region queries


def region_is_empty(R: SphereRegion, engine: str | None = None) -> bool:
    eng = _eng(R, engine)
    return not region_mask(eng, R).any()


def region_components(R: SphereRegion, engine: str | None = None) -> tuple[int, list[np.ndarray]]:
    eng = _eng(R, engine)
    count, labels = eng.components(region_mask(eng, R))
    return count, [eng.point(labels, c) for c in range(count)]


def regions_equal(R: SphereRegion, S: SphereRegion, engine: str | None = None) -> bool:
    if R.n != S.n:
        raise ValueError("regions live on different spheres")
    eng = engine_for(R.n, R.planes() + S.planes(), engine)
    return bool(np.array_equal(region_mask(eng, R), region_mask(eng, S)))


def region_euler(R: SphereRegion, engine: str | None = None) -> int:
    flags = {c.closed for c in R.constraints}
    if len(flags) > 1:
        raise ValueError("Euler characteristic needs all constraints open or all closed")
    eng = _eng(R, engine)
    return eng.euler(region_mask(eng, R), closed=(flags == {True}))


def complement_profile(R: SphereRegion, engine: str | None = None, eng=None) -> list[int]:
    """Euler characteristic of each component of the closed complement of an open region."""
    eng = eng or _eng(R, engine)
    mask = ~region_mask(eng, R.interior())
    count, labels = eng.components(mask)
    return [eng.euler(labels == c, closed=True) for c in range(count)]


def is_generic(n: int, planes) -> bool:
    from .errors import NonGeneric
    try:
        _arr.unique_circles(n, list(planes))
        return True
    except NonGeneric:
        return False


# ---------------------------------------------------------------- faces in the ball


def _halfspaces(constraints) -> list[tuple[np.ndarray, float]]:
    """a.x >= b for each closed constraint."""
    return [(c.sign * c.plane.nu, c.sign * c.plane.offset) for c in constraints]


def _feasible(x, H, eps) -> bool:
    return float(x @ x) <= 1.0 + eps and all(float(a @ x) >= b - eps for a, b in H)


def _plane_frame(P: OrientedHyperplane):
    nu = P.nu
    d = len(nu)
    basis = []
    for e in np.eye(d):
        w = e - (e @ nu) * nu
        for b in basis:
            w = w - (w @ b) * b
        if np.linalg.norm(w) > 1e-6:
            basis.append(w / np.linalg.norm(w))
        if len(basis) == d - 1:
            break
    return P.offset * nu, np.array(basis)


def face_candidates(carrier: OrientedHyperplane, constraints, directions=(), eps=None) -> list[np.ndarray]:
    """Feasible points of carrier ∩ D ∩ half-spaces containing every extreme point
    relevant for emptiness and for extremizing the given linear directions."""
    e = tolerances.current().side if eps is None else eps
    if abs(carrier.offset) > 1.0 + e:
        return []
    H = _halfspaces(constraints)
    c0, B = _plane_frame(carrier)
    rho2 = max(1.0 - carrier.offset ** 2, 0.0)
    rho = np.sqrt(rho2)
    lines = []                # in frame coordinates: g.y >= h
    for a, b in H:
        g = B @ a
        h = b - float(a @ c0)
        if np.linalg.norm(g) < 1e-14:
            if h > e:
                return []
            continue
        lines.append((g, h))
    cand = [np.zeros(B.shape[0])]
    dim = B.shape[0]
    if dim == 1:
        cand += [np.array([rho]), np.array([-rho])]
        cand += [np.array([h / g[0]]) for g, h in lines]
    else:
        for g, h in lines:
            gn = np.linalg.norm(g)
            foot = g * h / gn ** 2
            t2 = rho2 - float(foot @ foot)
            if t2 >= -e:
                w = np.array([-g[1], g[0]]) / gn
                t = np.sqrt(max(t2, 0.0))
                cand += [foot + t * w, foot - t * w]
        for (g1, h1), (g2, h2) in combinations(lines, 2):
            M = np.array([g1, g2])
            if abs(np.linalg.det(M)) > 1e-14:
                cand.append(np.linalg.solve(M, [h1, h2]))
        for d in directions:
            g = B @ np.asarray(d, dtype=float)
            gn = np.linalg.norm(g)
            if gn > 1e-14:
                cand += [rho * g / gn, -rho * g / gn]
    out = []
    for y in cand:
        x = c0 + y @ B
        if not np.all(np.isfinite(x)):
            raise NumericFailure("non-finite candidate in face computation")
        if _feasible(x, H, e):
            out.append(x)
    return out


def face_is_empty(F: BallFace) -> bool:
    return not face_candidates(F.carrier, F.constraints)


def face_extent(F: BallFace, direction) -> tuple[float, float] | None:
    """(min, max) of <direction, x> over the face, or None if the face is empty."""
    d = np.asarray(direction, dtype=float)
    pts = face_candidates(F.carrier, F.constraints, directions=[d])
    if not pts:
        return None
    vals = [float(d @ x) for x in pts]
    return min(vals), max(vals)


def faces_adjacent(F: BallFace, G: BallFace) -> bool:
    """Whether the closures of two faces meet."""
    if F.ambient_dim != G.ambient_dim:
        raise ValueError("faces live in different dimensions")
    e = tolerances.current().side
    cons = F.constraints + G.constraints
    P, Q = F.carrier, G.carrier
    o = same_plane(P, Q)
    if o:
        return bool(face_candidates(P, cons))
    if parallel(P, Q):
        return False
    H = _halfspaces(cons)
    a, b = P.nu, Q.nu
    c = float(a @ b)
    x0 = ((P.offset - c * Q.offset) * a + (Q.offset - c * P.offset) * b) / (1.0 - c * c)
    if not np.all(np.isfinite(x0)):
        raise NumericFailure("carrier intersection is ill-conditioned")
    if len(a) == 2:
        return _feasible(x0, H, e)
    u = np.cross(a, b)
    u /= np.linalg.norm(u)
    r2 = 1.0 - float(x0 @ x0)
    if r2 < -e:
        return False
    t = np.sqrt(max(r2, 0.0))
    lo, hi = -t, t
    for g, h in H:
        gu, gx = float(g @ u), float(g @ x0)
        if abs(gu) < 1e-14:
            if gx < h - e:
                return False
            continue
        bound = (h - gx) / gu
        if gu > 0:
            lo = max(lo, bound)
        else:
            hi = min(hi, bound)
    return lo <= hi + e


__all__ = [
    "Constraint", "SphereRegion", "BallFace", "set_engine", "engine_config", "engine_for",
    "region_mask", "region_is_empty", "region_components", "regions_equal", "region_euler",
    "complement_profile", "faces_adjacent", "face_extent", "face_is_empty", "is_generic",
    "make_hyperplane",
]
