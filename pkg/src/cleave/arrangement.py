"""Exact stratification of S^1 and S^2 by the circles cut out by a set of hyperplanes.

Timber, closures and complements are all unions of strata, so every region
question reduces to bookkeeping on the strata and their closure-adjacency graph.

S^1: points and open arcs between them.

S^2: a latitude sweep after a generic rotation. Critical heights are the poles, the
top/bottom of every circle and every pairwise crossing. Between consecutive
critical heights each circle contributes two branches phi = psi +/- alpha(z); the
open slab splits into 2-cells (between consecutive branches) and branch curves.
Each critical height carries level points and level arcs. Closure adjacency of a
2-cell with a level is read off from the continuous limit of its angular width.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import tolerances
from .errors import NonGeneric
from .geometry import OrientedHyperplane, same_plane

TWO_PI = 2.0 * np.pi


class _Degenerate(Exception):
    """The sweep frame is unlucky; retry with another rotation."""


@dataclass
class Arrangement:
    n: int
    circles: list[OrientedHyperplane]
    dims: np.ndarray
    chis: np.ndarray
    signs: np.ndarray          # (strata, circles) in {-1, 0, 1}
    points: np.ndarray         # representative point per stratum
    edges: np.ndarray          # (m, 2) closure adjacency
    _lookup: dict = field(default_factory=dict, repr=False)

    @property
    def size(self) -> int:
        return len(self.dims)

    def locate(self, P: OrientedHyperplane) -> tuple[int, int]:
        key = (P.normal, P.offset)
        hit = self._lookup.get(key)
        if hit is not None:
            return hit
        for j, C in enumerate(self.circles):
            o = same_plane(P, C)
            if o:
                self._lookup[key] = (j, o)
                return j, o
        raise KeyError(f"{P} is not part of this arrangement")

    def plane_signs(self, P: OrientedHyperplane) -> np.ndarray:
        if abs(P.offset) > 1.0:
            return np.full(self.size, -1 if P.offset > 0 else 1, dtype=np.int8)
        j, o = self.locate(P)
        return (o * self.signs[:, j]).astype(np.int8)

    def components(self, mask: np.ndarray) -> tuple[int, np.ndarray]:
        """Connected components of the union of the masked strata.

        Returns (count, labels) with labels[s] = -1 outside the mask.
        """
        idx = np.flatnonzero(mask)
        labels = np.full(self.size, -1, dtype=int)
        if len(idx) == 0:
            return 0, labels
        pos = np.full(self.size, -1, dtype=int)
        pos[idx] = np.arange(len(idx))
        e = self.edges
        if len(e):
            keep = mask[e[:, 0]] & mask[e[:, 1]]
            a, b = pos[e[keep, 0]], pos[e[keep, 1]]
        else:
            a = b = np.zeros(0, dtype=int)
        g = coo_matrix((np.ones(len(a)), (a, b)), shape=(len(idx), len(idx))).tocsr()
        count, lab = connected_components(g, directed=False)
        labels[idx] = lab
        return int(count), labels

    def euler_c(self, mask: np.ndarray) -> int:
        """Compactly supported Euler characteristic of the union of masked strata."""
        return int(self.chis[mask].sum())


# ---------------------------------------------------------------- genericity


def unique_circles(n: int, planes, tol: tolerances.Tolerances | None = None) -> list[OrientedHyperplane]:
    """Distinct planes meeting S^n, after the tangency / multiple contact guard."""
    t = tol or tolerances.current()
    out: list[OrientedHyperplane] = []
    for P in planes:
        if len(P.normal) != n + 1:
            raise ValueError(f"{P} does not live in R^{n + 1}")
        if abs(abs(P.offset) - 1.0) < t.tangent:
            raise NonGeneric(f"{P} is tangent to the sphere")
        if abs(P.offset) > 1.0:
            continue
        if any(same_plane(P, Q, t.same_plane) for Q in out):
            continue
        out.append(P)
    _guard(n, out, t)
    return out


def _guard(n: int, circles, t) -> None:
    eps = t.tangent
    N = np.array([c.normal for c in circles], dtype=float).reshape(len(circles), n + 1)
    p = np.array([c.offset for c in circles], dtype=float)
    verts = []
    for a in range(len(circles)):
        for b in range(a + 1, len(circles)):
            na, nb = N[a], N[b]
            for sgn in (1.0, -1.0):
                if np.max(np.abs(na - sgn * nb)) < eps and abs(p[a] - sgn * p[b]) < eps:
                    raise NonGeneric(f"{circles[a]} and {circles[b]} nearly coincide")
            c = float(na @ nb)
            if 1.0 - abs(c) < 1e-14:
                continue
            x0 = ((p[a] - c * p[b]) * na + (p[b] - c * p[a]) * nb) / (1.0 - c * c)
            d = float(np.linalg.norm(x0))
            if abs(d - 1.0) < eps:
                raise NonGeneric(f"{circles[a]} and {circles[b]} touch on the sphere")
            if n == 2 and d < 1.0:
                u = np.cross(na, nb)
                u /= np.linalg.norm(u)
                h = np.sqrt(1.0 - d * d)
                verts.append((a, b, x0 + h * u))
                verts.append((a, b, x0 - h * u))
    for a, b, v in verts:
        for e in range(len(circles)):
            if e != a and e != b and abs(float(N[e] @ v) - p[e]) < eps:
                raise NonGeneric(f"three circles nearly concurrent at {v}")


# ---------------------------------------------------------------- S^1


def _build_s1(circles, t) -> Arrangement:
    pts = []
    for j, c in enumerate(circles):
        psi = np.arctan2(c.normal[1], c.normal[0])
        a = np.arccos(np.clip(c.offset, -1.0, 1.0))
        pts.append(((psi + a) % TWO_PI, j))
        pts.append(((psi - a) % TWO_PI, j))
    pts.sort()
    if not pts:
        return Arrangement(1, list(circles), np.array([1], np.int8), np.array([0]),
                           np.zeros((1, 0), np.int8), np.array([[1.0, 0.0]]),
                           np.zeros((0, 2), int))
    ang = np.array([q[0] for q in pts])
    gaps = np.diff(np.concatenate([ang, [ang[0] + TWO_PI]]))
    if gaps.min() < max(t.angle, t.tangent):
        raise NonGeneric("two cut points on S^1 nearly coincide")
    K = len(pts)
    mids = ang + gaps / 2.0
    all_ang = np.concatenate([ang, mids])
    points = np.stack([np.cos(all_ang), np.sin(all_ang)], axis=1)
    N = np.array([c.normal for c in circles])
    p = np.array([c.offset for c in circles])
    vals = points @ N.T - p
    signs = np.sign(vals).astype(np.int8)
    for i, (_, j) in enumerate(pts):
        signs[i, j] = 0
    if np.any(np.abs(vals[signs != 0]) < 1e-13):
        raise NonGeneric("arc representative on a cut point")
    dims = np.array([0] * K + [1] * K, np.int8)
    chis = np.array([1] * K + [-1] * K)
    edges = [(K + i, i) for i in range(K)] + [(K + i, (i + 1) % K) for i in range(K)]
    return Arrangement(1, list(circles), dims, chis, signs, points, np.array(edges, int))


# ---------------------------------------------------------------- S^2


_ROTATIONS: list[np.ndarray] = []


def _sweep_rotations() -> list[np.ndarray]:
    if not _ROTATIONS:
        from scipy.stats import special_ortho_group
        rng = np.random.default_rng(20240917)
        _ROTATIONS.extend(special_ortho_group.rvs(3, size=40, random_state=rng))
    return _ROTATIONS


class _Sweep:
    DZ = 1e-10       # minimal separation of critical heights
    DA = 1e-9        # minimal angular separation on a level

    def __init__(self, N: np.ndarray, p: np.ndarray):
        self.N, self.p = N, p
        m = len(p)
        self.m = m
        nz = N[:, 2]
        s = np.hypot(N[:, 0], N[:, 1])
        if m and s.min() < 1e-6:
            raise _Degenerate("horizontal circle")
        if m and (np.min(np.abs(nz - p)) < 1e-7 or np.min(np.abs(-nz - p)) < 1e-7):
            raise _Degenerate("circle through a pole")
        self.s, self.nz = s, nz
        self.psi = np.arctan2(N[:, 1], N[:, 0])
        rc = np.sqrt(1.0 - p * p)
        self.zhi = p * nz + rc * s
        self.zlo = p * nz - rc * s

    def alpha(self, c: int, z: float) -> float:
        r = np.sqrt(max(1.0 - z * z, 0.0))
        arg = (self.p[c] - self.nz[c] * z) / (self.s[c] * r)
        return float(np.arccos(np.clip(arg, -1.0, 1.0)))

    def phi(self, br: tuple[int, int], z: float) -> float:
        c, sg = br
        return float(self.psi[c] + sg * self.alpha(c, z))

    def alive(self, z: float) -> list[int]:
        return [c for c in range(self.m) if self.zlo[c] < z < self.zhi[c]]

    def run(self):
        N, p, m = self.N, self.p, self.m
        events = [(-1.0, ("pole", -1)), (1.0, ("pole", 1))]
        for c in range(m):
            events.append((float(self.zhi[c]), ("top", c)))
            events.append((float(self.zlo[c]), ("bot", c)))
        for a in range(m):
            for b in range(a + 1, m):
                na, nb = N[a], N[b]
                cc = float(na @ nb)
                if 1.0 - abs(cc) < 1e-14:
                    continue
                x0 = ((p[a] - cc * p[b]) * na + (p[b] - cc * p[a]) * nb) / (1.0 - cc * cc)
                d2 = float(x0 @ x0)
                if d2 >= 1.0:
                    continue
                u = np.cross(na, nb)
                u /= np.linalg.norm(u)
                h = np.sqrt(1.0 - d2)
                for v in (x0 + h * u, x0 - h * u):
                    events.append((float(v[2]), ("vtx", (a, b, v))))
        events.sort(key=lambda e: e[0])
        zs = np.array([e[0] for e in events])
        if np.min(np.diff(zs)) < self.DZ:
            raise _Degenerate("critical heights collide")

        self.strata = []   # (dim, chi, point_rot, incident circles)
        self.edges = []
        levels = [self._level(z, ev) for z, ev in events]
        for li in range(len(levels) - 1):
            self._slab(levels[li], levels[li + 1])
        return self.strata, self.edges

    def _add(self, dim, chi, z, ang, incident):
        if dim == 0 and abs(abs(z) - 1.0) < 1e-15:
            pt = np.array([0.0, 0.0, z])
        else:
            r = np.sqrt(max(1.0 - z * z, 0.0))
            pt = np.array([r * np.cos(ang), r * np.sin(ang), z])
        self.strata.append((dim, chi, pt, tuple(incident)))
        return len(self.strata) - 1

    def _level(self, z: float, ev):
        """Level strata at a critical height; returns a level record."""
        kind, data = ev
        if kind == "pole":
            sid = self._add(0, 1, z, 0.0, ())
            return {"z": z, "pole": True, "points": [sid], "arcs": [], "branch_pt": {}, "all": [sid]}
        pts = []   # (angle, incident, branches)
        involved = set()
        if kind in ("top", "bot"):
            c = data
            # alpha is 0 or pi at an extremum, depending on which side of the axis it sits
            a = self.alpha(c, z)
            pts.append((float(self.psi[c] + (0.0 if a < np.pi / 2 else np.pi)), (c,),
                        ((c, 1), (c, -1))))
            involved.add(c)
        else:
            a, b, v = data
            ang = float(np.arctan2(v[1], v[0]))
            brs = []
            for c in (a, b):
                d = [abs(_wrap(self.phi((c, sg), z) - ang)) for sg in (1, -1)]
                sg = 1 if d[0] < d[1] else -1
                if min(d) > 1e-6 or max(d) < 1e-7:
                    raise _Degenerate("crossing not resolved on its level")
                brs.append((c, sg))
                pts.append((float(self.phi((c, -sg), z)), (c,), ((c, -sg),)))
            pts.append((ang, (a, b), tuple(brs)))
            involved.update((a, b))
        for c in self.alive(z):
            if c in involved:
                continue
            for sg in (1, -1):
                pts.append((self.phi((c, sg), z), (c,), ((c, sg),)))
        pts = [(a % TWO_PI, inc, brs) for a, inc, brs in pts]
        pts.sort(key=lambda q: q[0])
        ang = np.array([q[0] for q in pts])
        gaps = np.diff(np.concatenate([ang, [ang[0] + TWO_PI]]))
        if gaps.min() < self.DA:
            raise _Degenerate("level points collide")
        pids, branch_pt = [], {}
        for a, inc, brs in pts:
            sid = self._add(0, 1, z, a, inc)
            pids.append(sid)
            for br in brs:
                branch_pt[br] = len(pids) - 1
        arcs = []
        K = len(pids)
        for i in range(K):
            sid = self._add(1, -1, z, ang[i] + gaps[i] / 2.0, ())
            arcs.append(sid)
            self.edges.append((sid, pids[i]))
            self.edges.append((sid, pids[(i + 1) % K]))
        allst = []
        for i in range(K):
            allst += [pids[i], arcs[i]]
        return {"z": z, "pole": False, "points": pids, "arcs": arcs, "branch_pt": branch_pt, "all": allst}

    def _walk(self, lev, i0: int, i1: int) -> list[int]:
        """Level strata on the closed ccw arc from point index i0 to point index i1."""
        out = [lev["points"][i0]]
        K = len(lev["points"])
        i = i0
        while i != i1:
            out.append(lev["arcs"][i])
            i = (i + 1) % K
            out.append(lev["points"][i])
        return out

    def _limit(self, lev, b0, b1, D: float) -> list[int]:
        if lev["pole"]:
            return list(lev["points"])
        i0, i1 = lev["branch_pt"][b0], lev["branch_pt"][b1]
        if i0 == i1:
            return [lev["points"][i0]] if D < np.pi else list(lev["all"])
        return self._walk(lev, i0, i1)

    def _slab(self, lo, hi):
        za, zb = lo["z"], hi["z"]
        zm = 0.5 * (za + zb)
        alive = self.alive(zm)
        if not alive:
            sid = self._add(2, 0, zm, 0.0, ())
            for x in lo["all"] + hi["all"]:
                self.edges.append((sid, x))
            return
        brs = [(c, sg) for c in alive for sg in (1, -1)]
        ang_m = {br: self.phi(br, zm) for br in brs}
        order = sorted(brs, key=lambda br: ang_m[br] % TWO_PI)
        mod = np.array([ang_m[br] % TWO_PI for br in order])
        gaps = np.diff(np.concatenate([mod, [mod[0] + TWO_PI]]))
        if gaps.min() < self.DA:
            raise _Degenerate("branches collide inside a slab")
        curve = {}
        for br in order:
            sid = self._add(1, -1, zm, ang_m[br], (br[0],))
            curve[br] = sid
            self.edges.append((sid, lo["points"][lo["branch_pt"][br]]))
            self.edges.append((sid, hi["points"][hi["branch_pt"][br]]))
        K = len(order)
        for i in range(K):
            b0, b1 = order[i], order[(i + 1) % K]
            Lm = gaps[i]
            raw = ang_m[b1] - ang_m[b0]
            shift = TWO_PI * round((Lm - raw) / TWO_PI)
            sid = self._add(2, 1, zm, mod[i] + Lm / 2.0, ())
            self.edges.append((sid, curve[b0]))
            self.edges.append((sid, curve[b1]))
            for lev, z in ((lo, za), (hi, zb)):
                D = self.phi(b1, z) - self.phi(b0, z) + shift
                for x in self._limit(lev, b0, b1, D):
                    self.edges.append((sid, x))


def _wrap(a: float) -> float:
    return (a + np.pi) % TWO_PI - np.pi


def _build_s2(circles, t) -> Arrangement:
    N0 = np.array([c.normal for c in circles], dtype=float).reshape(len(circles), 3)
    p = np.array([c.offset for c in circles], dtype=float)
    last = None
    for R in _sweep_rotations():
        N = N0 @ R.T
        try:
            sw = _Sweep(N, p)
            strata, edges = sw.run()
            pts_rot = np.array([s[2] for s in strata])
            vals = pts_rot @ N.T - p
            signs = np.sign(vals).astype(np.int8)
            for i, s in enumerate(strata):
                for c in s[3]:
                    signs[i, c] = 0
            off = signs != 0
            if np.any(np.abs(vals[off]) < 1e-12):
                raise _Degenerate("representative point on a circle")
            dims = np.array([s[0] for s in strata], np.int8)
            chis = np.array([s[1] for s in strata])
            if chis.sum() != 2:
                raise _Degenerate("Euler characteristic of the sweep is off")
            points = pts_rot @ R
            return Arrangement(2, list(circles), dims, chis, signs, points,
                               np.array(edges, int).reshape(-1, 2))
        except _Degenerate as e:
            last = e
            continue
    raise NonGeneric(f"no generic sweep frame found ({last})")


def build(n: int, planes, tol: tolerances.Tolerances | None = None) -> Arrangement:
    t = tol or tolerances.current()
    circles = unique_circles(n, planes, t)
    if n == 1:
        return _build_s1(circles, t)
    if n == 2:
        return _build_s2(circles, t)
    raise ValueError("the region engine supports n in {1, 2}")


@lru_cache(maxsize=4096)
def _cached(n, planes, tol):
    return build(n, planes, tol)


def arrangement(n: int, planes, tol: tolerances.Tolerances | None = None) -> Arrangement:
    """Cached arrangement for a set of planes (order and duplicates irrelevant)."""
    key = tuple(sorted(set(planes), key=lambda P: (P.normal, P.offset)))
    return _cached(n, key, tol or tolerances.current())
