"""Sampling engines used as independent oracles for the exact stratification.

S^1: a fine regular polygon, membership by vertex.
S^2: a geodesic icosphere, membership by triangle centroid, components by
edge-adjacency, Euler characteristic V - E + F of the member triangles.
Both are only as good as their resolution; callers pick configurations whose
features are several mesh spacings wide.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components


@lru_cache(maxsize=8)
def icosphere(level: int) -> tuple[np.ndarray, np.ndarray]:
    t = (1.0 + 5 ** 0.5) / 2.0
    v = np.array([[-1, t, 0], [1, t, 0], [-1, -t, 0], [1, -t, 0],
                  [0, -1, t], [0, 1, t], [0, -1, -t], [0, 1, -t],
                  [t, 0, -1], [t, 0, 1], [-t, 0, -1], [-t, 0, 1]], dtype=float)
    f = np.array([[0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
                  [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
                  [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
                  [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1]])
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    for _ in range(level):
        e = np.concatenate([f[:, [0, 1]], f[:, [1, 2]], f[:, [2, 0]]])
        e.sort(axis=1)
        uniq, inv = np.unique(e, axis=0, return_inverse=True)
        inv = inv.reshape(-1)
        mid = v[uniq[:, 0]] + v[uniq[:, 1]]
        mid /= np.linalg.norm(mid, axis=1, keepdims=True)
        base = len(v)
        v = np.concatenate([v, mid])
        F = len(f)
        a, b, c = inv[:F] + base, inv[F:2 * F] + base, inv[2 * F:] + base
        f = np.concatenate([
            np.stack([f[:, 0], a, c], 1), np.stack([f[:, 1], b, a], 1),
            np.stack([f[:, 2], c, b], 1), np.stack([a, b, c], 1)])
    return v, f


@lru_cache(maxsize=8)
def _sphere_mesh(level: int):
    v, f = icosphere(level)
    cent = v[f].mean(axis=1)
    cent /= np.linalg.norm(cent, axis=1, keepdims=True)
    e = np.concatenate([f[:, [0, 1]], f[:, [1, 2]], f[:, [2, 0]]])
    e.sort(axis=1)
    uniq, inv = np.unique(e, axis=0, return_inverse=True)
    inv = inv.reshape(-1)
    F = len(f)
    tri = np.tile(np.arange(F), 3)
    order = np.argsort(inv, kind="stable")
    pairs = tri[order].reshape(-1, 2)       # each edge is shared by exactly two triangles
    face_edges = np.stack([inv[:F], inv[F:2 * F], inv[2 * F:]], 1)
    return v, f, cent, pairs, face_edges, len(uniq)


class MeshEngine:
    """Same query surface as the exact engine, evaluated on a sample complex."""

    def __init__(self, n: int, level: int = 6, s1_points: int = 1 << 16):
        self.n = n
        if n == 1:
            ang = (np.arange(s1_points) + 0.5) * (2 * np.pi / s1_points)
            self.points = np.stack([np.cos(ang), np.sin(ang)], 1)
        elif n == 2:
            self.level = level
            _, _, self.points, self.pairs, self.face_edges, _ = _sphere_mesh(level)
        else:
            raise ValueError("mesh engine supports n in {1, 2}")

    @property
    def size(self) -> int:
        return len(self.points)

    def plane_signs(self, P) -> np.ndarray:
        return np.sign(self.points @ np.asarray(P.normal) - P.offset).astype(np.int8)

    def clean(self, mask: np.ndarray, min_cells: int = 8) -> np.ndarray:
        """Drop specks of fewer than min_cells triangles from the mask and fill pinholes.

        Centroid sampling leaves isolated triangles near circle crossings; with the
        feature-size filter real components are far larger than min_cells.
        """
        if self.n == 1:
            return mask
        out = mask.copy()
        for target in (True, False):
            sel = out if target else ~out
            count, lab = self._raw_components(sel)
            sizes = np.bincount(lab[lab >= 0], minlength=count)
            small = np.isin(lab, np.flatnonzero(sizes < min_cells))
            out[small] = not target
        return out

    def components(self, mask: np.ndarray) -> tuple[int, np.ndarray]:
        return self._raw_components(self.clean(mask))

    def _raw_components(self, mask: np.ndarray) -> tuple[int, np.ndarray]:
        labels = np.full(self.size, -1, dtype=int)
        idx = np.flatnonzero(mask)
        if len(idx) == 0:
            return 0, labels
        if self.n == 1:
            M = self.size
            if len(idx) == M:
                labels[:] = 0
                return 1, labels
            starts = mask & ~np.roll(mask, 1)
            run = np.cumsum(starts) - 1
            # samples before the first run start belong to the run wrapping around the end
            run[run < 0] = run[-1]
            labels[mask] = run[mask]
            return int(starts.sum()), labels
        pos = np.full(self.size, -1, dtype=int)
        pos[idx] = np.arange(len(idx))
        keep = mask[self.pairs[:, 0]] & mask[self.pairs[:, 1]]
        a, b = pos[self.pairs[keep, 0]], pos[self.pairs[keep, 1]]
        g = coo_matrix((np.ones(len(a)), (a, b)), shape=(len(idx), len(idx))).tocsr()
        count, lab = connected_components(g, directed=False)
        labels[idx] = lab
        return int(count), labels

    def euler(self, mask: np.ndarray) -> int:
        if self.n == 1:
            count, _ = self.components(mask)
            return 0 if mask.all() else count
        _, f, *_ = _sphere_mesh(self.level)
        mask = self.clean(mask)
        F = int(mask.sum())
        if F == 0:
            return 0
        E = len(np.unique(self.face_edges[mask]))
        V = len(np.unique(f[mask]))
        return V - E + F


def feature_size(n: int, planes) -> float:
    """Smallest angular feature of the arrangement (radians).

    Covers cap radii, gaps between nearly touching circles, distances from crossing
    points to third circles and crossing angles. A mesh with spacing well below
    this value resolves every component of every region built from these planes.
    """
    from .arrangement import unique_circles
    cs = unique_circles(n, planes)
    if not cs:
        return np.pi
    N = np.array([c.normal for c in cs])
    p = np.array([c.offset for c in cs])
    rad = np.arccos(np.abs(p))
    best = float(rad.min())
    a = np.arccos(np.clip(p, -1, 1))
    if n == 1:
        ang = np.concatenate([np.arctan2(N[:, 1], N[:, 0]) + a, np.arctan2(N[:, 1], N[:, 0]) - a]) % (2 * np.pi)
        ang.sort()
        gaps = np.diff(np.concatenate([ang, [ang[0] + 2 * np.pi]]))
        return min(best, float(gaps.min()))
    verts = []
    for i in range(len(cs)):
        for j in range(i + 1, len(cs)):
            th = float(np.arccos(np.clip(N[i] @ N[j], -1, 1)))
            best = min(best, abs(th - (a[i] + a[j])), abs(th - abs(a[i] - a[j])),
                       abs(2 * np.pi - a[i] - a[j] - th))
            c = float(N[i] @ N[j])
            if 1 - abs(c) < 1e-12:
                continue
            x0 = ((p[i] - c * p[j]) * N[i] + (p[j] - c * p[i]) * N[j]) / (1 - c * c)
            d2 = float(x0 @ x0)
            if d2 < 1:
                u = np.cross(N[i], N[j])
                u /= np.linalg.norm(u)
                for v in (x0 + np.sqrt(1 - d2) * u, x0 - np.sqrt(1 - d2) * u):
                    verts.append((i, j, v))
                    # angle between the two circles at the crossing
                    t1 = np.cross(v, N[i] - (N[i] @ v) * v)
                    t2 = np.cross(v, N[j] - (N[j] @ v) * v)
                    cosang = abs(t1 @ t2) / (np.linalg.norm(t1) * np.linalg.norm(t2))
                    best = min(best, float(np.arccos(np.clip(cosang, 0, 1))))
    for i, j, v in verts:
        for k in range(len(cs)):
            if k not in (i, j):
                best = min(best, abs(float(np.arccos(np.clip(N[k] @ v, -1, 1))) - a[k]))
    for x in range(len(verts)):
        for y in range(x + 1, len(verts)):
            best = min(best, float(np.arccos(np.clip(verts[x][2] @ verts[y][2], -1, 1))))
    return best
