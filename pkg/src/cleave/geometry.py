"""Oriented affine hyperplanes in R^{n+1}, the kappa parametrization and rotations."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import tolerances
from .errors import NotUnit, ZeroNormal


@dataclass(frozen=True)
class OrientedHyperplane:
    """The set <normal, x> = offset, positive side <normal, x> > offset."""

    normal: tuple[float, ...]
    offset: float

    @property
    def ambient_dim(self) -> int:
        return len(self.normal)

    @property
    def nu(self) -> np.ndarray:
        return np.array(self.normal, dtype=float)

    def value(self, x) -> float:
        """Signed distance <nu, x> - p (the normal is unit)."""
        return float(np.dot(self.normal, x) - self.offset)

    def meets_sphere(self, tol: float | None = None) -> bool:
        t = tolerances.current().tangent if tol is None else tol
        return abs(self.offset) < 1.0 - t

    def to_json(self) -> dict:
        return {"normal": list(self.normal), "offset": self.offset}

    @classmethod
    def from_json(cls, d: dict) -> "OrientedHyperplane":
        return make_hyperplane(d["normal"], d["offset"])

    def __repr__(self) -> str:
        nrm = ", ".join(f"{c:.6g}" for c in self.normal)
        return f"P(({nrm}), {self.offset:.6g})"


def _tup(v) -> tuple[float, ...]:
    return tuple(float(c) for c in v)


def make_hyperplane(normal, offset) -> OrientedHyperplane:
    v = np.asarray(normal, dtype=float)
    norm = float(np.linalg.norm(v))
    if norm < tolerances.current().unit:
        raise ZeroNormal(f"normal {list(v)} has length {norm}")
    if abs(norm - 1.0) <= 1e-15:
        return OrientedHyperplane(_tup(v), float(offset))
    return OrientedHyperplane(_tup(v / norm), float(offset) / norm)


def side_of(P: OrientedHyperplane, x, eps: float | None = None) -> int:
    """+1, -1 or 0 (within eps of the plane)."""
    e = tolerances.current().side if eps is None else eps
    d = P.value(x)
    if abs(d) <= e:
        return 0
    return 1 if d > 0 else -1


def reverse(P: OrientedHyperplane) -> OrientedHyperplane:
    return OrientedHyperplane(tuple(-c for c in P.normal), -P.offset)


def antipodally_parallel(P: OrientedHyperplane, Q: OrientedHyperplane, eps: float | None = None) -> bool:
    e = tolerances.current().unit if eps is None else eps
    return bool(np.max(np.abs(P.nu + Q.nu)) <= e)


def parallel(P: OrientedHyperplane, Q: OrientedHyperplane, eps: float | None = None) -> bool:
    e = tolerances.current().unit if eps is None else eps
    return bool(min(np.max(np.abs(P.nu + Q.nu)), np.max(np.abs(P.nu - Q.nu))) <= e)


def kappa(s, t) -> OrientedHyperplane:
    """The hyperplane with unit normal s through the point t*s."""
    v = np.asarray(s, dtype=float)
    if abs(float(np.linalg.norm(v)) - 1.0) > tolerances.current().unit:
        raise NotUnit(f"{list(v)} is not a unit vector")
    return OrientedHyperplane(_tup(v), float(t))


def same_plane(P: OrientedHyperplane, Q: OrientedHyperplane, eps: float | None = None) -> int:
    """+1 if P == Q, -1 if P == reverse(Q) (as oriented point sets, within eps), else 0."""
    e = tolerances.current().same_plane if eps is None else eps
    a, b = P.nu, Q.nu
    if np.max(np.abs(a - b)) <= e and abs(P.offset - Q.offset) <= e:
        return 1
    if np.max(np.abs(a + b)) <= e and abs(P.offset + Q.offset) <= e:
        return -1
    return 0


@dataclass(frozen=True)
class Rotation:
    matrix: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        m = self.m
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("rotation matrix must be square")
        e = max(tolerances.current().unit, 1e-9)
        if np.max(np.abs(m.T @ m - np.eye(m.shape[0]))) > e * 10 or abs(np.linalg.det(m) - 1.0) > e * 10:
            raise ValueError("matrix is not in SO(n+1)")

    @classmethod
    def from_matrix(cls, m) -> "Rotation":
        a = np.asarray(m, dtype=float)
        return cls(tuple(tuple(float(c) for c in row) for row in a))

    @classmethod
    def identity(cls, dim: int) -> "Rotation":
        return cls.from_matrix(np.eye(dim))

    @property
    def m(self) -> np.ndarray:
        return np.array(self.matrix, dtype=float)

    @property
    def ambient_dim(self) -> int:
        return len(self.matrix)

    def __matmul__(self, other: "Rotation") -> "Rotation":
        return Rotation.from_matrix(self.m @ other.m)

    def inverse(self) -> "Rotation":
        return Rotation.from_matrix(self.m.T)

    def apply(self, x) -> np.ndarray:
        return self.m @ np.asarray(x, dtype=float)

    def to_json(self) -> list:
        return [list(r) for r in self.matrix]

    @classmethod
    def from_json(cls, rows) -> "Rotation":
        return cls.from_matrix(rows)


def rotate(rho: Rotation, P: OrientedHyperplane) -> OrientedHyperplane:
    if rho.ambient_dim != P.ambient_dim:
        raise ValueError("dimension mismatch")
    return OrientedHyperplane(_tup(rho.m @ P.nu), P.offset)


def plane_rotation(dim: int, angle: float, i: int = 0, j: int = 1) -> Rotation:
    """Rotation by `angle` in the (x_i, x_j) coordinate plane."""
    m = np.eye(dim)
    c, s = np.cos(angle), np.sin(angle)
    m[i, i], m[i, j], m[j, i], m[j, j] = c, -s, s, c
    return Rotation.from_matrix(m)


def random_rotation(dim: int, rng: np.random.Generator) -> Rotation:
    """Haar-distributed element of SO(dim)."""
    from scipy.stats import special_ortho_group
    return Rotation.from_matrix(special_ortho_group.rvs(dim, random_state=rng))


def random_unit(dim: int, rng: np.random.Generator) -> np.ndarray:
    while True:
        v = rng.standard_normal(dim)
        nrm = np.linalg.norm(v)
        if nrm > 1e-6:
            return v / nrm


def hemisphere_member(s, i: int, sign: str | int, eps: float | None = None) -> bool:
    """Membership in S^i_sign: x_i has the sign, coordinates after i vanish (0-indexed)."""
    e = tolerances.current().side if eps is None else eps
    x = np.asarray(s, dtype=float)
    if not 0 <= i < len(x):
        raise ValueError(f"hemisphere index {i} out of range")
    sg = 1 if sign in ("+", 1) else -1
    if sg > 0 and x[i] < -e:
        return False
    if sg < 0 and x[i] > e:
        return False
    return bool(np.all(np.abs(x[i + 1:]) <= e))
