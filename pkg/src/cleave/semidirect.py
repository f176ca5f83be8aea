"""SO(n+1) acting on cleavage elements, and the semidirect product with twisted composition.

Convention: the twist rho_i acts on leaf i's timber, so composing f at leaf i asks
for input(f.base) == rho_i.timber_i. The base then absorbs the rotation as
omega o_i (rho_i^-1 . omega'), and the inserted block carries the twists
eta_j rho_i (rotate by rho_i first, then by eta_j).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cleaving import DecoratedTree
from .errors import BadIndex, ColourMismatch
from .geometry import Rotation, rotate
from .operad import CleavageElement, chop_equivalent, compose_i, unit
from .regions import SphereRegion, regions_equal


def group_act(rho: Rotation, a: CleavageElement) -> CleavageElement:
    d = a.rep
    return CleavageElement(DecoratedTree(d.tree, tuple(rotate(rho, P) for P in d.decorations),
                                         d.input.rotated(rho)))


@dataclass(frozen=True)
class SemidirectElement:
    base: CleavageElement
    twists: tuple[Rotation, ...]

    def __post_init__(self):
        if len(self.twists) != self.base.arity:
            raise ValueError(f"{len(self.twists)} twists for arity {self.base.arity}")
        for r in self.twists:
            if r.ambient_dim != self.base.n + 1:
                raise ValueError("twist lives in the wrong dimension")

    @property
    def arity(self) -> int:
        return self.base.arity

    @property
    def input(self) -> SphereRegion:
        return self.base.input

    def to_json(self) -> dict:
        return {"element": self.base.to_json(), "twists": [r.to_json() for r in self.twists]}

    @classmethod
    def from_json(cls, d: dict) -> "SemidirectElement":
        return cls(CleavageElement.from_json(d["element"]),
                   tuple(Rotation.from_json(r) for r in d["twists"]))


def sd_unit(U: SphereRegion) -> SemidirectElement:
    return SemidirectElement(unit(U), (Rotation.identity(U.n + 1),))


def untwisted(a: CleavageElement) -> SemidirectElement:
    return SemidirectElement(a, tuple(Rotation.identity(a.n + 1) for _ in range(a.arity)))


def ev_twisted(e: SemidirectElement, i: int) -> SphereRegion:
    if not 1 <= i <= e.arity:
        raise BadIndex(f"input {i} not in 1..{e.arity}")
    return e.base.timber[i - 1].rotated(e.twists[i - 1])


def sd_compose_i(e: SemidirectElement, i: int, f: SemidirectElement) -> SemidirectElement:
    if not 1 <= i <= e.arity:
        raise BadIndex(f"input {i} not in 1..{e.arity}")
    if not regions_equal(f.input, ev_twisted(e, i)):
        raise ColourMismatch(f"input of f differs from twisted leaf {i}")
    rho = e.twists[i - 1]
    base = compose_i(e.base, i, group_act(rho.inverse(), f.base))
    twists = e.twists[:i - 1] + tuple(eta @ rho for eta in f.twists) + e.twists[i:]
    return SemidirectElement(base, twists)


def sd_equal(a: SemidirectElement, b: SemidirectElement, tol: float = 1e-9) -> bool:
    return (chop_equivalent(a.base, b.base) and len(a.twists) == len(b.twists)
            and all(np.allclose(x.m, y.m, atol=tol, rtol=0) for x, y in zip(a.twists, b.twists)))
