"""Seeded random generation of cleaving elements and of the regions they act on."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cleaving import DecoratedTree, DNode, DTree, in_ob_cleave
from .errors import ExhaustedRetries, NonGeneric, NotCleaving
from .geometry import OrientedHyperplane, kappa, random_unit
from .operad import CleavageElement
from .regions import Constraint, SphereRegion, engine_for, is_generic, region_mask
from .trees import Leaf


@dataclass
class SampleStats:
    attempts: int = 0
    accepted: int = 0
    rejected: dict = field(default_factory=dict)

    def reject(self, why: str) -> None:
        self.rejected[why] = self.rejected.get(why, 0) + 1

    @property
    def rate(self) -> float:
        return self.accepted / self.attempts if self.attempts else 0.0

    def to_json(self) -> dict:
        return {"attempts": self.attempts, "accepted": self.accepted, "rate": self.rate,
                "rejected": dict(sorted(self.rejected.items()))}


def random_shape(k: int, rng: np.random.Generator):
    """Random planar binary shape with k leaves (placeholder labels)."""
    if k == 1:
        return Leaf(0)
    left = int(rng.integers(1, k))
    return (random_shape(left, rng), random_shape(k - left, rng))


def random_plane(n: int, rng: np.random.Generator) -> OrientedHyperplane:
    return kappa(random_unit(n + 1, rng), float(rng.uniform(-1.0, 1.0)))


class _Pool:
    """Random sphere points: a cheap sufficient test for nonemptiness of open regions."""

    def __init__(self, n: int, rng: np.random.Generator, size: int = 2048):
        x = rng.standard_normal((size, n + 1))
        self.x = x / np.linalg.norm(x, axis=1, keepdims=True)

    def inside(self, cons) -> np.ndarray:
        m = np.ones(len(self.x), dtype=bool)
        for c in cons:
            m &= c.sign * (self.x @ c.plane.nu - c.plane.offset) > 1e-9
        return m


def _nonempty(n, U: SphereRegion, cons, planes, pool: _Pool) -> bool:
    if pool.inside(U.constraints + cons).any():
        return True
    eng = engine_for(n, planes)
    return bool(region_mask(eng, SphereRegion(n, U.constraints + cons)).any())


def random_element(n: int, k: int, rng: np.random.Generator, U: SphereRegion | None = None,
                   budget: int = 10_000, stats: SampleStats | None = None,
                   require_ob: bool = True) -> CleavageElement:
    """Rejection-sampled cleaving element of arity k over U (default: the whole sphere).

    The shape and leaf labels are uniform random; each decoration is drawn as
    kappa(s, r) with s uniform on S^n and r uniform in ]-1, 1[ and redrawn until its
    vertex is cleaved. Whole elements are redrawn if the configuration is degenerate
    or (with require_ob) some leaf timber falls outside Ob(Cleav).
    """
    U = U if U is not None else SphereRegion.full(n)
    stats = stats if stats is not None else SampleStats()
    tries = 0
    while tries < budget:
        shape = random_shape(k, rng)
        labels = [int(x) for x in rng.permutation(k) + 1]
        pool = _Pool(n, rng)
        planes: list[OrientedHyperplane] = list(U.planes())
        lab_iter = iter(labels)

        def build(sh, cons):
            nonlocal tries
            if isinstance(sh, Leaf):
                return Leaf(next(lab_iter))
            while True:
                tries += 1
                stats.attempts += 1
                if tries > budget:
                    raise ExhaustedRetries(f"no cleaving element after {budget} draws")
                P = random_plane(n, rng)
                if not is_generic(n, planes + [P]):
                    stats.reject("degenerate")
                    continue
                neg, pos = cons + (Constraint(P, -1),), cons + (Constraint(P, 1),)
                if _nonempty(n, U, neg, planes + [P], pool) and _nonempty(n, U, pos, planes + [P], pool):
                    break
                stats.reject("not cleaving")
            planes.append(P)
            left = build(sh[0], neg)
            right = build(sh[1], pos)
            return DNode(left, right, P)

        try:
            root: DTree = build(shape, ())
            d = DecoratedTree.from_droot(root, U)
            a = CleavageElement(d)
        except (NonGeneric, NotCleaving):
            stats.reject("degenerate")
            continue
        if require_ob and not all(in_ob_cleave(R) for R in a.timber):
            stats.reject("timber outside Ob")
            continue
        stats.accepted += 1
        return a
    raise ExhaustedRetries(f"no cleaving element after {budget} draws")


def random_region(n: int, rng: np.random.Generator, max_planes: int = 3,
                  require_ob: bool = True, budget: int = 1000) -> SphereRegion:
    """Random nonempty generic region (intersection of 1..max_planes open half-spaces)."""
    for _ in range(budget):
        m = int(rng.integers(1, max_planes + 1))
        cons = tuple(Constraint(random_plane(n, rng), int(rng.choice([-1, 1]))) for _ in range(m))
        R = SphereRegion(n, cons)
        if not is_generic(n, R.planes()):
            continue
        eng = engine_for(n, R.planes())
        mask = region_mask(eng, R)
        if not mask.any():
            continue
        if eng.components(mask)[0] != 1:
            continue
        if require_ob and not all(chi == 1 for chi in _profile(eng, mask)):
            continue
        return R
    raise ExhaustedRetries("no random region found")


def _profile(eng, mask):
    count, labels = eng.components(~mask)
    return [eng.euler(labels == c, closed=True) for c in range(count)]


def random_permutation(k: int, rng: np.random.Generator) -> tuple[int, ...]:
    return tuple(int(x) for x in rng.permutation(k) + 1)
