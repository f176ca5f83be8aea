"""Base parallel configurations, i-strings, the Theta construction and D_k membership."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import tolerances
from .blueprint import dominates
from .cleaving import DecoratedTree, DNode, is_cleaving_safe
from .errors import AmbiguousLeaf, BudgetExceeded, EmptyInterval, NonGeneric, NotCleaving
from .fullgraph import FullGraph
from .geometry import hemisphere_member, kappa, make_hyperplane
from .operad import CleavageElement
from .regions import Constraint, SphereRegion, engine_for, region_is_empty, region_mask
from .trees import Leaf, check_perm

__all__ = ["IString", "istrings", "cleaving_interval", "base_offsets", "base_config", "theta",
           "dk_member", "DkVerdict", "dominates"]


@dataclass(frozen=True)
class IString:
    """An insertion order of the k-1 reference planes of an arity-k configuration.

    sequence[l-1] is the lost number j_{iota_l}; the last entry is the terminal i,
    the element that survives every removal.
    """
    k: int
    sequence: tuple[int, ...]

    def __post_init__(self):
        check_perm(self.sequence, self.k - 1)

    @property
    def terminal(self) -> int:
        return self.sequence[-1]

    def lost(self, l: int) -> int:
        """j_{iota_l}, with j_{iota_0} = k."""
        return self.k if l == 0 else self.sequence[l - 1]

    def domains(self) -> list[frozenset[int]]:
        """D(iota_1) = {1..k-1}, then each step drops the lost number."""
        cur = set(range(1, self.k))
        out = []
        for j in self.sequence:
            out.append(frozenset(cur))
            cur.discard(j)
        return out


def istrings(k: int, budget: int = 8) -> dict[int, list[IString]]:
    """All i-strings for arity k, grouped by terminal."""
    if k > budget:
        raise BudgetExceeded(f"{math.factorial(k - 1)} strings for k={k}")
    out: dict[int, list[IString]] = {}
    for p in itertools.permutations(range(1, k)):
        s = IString(k, p)
        out.setdefault(s.terminal, []).append(s)
    return out


# ---------------------------------------------------------------- J_U


def _unit(v):
    v = np.asarray(v, dtype=float)
    nv = np.linalg.norm(v)
    return v / nv if nv > 1e-12 else None


def _sphere_candidates(U: SphereRegion) -> list[np.ndarray]:
    """Points where x1 can be extremal on the closure of U."""
    d = U.n + 1
    e1 = np.zeros(d)
    e1[0] = 1.0
    pts = [e1, -e1]
    planes = U.planes()
    for P in planes:
        nu, p = P.nu, P.offset
        if abs(p) >= 1.0:
            continue
        rad = math.sqrt(1.0 - p * p)
        if d == 2:
            t = np.array([-nu[1], nu[0]])
            pts += [p * nu + rad * t, p * nu - rad * t]
            continue
        u = _unit(e1 - (e1 @ nu) * nu)
        if u is None:
            # circle orthogonal to e1: x1 is constant on it
            u = _unit(np.cross(nu, np.array([0.0, 1.0, 0.0])))
        pts += [p * nu + rad * u, p * nu - rad * u]
    if d == 3:
        for P, Q in itertools.combinations(planes, 2):
            a = np.vstack([P.nu, Q.nu])
            line = np.cross(P.nu, Q.nu)
            if np.linalg.norm(line) < 1e-12:
                continue
            x0 = np.linalg.lstsq(a, np.array([P.offset, Q.offset]), rcond=None)[0]
            line = line / np.linalg.norm(line)
            b = x0 @ line
            disc = b * b - (x0 @ x0 - 1.0)
            if disc < 0:
                continue
            for sgn in (1, -1):
                pts.append(x0 + (-b + sgn * math.sqrt(disc)) * line)
    return pts


def cleaving_interval(U: SphereRegion) -> tuple[float, float]:
    """]inf x1, sup x1[ over U: the offsets t for which kappa(e1, t) cleaves U."""
    if region_is_empty(U):
        raise EmptyInterval("U is empty")
    eps = 1e-7
    closed = U.closure()
    xs = [float(x[0]) for x in _sphere_candidates(U) if closed.contains(x, eps)]
    if not xs:
        raise EmptyInterval("no point of the closure found")
    lo, hi = min(xs), max(xs)
    if hi - lo <= tolerances.current().side:
        raise EmptyInterval(f"degenerate interval [{lo}, {hi}]")
    return lo, hi


def base_offsets(U: SphereRegion, k: int) -> list[float]:
    """k-1 ascending offsets equidistant inside J_U."""
    lo, hi = cleaving_interval(U)
    return [lo + (hi - lo) * j / k for j in range(1, k)]


def _e1(n: int) -> tuple[float, ...]:
    return tuple(1.0 if c == 0 else 0.0 for c in range(n + 1))


def base_config(sigma, U: SphereRegion, offsets=None) -> CleavageElement:
    """Planes along +e1, left spine; slab p (counted from low x1) carries colour sigma(p)."""
    k = len(sigma)
    s = check_perm(sigma, k)
    xs = list(offsets) if offsets is not None else base_offsets(U, k)
    if len(xs) != k - 1 or any(b <= a for a, b in zip(xs, xs[1:])):
        raise ValueError("offsets must be k-1 strictly ascending numbers")
    e1 = _e1(U.n)
    root = Leaf(s[0])
    for p in range(1, k):
        root = DNode(root, Leaf(s[p]), make_hyperplane(e1, xs[p - 1]))
    return CleavageElement(DecoratedTree.from_droot(root, U))


# ---------------------------------------------------------------- Theta


@dataclass(frozen=True)
class _Slot:
    """A reference leaf: the slab between reference planes lo and hi (0 and k are the ends)."""
    lo: int
    hi: int


def _relabel_preorder(root):
    c = [0]

    def go(t):
        if isinstance(t, (Leaf, _Slot)):
            c[0] += 1
            return Leaf(c[0])
        return DNode(go(t.left), go(t.right), t.plane)

    return go(root)


def _slot_regions(root, U: SphereRegion):
    out = []

    def go(t, cons):
        if isinstance(t, _Slot):
            out.append((t, SphereRegion(U.n, U.constraints + cons)))
            return
        go(t.left, cons + (Constraint(t.plane, -1),))
        go(t.right, cons + (Constraint(t.plane, 1),))

    go(root, ())
    return out


def _replace(root, slot, new):
    if root is slot:
        return new
    if isinstance(root, _Slot):
        return root
    return DNode(_replace(root.left, slot, new), _replace(root.right, slot, new), root.plane)


def theta(U: SphereRegion, sigma, iota: IString, pairs, offsets=None) -> CleavageElement:
    """Grow the tree plane by plane in the order of iota.

    The reference planes P_j = kappa(e1, x_j) pick the leaf to graft at; the actual
    vertex created at step l carries kappa(s_l, r_l). Reference slab p gets colour
    sigma(p), the lower slab always on the left.
    """
    k = len(sigma)
    s = check_perm(sigma, k)
    if iota.k != k or len(pairs) != k - 1:
        raise ValueError("sigma, iota and pairs disagree on the arity")
    xs = list(offsets) if offsets is not None else base_offsets(U, k)
    e1 = _e1(U.n)
    ref = [make_hyperplane(e1, x) for x in xs]
    ref_root = _Slot(0, k)
    act_root = ref_root
    for l in range(1, k):
        j = iota.lost(l)
        P = ref[j - 1]
        eng = engine_for(U.n, U.planes() + [Q for Q in ref])
        sign = eng.plane_signs(P)
        hits = []
        for slot, R in _slot_regions(ref_root, U):
            m = region_mask(eng, R)
            if (m & (sign > 0)).any() and (m & (sign < 0)).any():
                hits.append(slot)
        if not hits:
            raise NotCleaving(f"reference plane {j} cleaves no leaf at step {l}", step=l)
        if len(hits) > 1:
            raise AmbiguousLeaf(f"reference plane {j} cleaves {len(hits)} leaves at step {l}")
        slot = hits[0]
        left, right = _Slot(slot.lo, j), _Slot(j, slot.hi)
        ref_root = _replace(ref_root, slot, DNode(left, right, P))
        sl, rl = pairs[l - 1]
        act_root = _replace(act_root, slot, DNode(left, right, kappa(sl, rl)))
        probe = DecoratedTree.from_droot(_relabel_preorder(act_root), U)
        if not is_cleaving_safe(probe):
            raise NotCleaving(f"step {l} leaves the cleaving locus", step=l)

    def colour(t):
        if isinstance(t, _Slot):
            return Leaf(s[t.lo])
        return DNode(colour(t.left), colour(t.right), t.plane)

    return CleavageElement(DecoratedTree.from_droot(colour(act_root), U))


# ---------------------------------------------------------------- D_k


@dataclass(frozen=True)
class DkVerdict:
    member: bool
    reason: str = ""
    step: int | None = None

    def __bool__(self) -> bool:
        return self.member


def hemisphere_for(G: FullGraph, iota: IString, l: int) -> tuple[int, str]:
    a, b = iota.lost(l), iota.lost(l - 1)
    lo, hi = min(a, b), max(a, b)
    return G.label(lo, hi), "+" if G.points(lo, hi) else "-"


def base_pairs(G: FullGraph, iota: IString, offsets) -> list[tuple[np.ndarray, float]]:
    """The first-axis parameters that each hemisphere pins down: (w e1, w x_j)."""
    n = len(offsets)
    out = []
    for l in range(1, n + 1):
        _, sg = hemisphere_for(G, iota, l)
        w = 1.0 if sg == "+" else -1.0
        out.append((w, offsets[iota.lost(l) - 1]))
    return out


def dk_member(G: FullGraph, U: SphereRegion, sigma, iota: IString, pairs, samples: int = 64,
              offsets=None) -> DkVerdict:
    """Membership in the hemisphere-restricted image of Theta, path component by a sampled line.

    (a) s_l lies in the hemisphere of the pair (j_{iota_l}, j_{iota_{l-1}});
    (b) Theta succeeds; (c) the straight path in parameter space to the first-axis
    configuration stays in the image of Theta at each of `samples` points. (c) can
    reject members whose connecting path bends; it never accepts a blocked line.
    """
    k = len(sigma)
    xs = list(offsets) if offsets is not None else base_offsets(U, k)
    for l in range(1, k):
        lam, sg = hemisphere_for(G, iota, l)
        if lam > U.n or not hemisphere_member(pairs[l - 1][0], lam, sg):
            return DkVerdict(False, "Hemisphere", l)
    try:
        theta(U, sigma, iota, pairs, xs)
    except NotCleaving as exc:
        return DkVerdict(False, "NotCleaving", exc.step)
    except NonGeneric:
        return DkVerdict(False, "NonGeneric")
    e1 = np.array(_e1(U.n))
    target = base_pairs(G, iota, xs)
    start = [(np.asarray(s, dtype=float), float(r)) for s, r in pairs]
    for q in range(1, samples + 1):
        t = q / samples
        cur = []
        for (s0, r0), (w, x) in zip(start, target):
            s = _unit((1 - t) * s0 + t * w * e1)
            if s is None:
                return DkVerdict(False, "PathBlocked")
            cur.append((s, (1 - t) * r0 + t * w * x))
        try:
            theta(U, sigma, iota, cur, xs)
        except (NotCleaving, NonGeneric):
            return DkVerdict(False, "PathBlocked", q)
    return DkVerdict(True, "")
