"""Full level graphs: complete graphs with labelled, oriented edges."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

from .errors import BadIndex, BadLabels, BudgetExceeded, CyclicOrientation, DimMismatch, MultipleSinks
from .trees import check_perm


@lru_cache(maxsize=None)
def _pairs(k: int) -> tuple:
    return tuple(itertools.combinations(range(1, k + 1), 2))


@dataclass(frozen=True)
class FullGraph:
    """Labels and orientations are keyed by pairs (i, j) with i < j.

    orient[(i, j)] is +1 for an edge i -> j and -1 for j -> i.
    """
    n: int
    k: int
    labels: tuple[tuple[tuple[int, int], int], ...]
    orient: tuple[tuple[tuple[int, int], int], ...]

    def __post_init__(self):
        keys = _pairs(self.k)
        if tuple(p for p, _ in self.labels) != keys or tuple(p for p, _ in self.orient) != keys:
            raise BadLabels("labels and orientations must cover every pair exactly once")
        for _, l in self.labels:
            if not 0 <= l < self.n:
                raise BadLabels(f"label {l} outside 0..{self.n - 1}")
        for _, o in self.orient:
            if o not in (1, -1):
                raise BadLabels(f"orientation {o} is not +1 or -1")

    @classmethod
    def make(cls, n: int, k: int, labels: dict, orient: dict) -> "FullGraph":
        keys = _pairs(k)
        if set(labels) != set(keys) or set(orient) != set(keys):
            raise BadLabels("labels and orientations must cover every pair exactly once")
        return cls(n, k, tuple((p, int(labels[p])) for p in keys), tuple((p, int(orient[p])) for p in keys))

    @cached_property
    def _label_map(self) -> dict:
        return dict(self.labels)

    @cached_property
    def _orient_map(self) -> dict:
        return dict(self.orient)

    def label(self, i: int, j: int) -> int:
        return self._label_map[(min(i, j), max(i, j))]

    def points(self, i: int, j: int) -> bool:
        """True iff the edge between i and j is oriented i -> j."""
        o = self._orient_map[(min(i, j), max(i, j))]
        return (o == 1) == (i < j)

    def to_json(self) -> dict:
        return {"n": self.n, "k": self.k,
                "edges": [{"i": i, "j": j, "label": l, "dir": "ij" if o == 1 else "ji"}
                          for ((i, j), l), (_, o) in zip(self.labels, self.orient)]}

    @classmethod
    def from_json(cls, d: dict) -> "FullGraph":
        labels, orient = {}, {}
        for e in d["edges"]:
            p = (int(e["i"]), int(e["j"]))
            if p[0] > p[1]:
                p = (p[1], p[0])
                e = dict(e, dir={"ij": "ji", "ji": "ij"}[e["dir"]])
            labels[p] = e["label"]
            orient[p] = 1 if e["dir"] == "ij" else -1
        return cls.make(int(d["n"]), int(d["k"]), labels, orient)


def from_permutation(n: int, labels: dict, sigma) -> FullGraph:
    s = check_perm(sigma, len(sigma))
    k = len(s)
    orient = {(i, j): 1 if s[i - 1] < s[j - 1] else -1 for i, j in _pairs(k)}
    return FullGraph.make(n, k, labels, orient)


def to_permutation(G: FullGraph) -> tuple[int, ...]:
    """Repeatedly remove the sink; the r-th sink removed gets value k + 1 - r."""
    alive = set(range(1, G.k + 1))
    sigma = [0] * G.k
    value = G.k
    while alive:
        sinks = [v for v in alive if not any(G.points(v, w) for w in alive if w != v)]
        if not sinks:
            raise CyclicOrientation("no sink among the remaining vertices")
        if len(sinks) > 1:
            raise MultipleSinks(f"sinks {sorted(sinks)}")
        sigma[sinks[0] - 1] = value
        value -= 1
        alive.remove(sinks[0])
    return tuple(sigma)


def unit_graph(n: int) -> FullGraph:
    return FullGraph(n, 1, (), ())


@lru_cache(maxsize=None)
def _compose_plan(k: int, i: int, m: int):
    """For each output pair: (taken from Gm?, index into that graph's pair list)."""
    def origin(v):
        if v < i:
            return False, v
        if v < i + m:
            return True, v - i + 1
        return False, v - m + 1

    idx_k = {p: t for t, p in enumerate(_pairs(k))}
    idx_m = {p: t for t, p in enumerate(_pairs(m))}
    plan = []
    for a, b in _pairs(k + m - 1):
        (ia, x), (ib, y) = origin(a), origin(b)
        if ia and ib:
            plan.append((True, idx_m[(x, y)]))
            continue
        x = i if ia else x
        y = i if ib else y
        # a < b, and the block keeps its place, so x < y as well
        plan.append((False, idx_k[(x, y)]))
    return tuple(plan)


def compose_i(Gk: FullGraph, i: int, Gm: FullGraph) -> FullGraph:
    """Replace vertex i by the block Gm; edges leaving the block copy the edge at i."""
    if Gk.n != Gm.n:
        raise DimMismatch(f"label bounds {Gk.n} and {Gm.n} differ")
    if not 1 <= i <= Gk.k:
        raise BadIndex(f"vertex {i} not in 1..{Gk.k}")
    m = Gm.k
    k = Gk.k + m - 1
    keys = _pairs(k)
    plan = _compose_plan(Gk.k, i, m)
    labels = tuple((p, (Gm if fromm else Gk).labels[t][1]) for p, (fromm, t) in zip(keys, plan))
    orient = tuple((p, (Gm if fromm else Gk).orient[t][1]) for p, (fromm, t) in zip(keys, plan))
    return FullGraph(Gk.n, k, labels, orient)


def leq(G: FullGraph, H: FullGraph) -> bool:
    if G.n != H.n or G.k != H.k:
        raise DimMismatch("graphs live in different K^n(k)")
    for ((p, l), (_, o)), ((_, l2), (_, o2)) in zip(zip(G.labels, G.orient), zip(H.labels, H.orient)):
        if not ((l == l2 and o == o2) or l < l2):
            return False
    return True


def degree(G: FullGraph) -> int:
    return sum(l for _, l in G.labels)


def gamma_ij(G: FullGraph, i: int, j: int) -> FullGraph:
    if not 1 <= i < j <= G.k:
        raise BadIndex(f"need 1 <= i < j <= {G.k}, got {i}, {j}")
    return FullGraph.make(G.n, 2, {(1, 2): G.label(i, j)}, {(1, 2): 1 if G.points(i, j) else -1})


def count(n: int, k: int) -> int:
    return n ** math.comb(k, 2) * math.factorial(k)


def enumerate_graphs(n: int, k: int, budget: int = 1_000_000) -> list[FullGraph]:
    total = count(n, k)
    if total > budget:
        raise BudgetExceeded(f"|K^{n}({k})| = {total} exceeds budget {budget}")
    keys = _pairs(k)
    out = []
    for labs in itertools.product(range(n), repeat=len(keys)):
        lab = dict(zip(keys, labs))
        for sigma in itertools.permutations(range(1, k + 1)):
            out.append(from_permutation(n, lab, sigma))
    return out
