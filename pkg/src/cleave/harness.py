"""Seeded verification suites: each trial either passes or yields a JSON reproducer."""
from __future__ import annotations

import itertools
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import blueprint as bp
from . import fullgraph as fg
from .cleaving import DecoratedTree, DNode, is_cleaving_safe
from .errors import CleaveError, ExhaustedRetries, NonGeneric, NotCleaving
from .estructure import IString, base_config, cleaving_interval, theta
from .geometry import OrientedHyperplane, random_rotation
from .mesh import feature_size
from .operad import (CleavageElement, b_rewrite, c_rewrite, chop_equivalent, compose_i,
                     normalize_parallel, same_representative, sigma_action, unit)
from .regions import Constraint, SphereRegion, engine_for, region_mask
from .sampling import SampleStats, random_element, random_permutation, random_plane, random_region
from .semidirect import (SemidirectElement, ev_twisted, group_act, sd_compose_i, sd_equal, sd_unit)
from .trees import Leaf, equivariance_perm

SUITES = ("operad-laws", "rewrites", "codim", "fullgraph", "theta", "semidirect", "oracle-s1")
LAWS = {"operad-laws": ("assoc-seq", "assoc-par", "unit", "equivariance"),
        "rewrites": ("c", "b", "normalize"),
        "semidirect": ("assoc-seq", "assoc-par", "unit", "action")}


@dataclass
class RunConfig:
    n: tuple[int, ...] = (1, 2)
    k: tuple[int, ...] = (2, 3, 4, 5)
    trials: int = 100
    seed: int = 0
    mesh_level: int = 6
    eps: float = 1e-9
    workers: int = 1
    mutate: bool = False
    shrink: bool = True
    law: str | None = None      # pin one law of a multi-law suite

    def __post_init__(self):
        if self.trials < 1 or self.mesh_level < 0 or self.eps <= 0 or self.workers < 1:
            raise ValueError("trials, workers and eps must be positive, mesh level non-negative")
        if not self.n or not self.k or min(self.n) < 1 or max(self.n) > 2 or min(self.k) < 1:
            raise ValueError("n must be drawn from {1, 2} and k from positive integers")
        if self.law is not None and not any(self.law in v for v in LAWS.values()):
            raise ValueError(f"unknown law {self.law!r}")

    def to_json(self) -> dict:
        return asdict(self)


@dataclass
class Report:
    suite: str
    trials: int
    failures: list = field(default_factory=list)
    skipped: int = 0
    stats: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {"suite": self.suite, "trials": self.trials, "failures": self.failures,
                "skipped": self.skipped, "stats": self.stats}


class Skip(Exception):
    """The trial could not be set up (e.g. no composable partner found)."""


# ---------------------------------------------------------------- helpers


def _elem(n, k, rng, U=None, stats=None):
    try:
        return random_element(n, k, rng, U=U, budget=10_000, stats=stats)
    except ExhaustedRetries as exc:
        raise Skip(str(exc)) from exc


def _choose(rng, xs):
    return xs[int(rng.integers(len(xs)))]


def _axis_neighbour(P: OrientedHyperplane) -> OrientedHyperplane:
    nu = P.nu
    a = int(np.argmax(np.abs(nu)))
    normal = tuple(float(np.sign(nu[a])) if c == a else 0.0 for c in range(len(nu)))
    return OrientedHyperplane(normal, P.offset)


def shrink_element(a: CleavageElement, still_fails) -> CleavageElement:
    """Snap decorations to their axis-aligned neighbours while the failure persists."""
    cur = a
    for v in range(1, a.arity):
        cand = cur.rep.with_decoration(v, _axis_neighbour(cur.decorations[v - 1]))
        try:
            if not is_cleaving_safe(cand):
                continue
            b = CleavageElement(cand)
            if still_fails(b):
                cur = b
        except CleaveError:
            continue
    return cur


# ---------------------------------------------------------------- suites


def _operad_trial(cfg: RunConfig, rng, st: SampleStats) -> dict | None:
    n = _choose(rng, cfg.n)
    law = cfg.law or _choose(rng, LAWS["operad-laws"])
    if cfg.mutate:
        law = "equivariance"
    if law == "assoc-seq":
        k, m, p = (int(x) for x in rng.integers(1, 4, 3))
        if k + m + p - 2 > 6:
            p = max(1, 6 - k - m + 2)
        f = _elem(n, k, rng, stats=st)
        i = int(rng.integers(1, k + 1))
        g = _elem(n, m, rng, f.timber[i - 1], st)
        j = int(rng.integers(1, m + 1))
        h = _elem(n, p, rng, g.timber[j - 1], st)
        lhs = compose_i(compose_i(f, i, g), i + j - 1, h)
        rhs = compose_i(f, i, compose_i(g, j, h))
        ok = chop_equivalent(lhs, rhs)
        data = {"f": f.to_json(), "g": g.to_json(), "h": h.to_json(), "i": i, "j": j}
    elif law == "assoc-par":
        k = int(rng.integers(2, 5))
        m, p = (int(x) for x in rng.integers(1, 3, 2))
        f = _elem(n, k, rng, stats=st)
        i, j = sorted(int(x) for x in rng.choice(np.arange(1, k + 1), 2, replace=False))
        g = _elem(n, m, rng, f.timber[i - 1], st)
        h = _elem(n, p, rng, f.timber[j - 1], st)
        lhs = compose_i(compose_i(f, i, g), j + m - 1, h)
        rhs = compose_i(compose_i(f, j, h), i, g)
        ok = chop_equivalent(lhs, rhs)
        data = {"f": f.to_json(), "g": g.to_json(), "h": h.to_json(), "i": i, "j": j}
    elif law == "unit":
        k = int(rng.integers(1, 6))
        f = _elem(n, k, rng, stats=st)
        i = int(rng.integers(1, k + 1))
        ok = (chop_equivalent(compose_i(unit(f.input), 1, f), f)
              and chop_equivalent(compose_i(f, i, unit(f.timber[i - 1])), f))
        data = {"f": f.to_json(), "i": i}
    else:
        k = int(rng.integers(1, 4))
        m = int(rng.integers(1, 7 - k))
        f = _elem(n, k, rng, stats=st)
        i = int(rng.integers(1, k + 1))
        g = _elem(n, m, rng, f.timber[i - 1], st)
        sigma, pi = random_permutation(k, rng), random_permutation(m, rng)
        lhs = compose_i(sigma_action(sigma, f), sigma[i - 1], sigma_action(pi, g))
        tau = equivariance_perm(sigma, pi, i, m)
        if cfg.mutate:
            tau = tau[::-1]
        rhs = sigma_action(tau, compose_i(f, i, g))
        ok = chop_equivalent(lhs, rhs)
        data = {"f": f.to_json(), "g": g.to_json(), "i": i, "sigma": sigma, "pi": pi}
    if ok:
        return None
    return {"law": law, "n": n, **data}


def _parent_child_pairs(a: CleavageElement):
    """(vertex, side) for every internal vertex with an internal child."""
    out = []
    c = [0]

    def go(t):
        if isinstance(t, Leaf):
            return
        c[0] += 1
        v = c[0]
        if isinstance(t.left, DNode):
            out.append((v, "left"))
        if isinstance(t.right, DNode):
            out.append((v, "right"))
        go(t.left)
        go(t.right)

    go(a.rep.droot())
    return out


def _child_index(a: CleavageElement, v: int, side: str) -> int:
    """Preorder index of the given child of vertex v."""
    c = [0]
    found = [None]

    def go(t, want):
        if isinstance(t, Leaf):
            return
        c[0] += 1
        me = c[0]
        if want:
            found[0] = me
        go(t.left, me == v and side == "left")
        go(t.right, me == v and side == "right")

    go(a.rep.droot(), False)
    return found[0]


def _b_instance(n, k, rng, st, budget=2000):
    for _ in range(budget):
        a = _elem(n, k, rng, stats=st)
        pairs = _parent_child_pairs(a)
        if not pairs:
            continue
        v, side = _choose(rng, pairs)
        w = _child_index(a, v, side)
        P = a.decorations[v - 1]
        Q = OrientedHyperplane(tuple(-c for c in P.normal), float(rng.uniform(-1, 1)))
        d = a.rep.with_decoration(w, Q)
        if is_cleaving_safe(d):
            return CleavageElement(d), v, side
    raise Skip("no antipodally parallel instance")


def _parallel_instance(n, k, rng, budget=5000):
    e = np.zeros(n + 1)
    e[0] = 1.0
    U = SphereRegion.full(n)
    from .sampling import random_shape
    for _ in range(budget):
        shape = random_shape(k, rng)
        labels = iter(int(x) for x in rng.permutation(k) + 1)

        def build(sh):
            if isinstance(sh, Leaf):
                return Leaf(next(labels))
            s = 1.0 if rng.random() < 0.5 else -1.0
            return DNode(build(sh[0]), build(sh[1]),
                         OrientedHyperplane(tuple(s * e), float(rng.uniform(-0.95, 0.95))))

        try:
            d = DecoratedTree.from_droot(build(shape), U)
        except NonGeneric:
            continue
        if is_cleaving_safe(d):
            return CleavageElement(d)
    raise Skip("no parallel instance")


def _buggy_c_rewrite(a, v):
    from .operad import _vertex_map
    root = _vertex_map(a.rep.droot(), lambda t: DNode(t.right, t.left, t.plane), v)
    d = DecoratedTree.from_droot(root, a.input)
    return CleavageElement(d) if is_cleaving_safe(d) else a.__class__(a.rep)


def _rewrites_trial(cfg, rng, st) -> dict | None:
    n = _choose(rng, cfg.n)
    kind = cfg.law or _choose(rng, LAWS["rewrites"])
    ks = [k for k in cfg.k if k >= (3 if kind == "b" else 2)] or [3]
    k = _choose(rng, ks)
    if kind == "c":
        a = _elem(n, k, rng, stats=st)
        v = int(rng.integers(1, k))
        rw = _buggy_c_rewrite if cfg.mutate else c_rewrite

        def fails(x):
            return not chop_equivalent(rw(x, v), x)
        if not fails(a):
            return None
        if cfg.shrink:
            a = shrink_element(a, fails)
        return {"rewrite": "c", "n": n, "v": v, "element": a.to_json()}
    if kind == "b":
        a, v, side = _b_instance(n, k, rng, st)
        b = b_rewrite(a, v, side)
        if chop_equivalent(a, b):
            return None
        return {"rewrite": "b", "n": n, "v": v, "child": side, "element": a.to_json()}
    a = _parallel_instance(n, k, rng)
    na = normalize_parallel(a)
    nna = normalize_parallel(na)
    v = int(rng.integers(1, k))
    nb = normalize_parallel(c_rewrite(a, v))
    ok = (chop_equivalent(na, a) and same_representative(nna, na, 1e-12)
          and same_representative(nb, na, 1e-12))
    if ok:
        return None
    return {"rewrite": "normalize", "n": n, "v": v, "element": a.to_json()}


def _codim_trial(cfg, rng, st) -> dict | None:
    n = _choose(rng, cfg.n)
    k = _choose(rng, cfg.k)
    a = _elem(n, k, rng, stats=st)
    expect = k if cfg.mutate else k - 1

    def fails(x):
        return bp.codim_invariant(x) != expect
    if not fails(a):
        return None
    if cfg.shrink:
        a = shrink_element(a, fails)
    return {"n": n, "k": k, "complement": bp.complement_components(a),
            "blueprint": bp.blueprint_components(a), "element": a.to_json()}


def _theta_trial(cfg, rng, st) -> dict | None:
    n = _choose(rng, cfg.n)
    k = _choose(rng, [k for k in cfg.k if 2 <= k <= 4] or [3])
    if rng.random() < 0.5:
        U = SphereRegion.full(n)
    else:
        try:
            U = random_region(n, rng)
        except ExhaustedRetries as exc:
            raise Skip(str(exc)) from exc
    lo, hi = cleaving_interval(U)
    xs = sorted(float(x) for x in rng.uniform(lo, hi, k - 1))
    if min(np.diff([lo] + xs + [hi])) < 1e-3:
        raise Skip("offsets too close")
    sigma = random_permutation(k, rng)
    iota = IString(k, random_permutation(k - 1, rng))
    e1 = np.zeros(n + 1)
    e1[0] = 1.0
    pairs = [(e1, xs[j - 1]) for j in iota.sequence]
    try:
        ref_sigma = sigma[::-1] if cfg.mutate else sigma
        ok = chop_equivalent(theta(U, sigma, iota, pairs, xs), base_config(ref_sigma, U, xs))
        err = ""
    except (NotCleaving, NonGeneric) as exc:
        ok, err = False, f"{type(exc).__name__}: {exc}"
    if ok:
        return None
    return {"n": n, "sigma": sigma, "iota": iota.sequence, "offsets": xs, "input": U.to_json(),
            "error": err}


def _rot(n, rng):
    return random_rotation(n + 1, rng)


def _sd(n, k, rng, st, U=None):
    a = _elem(n, k, rng, U=U, stats=st)
    return SemidirectElement(a, tuple(_rot(n, rng) for _ in range(k)))


def _semidirect_trial(cfg, rng, st) -> dict | None:
    n = _choose(rng, cfg.n)
    law = cfg.law or _choose(rng, LAWS["semidirect"])
    if cfg.mutate:
        law = "action"
    if law == "action":
        k = int(rng.integers(1, 4))
        f = _elem(n, k, rng, stats=st)
        i = int(rng.integers(1, k + 1))
        g = _elem(n, int(rng.integers(1, 4)), rng, f.timber[i - 1], st)
        rho = _rot(n, rng)
        lhs = group_act(rho, compose_i(f, i, g))
        rhs = compose_i(group_act(rho, f), i, group_act(rho, g))
        if cfg.mutate:
            rhs = group_act(rho, rhs)
        ok = chop_equivalent(lhs, rhs)
        data = {"f": f.to_json(), "g": g.to_json(), "i": i, "rho": rho.to_json()}
    elif law == "unit":
        k = int(rng.integers(1, 5))
        e = _sd(n, k, rng, st)
        i = int(rng.integers(1, k + 1))
        ok = (sd_equal(sd_compose_i(sd_unit(e.input), 1, e), e)
              and sd_equal(sd_compose_i(e, i, sd_unit(ev_twisted(e, i))), e))
        data = {"e": e.to_json(), "i": i}
    elif law == "assoc-seq":
        k, m, p = (int(x) for x in rng.integers(1, 3, 3))
        e = _sd(n, k, rng, st)
        i = int(rng.integers(1, k + 1))
        f = _sd(n, m, rng, st, ev_twisted(e, i))
        j = int(rng.integers(1, m + 1))
        h = _sd(n, p, rng, st, ev_twisted(f, j))
        lhs = sd_compose_i(sd_compose_i(e, i, f), i + j - 1, h)
        rhs = sd_compose_i(e, i, sd_compose_i(f, j, h))
        ok = sd_equal(lhs, rhs)
        data = {"e": e.to_json(), "f": f.to_json(), "h": h.to_json(), "i": i, "j": j}
    else:
        k = int(rng.integers(2, 4))
        m, p = (int(x) for x in rng.integers(1, 3, 2))
        e = _sd(n, k, rng, st)
        i, j = sorted(int(x) for x in rng.choice(np.arange(1, k + 1), 2, replace=False))
        f = _sd(n, m, rng, st, ev_twisted(e, i))
        h = _sd(n, p, rng, st, ev_twisted(e, j))
        lhs = sd_compose_i(sd_compose_i(e, i, f), j + m - 1, h)
        rhs = sd_compose_i(sd_compose_i(e, j, h), i, f)
        ok = sd_equal(lhs, rhs)
        data = {"e": e.to_json(), "f": f.to_json(), "h": h.to_json(), "i": i, "j": j}
    if ok:
        return None
    return {"law": law, "n": n, **data}


S1_MIN_FEATURE = 2e-3


def _oracle_trial(cfg, rng, st) -> dict | None:
    def system():
        m = int(rng.integers(1, 6))
        cons = tuple(Constraint(random_plane(1, rng), int(rng.choice([-1, 1])), bool(rng.random() < 0.3))
                     for _ in range(m))
        return SphereRegion(1, cons)

    R, S = system(), system()
    planes = R.planes() + S.planes()
    try:
        ex = engine_for(1, planes, "exact")
    except NonGeneric:
        raise Skip("degenerate")
    if feature_size(1, planes) < S1_MIN_FEATURE:
        raise Skip("below mesh resolution")
    me = engine_for(1, planes, "mesh")
    out = {}
    for name, eng in (("exact", ex), ("mesh", me)):
        mr, ms = region_mask(eng, R), region_mask(eng, S)
        out[name] = {"empty": [not mr.any(), not ms.any()],
                     "components": [eng.components(mr)[0], eng.components(ms)[0]],
                     "equal": bool(np.array_equal(mr, ms))}
    if cfg.mutate:
        out["mesh"]["components"][0] += 1
    if out["exact"] == out["mesh"]:
        return None
    return {"R": R.to_json(), "S": S.to_json(), **out}


_TRIALS = {"operad-laws": _operad_trial, "rewrites": _rewrites_trial, "codim": _codim_trial,
           "theta": _theta_trial, "semidirect": _semidirect_trial, "oracle-s1": _oracle_trial}


# ---------------------------------------------------------------- full graph suite


def fullgraph_checks(cases=((2, 3), (1, 4)), assoc_max: int = 5, mutate: bool = False) -> list[dict]:
    failures = []
    for n, k in cases:
        G = fg.enumerate_graphs(n, k)
        if len(G) != fg.count(n, k):
            failures.append({"check": "count", "n": n, "k": k, "got": len(G)})
        for g in G:
            s = fg.to_permutation(g)
            if fg.from_permutation(n, dict(g.labels), s) != g:
                failures.append({"check": "roundtrip", "graph": g.to_json()})
        for a in G:
            if not fg.leq(a, a):
                failures.append({"check": "reflexive", "graph": a.to_json()})
        for a, b in itertools.product(G, G):
            ab, ba = fg.leq(a, b), fg.leq(b, a)
            if mutate:
                ab = ab or fg.degree(a) > fg.degree(b)
            if ab and ba and a != b:
                failures.append({"check": "antisymmetric", "a": a.to_json(), "b": b.to_json()})
            if ab and a != b and fg.degree(a) >= fg.degree(b):
                failures.append({"check": "degree", "a": a.to_json(), "b": b.to_json()})
            if ab:
                for i, j in itertools.combinations(range(1, k + 1), 2):
                    if not fg.leq(fg.gamma_ij(a, i, j), fg.gamma_ij(b, i, j)):
                        failures.append({"check": "gamma", "a": a.to_json(), "b": b.to_json()})
        up = {g: [h for h in G if fg.leq(g, h)] for g in G}
        for a in G:
            for b in up[a]:
                for c in up[b]:
                    if not fg.leq(a, c):
                        failures.append({"check": "transitive", "a": a.to_json(), "c": c.to_json()})
        seen = {}
        for g in G:
            key = tuple(fg.gamma_ij(g, i, j) for i, j in itertools.combinations(range(1, k + 1), 2))
            if key in seen:
                failures.append({"check": "gamma-injective", "graph": g.to_json()})
            seen[key] = g
    failures += _fullgraph_composition(2, assoc_max)
    return failures


def _fullgraph_composition(n: int, total: int) -> list[dict]:
    out = []
    by_k = {k: fg.enumerate_graphs(n, k) for k in range(1, total)}
    u = fg.unit_graph(n)
    # units over every arity below the top one; the top arity only appears as f o 1 o 1
    for k in range(1, total):
        for g in by_k[k]:
            if fg.compose_i(u, 1, g) != g:
                out.append({"check": "left unit", "graph": g.to_json()})
            for i in range(1, k + 1):
                if fg.compose_i(g, i, u) != g:
                    out.append({"check": "right unit", "graph": g.to_json(), "i": i})
    sizes = [(k, m, p) for k, m, p in itertools.product(range(1, total), repeat=3)
             if k + m + p - 2 <= total]
    for k, m, p in sizes:
        for f, g, h in itertools.product(by_k[k], by_k[m], by_k[p]):
            for i in range(1, k + 1):
                fi = fg.compose_i(f, i, g)
                for j in range(1, m + 1):
                    if fg.compose_i(fi, i + j - 1, h) != fg.compose_i(f, i, fg.compose_i(g, j, h)):
                        out.append({"check": "assoc-seq", "f": f.to_json(), "g": g.to_json(),
                                    "h": h.to_json(), "i": i, "j": j})
                for j in range(i + 1, k + 1):
                    if fg.compose_i(fi, j + m - 1, h) != fg.compose_i(fg.compose_i(f, j, h), i, g):
                        out.append({"check": "assoc-par", "f": f.to_json(), "g": g.to_json(),
                                    "h": h.to_json(), "i": i, "j": j})
    return out


# ---------------------------------------------------------------- driver


def _run_chunk(args):
    suite, cfg, seeds = args
    from .regions import set_engine
    from . import tolerances
    prev_engine = set_engine("exact", cfg.mesh_level)
    prev_tol = tolerances.set_tolerances(side=cfg.eps)
    try:
        return _trials(suite, cfg, seeds)
    finally:
        set_engine(prev_engine["kind"], prev_engine["mesh_level"])
        tolerances.restore(prev_tol)


def _trials(suite, cfg, seeds):
    fn = _TRIALS[suite]
    st = SampleStats()
    fails, skipped = [], 0
    for idx, ss in seeds:
        rng = np.random.default_rng(ss)
        try:
            res = fn(cfg, rng, st)
        except Skip:
            skipped += 1
            continue
        except CleaveError as exc:
            res = {"error": f"{type(exc).__name__}: {exc}"}
        if res is not None:
            fails.append({"trial": idx, **res})
    return fails, skipped, st.to_json()


def verify(cfg: RunConfig, suite: str) -> Report:
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    if cfg.law is not None and cfg.law not in LAWS.get(suite, ()):
        raise ValueError(f"suite {suite} has no law {cfg.law!r}")
    t0 = time.perf_counter()
    if suite == "fullgraph":
        # one exhaustive run: every failure belongs to trial 0
        fails = [{"trial": 0, **f} for f in fullgraph_checks(mutate=cfg.mutate)]
        rep = Report(suite, 1, fails)
        rep.seconds = time.perf_counter() - t0
        return rep
    seeds = list(enumerate(np.random.SeedSequence(cfg.seed).spawn(cfg.trials)))
    w = cfg.workers
    chunks = [(suite, cfg, seeds[c::w]) for c in range(w)]
    if w == 1:
        results = [_run_chunk(chunks[0])]
    else:
        with ProcessPoolExecutor(max_workers=w) as pool:
            results = list(pool.map(_run_chunk, chunks))
    fails = sorted((f for r in results for f in r[0]), key=lambda f: f["trial"])
    stats = {"attempts": sum(r[2]["attempts"] for r in results),
             "accepted": sum(r[2]["accepted"] for r in results)}
    stats["rate"] = stats["accepted"] / stats["attempts"] if stats["attempts"] else 0.0
    rep = Report(suite, cfg.trials, fails, sum(r[1] for r in results), stats)
    rep.seconds = time.perf_counter() - t0
    return rep
