import itertools
import math

import numpy as np
import pytest

from cleave import fullgraph as fg
from cleave.blueprint import blueprint_components
from cleave.cleaving import DecoratedTree, is_cleaving
from cleave.errors import EmptyInterval, NotCleaving
from cleave.estructure import (IString, base_config, base_offsets, cleaving_interval, dk_member, istrings,
                               theta)
from cleave.geometry import kappa, make_hyperplane
from cleave.operad import c_rewrite, chop_equivalent
from cleave.regions import Constraint, SphereRegion, regions_equal
from cleave.trees import left_blown

from conftest import unit

S1 = SphereRegion.full(1)
S2 = SphereRegion.full(2)


def cap(normal, offset, n=2):
    return SphereRegion(n, (Constraint(make_hyperplane(normal, offset), 1),))


def test_istrings():
    for k in (2, 3, 4, 5):
        groups = istrings(k)
        flat = [s for g in groups.values() for s in g]
        assert len(flat) == math.factorial(k - 1)
        assert sorted(groups) == list(range(1, k))
        assert all(len(g) == math.factorial(k - 2) for g in groups.values())
        assert {s.sequence for s in flat} == set(itertools.permutations(range(1, k)))
    s = IString(4, (2, 3, 1))
    assert s.terminal == 1 and s.lost(0) == 4 and s.lost(2) == 3
    assert s.domains() == [frozenset({1, 2, 3}), frozenset({1, 3}), frozenset({1})]


def test_interval_examples():
    assert cleaving_interval(S2) == pytest.approx((-1, 1))
    assert cleaving_interval(cap((1, 0, 0), 0)) == pytest.approx((0, 1), abs=1e-9)
    with pytest.raises(EmptyInterval):
        cleaving_interval(cap((1, 0, 0), 1.5))


def test_interval_of_tilted_cap_against_scan():
    U = cap(unit((1, 1, 0.3)), 0.2)
    lo, hi = cleaving_interval(U)
    grid = np.linspace(-0.999, 0.999, 400)
    ok = [c for c in grid if is_cleaving(DecoratedTree(left_blown(2), (make_hyperplane((1, 0, 0), c),), U))]
    step = grid[1] - grid[0]
    assert lo == pytest.approx(min(ok), abs=step)
    assert hi == pytest.approx(max(ok), abs=step + 1e-3)
    # lowest first coordinate on the cap {<nu, x> >= p}: nu1 p - sqrt(1 - nu1^2) sqrt(1 - p^2)
    nu1 = unit((1, 1, 0.3))[0]
    assert lo == pytest.approx(nu1 * 0.2 - math.sqrt(1 - nu1 ** 2) * math.sqrt(1 - 0.04), abs=1e-6)
    assert hi == pytest.approx(1.0, abs=1e-9)


def test_base_config_examples():
    a = base_config((1, 2), S1)
    assert a.decorations[0] == make_hyperplane((1, 0), 0)
    # slab 1 is the lower one
    assert regions_equal(a.timber[0], SphereRegion(1, (Constraint(make_hyperplane((1, 0), 0), -1),)))
    b = base_config((2, 1), S1)
    assert not chop_equivalent(b, c_rewrite(a, 1))
    assert regions_equal(b.timber[0], a.timber[1]) and regions_equal(b.timber[1], a.timber[0])
    c = base_config((1, 2, 3, 4), S2)
    assert [P.offset for P in sorted(c.decorations, key=lambda P: P.offset)] == pytest.approx([-0.5, 0, 0.5])
    assert blueprint_components(c) == 3


def test_theta_parallel_matches_base():
    for k in (2, 3, 4):
        for U in (S1, S2, cap(unit((1, 0.4, 0.2)), -0.1)):
            xs = base_offsets(U, k)
            for s in itertools.permutations(range(1, k + 1)):
                for io in (x for g in istrings(k).values() for x in g):
                    pairs = [(np.eye(U.n + 1)[0], xs[j - 1]) for j in io.sequence]
                    assert chop_equivalent(theta(U, s, io, pairs), base_config(s, U))


def test_theta_two_ary():
    s1, r1 = unit((0.3, -1.0, 0.2)), 0.1
    a = theta(S2, (1, 2), IString(2, (1,)), [(s1, r1)])
    assert a.decorations[0] == kappa(s1, r1)
    with pytest.raises(NotCleaving):
        theta(S2, (1, 2), IString(2, (1,)), [(s1, 1.2)])


def test_theta_tilted_step_two_fails():
    pairs = [(np.array([1.0, 0.0]), -1 / 3), (np.array([-1.0, 0.0]), 0.5)]
    with pytest.raises(NotCleaving) as info:
        theta(S1, (1, 2, 3), IString(3, (1, 2)), pairs)
    assert info.value.step == 2


def _graph(labels, sigma=(1, 2, 3)):
    return fg.from_permutation(2, dict(zip(((1, 2), (1, 3), (2, 3)), labels)), sigma)


def test_dk_member_examples():
    G = _graph((1, 1, 1))
    io = IString(3, (1, 2))
    e1 = np.array([1.0, 0.0])
    assert dk_member(G, S1, (1, 2, 3), io, [(e1, -1 / 3), (e1, 1 / 3)])
    Z = _graph((0, 0, 0))
    v = dk_member(Z, S1, (1, 2, 3), io, [(unit((0.2, 1)), -1 / 3), (e1, 1 / 3)])
    assert not v and v.reason == "Hemisphere" and v.step == 1


def test_dk_member_blocked_path():
    G = _graph((1, 1, 1))
    pairs = [(unit((0.3015, 0.9535)), 0.7967), (unit((-0.9897, 0.1433)), -0.5129)]
    theta(S1, (1, 2, 3), IString(3, (1, 2)), pairs)
    v = dk_member(G, S1, (1, 2, 3), IString(3, (1, 2)), pairs)
    assert not v and v.reason == "PathBlocked"


def test_zero_labels_admit_only_first_axis():
    Z = _graph((0, 0, 0))
    io = IString(3, (2, 1))
    xs = base_offsets(S2, 3)
    rng = np.random.default_rng(1)
    e1 = np.eye(3)[0]
    for _ in range(20):
        s = unit(rng.normal(size=3))
        v = dk_member(Z, S2, (1, 2, 3), io, [(s, xs[1]), (e1, xs[0])])
        assert not v and v.reason == "Hemisphere"
    assert dk_member(Z, S2, (1, 2, 3), io, [(e1, xs[1]), (e1, xs[0])])
    # with label 0 the hemisphere is a single pole, picked by the edge orientation
    assert dk_member(Z, S2, (1, 2, 3), io, [(-e1, -xs[1]), (e1, xs[0])]).reason == "Hemisphere"
    flipped = fg.FullGraph.make(2, 3, dict(Z.labels), {(1, 2): 1, (1, 3): 1, (2, 3): -1})
    assert dk_member(flipped, S2, (1, 2, 3), io, [(-e1, -xs[1]), (e1, xs[0])]).reason != "Hemisphere"
