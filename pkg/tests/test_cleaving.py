import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cleave.cleaving import (DecoratedTree, assign_timber, cleaving_interval_of, cleaving_report,
                             expand_homotopy, gamma_epsilon, in_ob_cleave, is_cleaving, leaf_timber)
from cleave.errors import NotCleaving
from cleave.geometry import make_hyperplane
from cleave.regions import (Constraint, SphereRegion, engine_for, region_components, region_mask,
                            regions_equal)
from cleave.sampling import random_element, random_region
from cleave.trees import L1, BinaryTree, Leaf, Node, left_blown

from conftest import figure_element

S1 = SphereRegion.full(1)
S2 = SphereRegion.full(2)


def half(n, normal, offset, sign):
    return SphereRegion(n, (Constraint(make_hyperplane(normal, offset), sign),))


def test_unit_tree_timber():
    U = half(2, (1, 0, 0), 0.2, 1)
    d = DecoratedTree(L1, (), U)
    assert assign_timber(d).leaf_list() == [U]
    assert leaf_timber(d) == [U]


def test_two_leaf_timber_on_circle():
    d = DecoratedTree(left_blown(2), (make_hyperplane((1, 0), 0),), S1)
    right, left = leaf_timber(d)
    assert regions_equal(right, half(1, (1, 0), 0, 1))
    assert regions_equal(left, half(1, (1, 0), 0, -1))


def test_is_cleaving_examples():
    assert is_cleaving(DecoratedTree(left_blown(2), (make_hyperplane((1, 0), 0),), S1))
    assert not is_cleaving(DecoratedTree(left_blown(2), (make_hyperplane((1, 0), 1.5),), S1))
    with pytest.raises(NotCleaving):
        leaf_timber(DecoratedTree(left_blown(2), (make_hyperplane((1, 0), 1.5),), S1))


def test_second_plane_must_cut_its_own_timber():
    # the second plane sits at x = 0.5 and so cuts S^2, but only the x > 0 half
    t = BinaryTree(Node(Node(Leaf(1), Leaf(2)), Leaf(3)))
    d = DecoratedTree(t, (make_hyperplane((1, 0, 0), 0), make_hyperplane((1, 0, 0), 0.5)), S2)
    assert cleaving_report(d) == 2
    t2 = BinaryTree(Node(Leaf(1), Node(Leaf(2), Leaf(3))))
    assert is_cleaving(DecoratedTree(t2, d.decorations, S2))


def _partition_signature(d):
    eng = engine_for(d.n, d.planes())
    return tuple(tuple(np.flatnonzero(region_mask(eng, R))) for R in leaf_timber(d))


def test_same_planes_on_three_trees_give_three_timberings():
    a = figure_element()
    P = a.decorations
    shapes = [
        BinaryTree(Node(Node(Leaf(1), Leaf(2)), Node(Leaf(3), Leaf(4)))),
        BinaryTree(Node(Node(Node(Leaf(1), Leaf(2)), Leaf(3)), Leaf(4))),
        BinaryTree(Node(Leaf(1), Node(Leaf(2), Node(Leaf(3), Leaf(4))))),
    ]
    sigs = set()
    for T in shapes:
        d = DecoratedTree(T, P, S2)
        if is_cleaving(d):
            sigs.add(frozenset(_partition_signature(d)))
    tilted = DecoratedTree(shapes[1], (P[0], P[2], P[1]), S2)
    if is_cleaving(tilted):
        sigs.add(frozenset(_partition_signature(tilted)))
    assert len(sigs) >= 3


def test_figure_timber_combinatorics():
    a = figure_element()
    counts = [region_components(R)[0] for R in a.timber]
    assert counts == [1, 1, 1, 1]


def test_ob_examples():
    assert in_ob_cleave(half(2, (0.3, 0.4, 0.2), 0.1, 1))
    band = SphereRegion(2, (Constraint(make_hyperplane((1, 0, 0), -0.3), 1),
                            Constraint(make_hyperplane((1, 0, 0), 0.3), -1)))
    assert in_ob_cleave(band)
    tube = SphereRegion(2, tuple(Constraint(make_hyperplane(v, s * 0.3), -s)
                                 for v in ((0, 1, 0), (0, 0, 1)) for s in (1, -1)))
    assert region_components(tube)[0] == 2
    assert not in_ob_cleave(tube)


def test_expand_homotopy_endpoints():
    U = SphereRegion(2, (Constraint(make_hyperplane((1, 0, 0), 0.4), 1),
                         Constraint(make_hyperplane((0, 1, 0), -0.2), -1)))
    assert expand_homotopy(U, 0.0) == U
    assert expand_homotopy(U, 1.0).is_full
    with pytest.raises(ValueError):
        expand_homotopy(U, 1.5)


def _complement_count(V):
    if V.is_full:
        return 0
    eng = engine_for(V.n, V.planes())
    return eng.components(~region_mask(eng, V))[0]


def _caps_disjoint(U):
    # complement caps {sign * <nu, x> <= sign * p} are disjoint iff their angular radii fit between the poles
    cs = U.constraints
    for a in range(len(cs)):
        for b in range(a + 1, len(cs)):
            ra = np.arccos(np.clip(cs[a].sign * cs[a].plane.offset, -1, 1))
            rb = np.arccos(np.clip(cs[b].sign * cs[b].plane.offset, -1, 1))
            ang = np.arccos(np.clip(-cs[a].sign * cs[a].plane.nu @ (-cs[b].sign * cs[b].plane.nu), -1, 1))
            if ang <= ra + rb:
                return False
    return True


def _inside(R, pts):
    m = np.ones(len(pts), dtype=bool)
    for c in R.constraints:
        m &= c.sign * (pts @ c.plane.nu - c.plane.offset) > 0
    return m


def test_expand_homotopy_regions_grow():
    rng = np.random.default_rng(4)
    pts = rng.normal(size=(4000, 3))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    for _ in range(10):
        U = random_region(2, rng, max_planes=3)
        prev = _inside(U, pts)
        for t in np.linspace(0, 1, 21)[1:]:
            cur = _inside(expand_homotopy(U, float(t)), pts)
            assert np.all(cur[prev])
            prev = cur
        assert prev.all()


def test_expand_homotopy_complement_count_monotone_for_disjoint_caps():
    rng = np.random.default_rng(5)
    tried = 0
    while tried < 5:
        U = random_region(2, rng, max_planes=3)
        if not _caps_disjoint(U):
            continue
        tried += 1
        counts = [_complement_count(expand_homotopy(U, float(t))) for t in np.linspace(0, 1, 101)]
        assert all(b <= a for a, b in zip(counts, counts[1:]))


def test_expand_homotopy_can_split_overlapping_caps():
    # the two complement caps overlap at t = 0 and separate as they shrink
    U = SphereRegion(2, (Constraint(make_hyperplane((1, 0, 0), 0.4), 1),
                         Constraint(make_hyperplane((0, 1, 0), -0.2), -1)))
    assert _complement_count(expand_homotopy(U, 0.0)) == 1
    assert _complement_count(expand_homotopy(U, 0.9)) == 2
    assert _complement_count(expand_homotopy(U, 1.0)) == 0


def test_gamma_epsilon_pulls_toward_centre():
    d = DecoratedTree(left_blown(2), (make_hyperplane((1, 0), 0.95),), S1)
    jm, jp = cleaving_interval_of(d, 1)
    assert jm == pytest.approx(-1.95, abs=1e-5) and jp == pytest.approx(0.05, abs=1e-5)
    out, ok = gamma_epsilon(d, 0.2)
    assert ok
    assert out.decorations[0].offset == pytest.approx(0.95 - 0.15, abs=1e-5)


def test_gamma_epsilon_fixes_centred_and_wide_margins():
    d = DecoratedTree(left_blown(2), (make_hyperplane((1, 0), 0.0),), S1)
    out, ok = gamma_epsilon(d, 0.5)
    assert ok and out == d
    out, _ = gamma_epsilon(figure_element().rep, 0.05)
    assert out == figure_element().rep


@settings(max_examples=25)
@given(st.integers(0, 2**32 - 1), st.integers(1, 2), st.integers(2, 4))
def test_leaf_timber_partitions_input(seed, n, k):
    rng = np.random.default_rng(seed)
    a = random_element(n, k, rng)
    eng = engine_for(n, a.rep.planes())
    on_cut = np.zeros(eng.size, dtype=bool)
    for P in a.decorations:
        on_cut |= eng.plane_signs(P) == 0
    inside = region_mask(eng, a.input)
    hits = sum(region_mask(eng, R).astype(int) for R in a.timber)
    assert np.all(hits[inside & ~on_cut] == 1)
    assert np.all(hits[~inside] == 0)
    assert hits.max() <= 1
    assert all(region_mask(eng, R).any() for R in a.timber)


@settings(max_examples=25)
@given(st.integers(0, 2**32 - 1), st.integers(1, 2), st.integers(2, 4))
def test_connected_leaves_of_ob_input_stay_in_ob(seed, n, k):
    rng = np.random.default_rng(seed)
    U = random_region(n, rng, max_planes=2)
    a = random_element(n, k, rng, U=U, require_ob=False)
    for R in a.timber:
        if region_components(R)[0] == 1:
            assert in_ob_cleave(R)
