import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cleave.errors import NonGeneric
from cleave.geometry import kappa, make_hyperplane, reverse
from cleave.mesh import feature_size
from cleave.regions import (BallFace, Constraint, SphereRegion, complement_profile, engine_for,
                            face_is_empty, faces_adjacent, is_generic, region_components,
                            region_euler, region_is_empty, region_mask, regions_equal)
from cleave.sampling import random_plane


def C(normal, offset, sign=1, closed=False):
    return Constraint(make_hyperplane(normal, offset), sign, closed)


def region(n, *cons):
    return SphereRegion(n, tuple(cons))


def test_emptiness_examples():
    assert not region_is_empty(region(1, C((1, 0), 0)))
    assert region_is_empty(region(1, C((1, 0), 0), C((1, 0), -0.5, -1)))
    assert region_is_empty(region(2, C((1, 0, 0), 0.9), C((0, 1, 0), 0.9)))


def test_dense_sample_oracle_for_corner_case():
    rng = np.random.default_rng(1)
    x = rng.normal(size=(10**6, 3))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    assert not ((x[:, 0] > 0.9) & (x[:, 1] > 0.9)).any()


def test_component_examples():
    assert region_components(region(1, C((1, 0), 0)))[0] == 1
    assert region_components(region(1, C((0, 1), 0.5)))[0] == 1
    band2 = region(2, C((1, 0, 0), -0.3), C((1, 0, 0), 0.3, -1))
    band1 = region(1, C((1, 0), -0.3), C((1, 0), 0.3, -1))
    assert region_components(band2)[0] == 1
    assert region_components(band1)[0] == 2


def test_witnesses_lie_in_region():
    R = region(1, C((1, 0), -0.3), C((1, 0), 0.3, -1))
    _, wit = region_components(R)
    for w in wit:
        assert R.contains(w)


def test_equality_examples():
    a, b = C((1, 0), 0), C((0, 1), 0.2, -1)
    assert regions_equal(region(1, a, b), region(1, b, a))
    assert regions_equal(region(1, a), region(1, a, C((0, 1), 2.0, -1)))
    assert not regions_equal(region(1, a), region(1, C((1, 0), 0.1)))


def test_euler_examples():
    assert region_euler(region(2, C((1, 0, 0), 0, closed=True))) == 1
    assert region_euler(SphereRegion.full(2)) == 2
    assert region_euler(SphereRegion.full(1)) == 0
    # two closed caps: the complement of an open band
    caps = SphereRegion(2, (C((1, 0, 0), 0.3, closed=True),))
    other = SphereRegion(2, (C((1, 0, 0), -0.3, -1, closed=True),))
    assert region_euler(caps) + region_euler(other) == 2
    assert complement_profile(region(2, C((1, 0, 0), -0.3), C((1, 0, 0), 0.3, -1))) == [1, 1]


def test_mixed_closedness_rejected():
    with pytest.raises(ValueError):
        region_euler(region(2, C((1, 0, 0), 0), C((0, 1, 0), 0, closed=True)))


def test_tube_complement():
    tube_like = region(2, C((1, 0, 0), 0.5), C((1, 0, 0), -0.5, -1))
    assert region_is_empty(tube_like)
    two_caps = region(2, C((1, 0, 0), 0.9, -1), C((1, 0, 0), -0.9))
    assert region_components(two_caps)[0] == 1
    assert complement_profile(two_caps) == [1, 1]


def test_genericity_guard():
    tangent = make_hyperplane((1, 0, 0), 1 - 1e-8)
    assert not is_generic(2, [tangent])
    assert is_generic(2, [make_hyperplane((1, 0, 0), 0.2)])
    with pytest.raises(NonGeneric):
        engine_for(2, [make_hyperplane((1, 0, 0), 0), make_hyperplane((1, 1e-7, 0), 0)])


def test_identical_planes_are_deduplicated():
    P = make_hyperplane((1, 0, 0), 0.2)
    eng = engine_for(2, [P, P, reverse(P)])
    R = SphereRegion(2, (Constraint(P, 1), Constraint(reverse(P), -1)))
    assert region_mask(eng, R).any()


def test_faces_adjacent_examples():
    X = BallFace(make_hyperplane((1, 0), 0))
    Y = BallFace(make_hyperplane((0, 1), 0))
    assert faces_adjacent(X, Y)
    assert not faces_adjacent(X, BallFace(make_hyperplane((1, 0), 0.5)))
    assert faces_adjacent(X, X)


def test_faces_adjacent_oracle_s1():
    """Chords of D^2 meet iff the 2x2 solve lands inside both clipped chords."""
    rng = np.random.default_rng(3)
    for _ in range(300):
        P, Q = random_plane(1, rng), random_plane(1, rng)
        cP = (Constraint(random_plane(1, rng), 1, True),)
        F, G = BallFace(P, cP), BallFace(Q)
        if face_is_empty(F):
            continue
        A = np.vstack([P.nu, Q.nu])
        x = np.linalg.solve(A, [P.offset, Q.offset])
        expect = bool(x @ x <= 1 and all(c.sign * c.plane.value(x) >= 0 for c in cP))
        assert faces_adjacent(F, G) == expect


def _systems(rng, n, m):
    return [SphereRegion(n, tuple(Constraint(random_plane(n, rng), int(rng.choice([-1, 1])))
                                  for _ in range(int(rng.integers(1, m + 1))))) for _ in range(2)]


def _compare(n, R, S):
    planes = R.planes() + S.planes()
    out = []
    for kind in ("exact", "mesh"):
        eng = engine_for(n, planes, kind)
        a, b = region_mask(eng, R), region_mask(eng, S)
        out.append((a.any(), b.any(), eng.components(a)[0], eng.components(b)[0], np.array_equal(a, b)))
    return out


def test_mesh_oracle_s1():
    rng = np.random.default_rng(11)
    checked = 0
    for _ in range(300):
        R, S = _systems(rng, 1, 4)
        planes = R.planes() + S.planes()
        if not is_generic(1, planes) or feature_size(1, planes) < 2e-3:
            continue
        ex, me = _compare(1, R, S)
        assert ex == me
        checked += 1
    assert checked > 250


def test_mesh_oracle_s2():
    rng = np.random.default_rng(12)
    checked = 0
    for _ in range(60):
        R, S = _systems(rng, 2, 3)
        planes = R.planes() + S.planes()
        if not is_generic(2, planes) or feature_size(2, planes) < 0.12:
            continue
        ex, me = _compare(2, R, S)
        assert ex == me
        checked += 1
    assert checked > 10


@settings(max_examples=40)
@given(st.integers(0, 2**32 - 1))
def test_components_invariant_under_permutation_and_redundancy(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 3))
    cons = tuple(Constraint(random_plane(n, rng), int(rng.choice([-1, 1]))) for _ in range(3))
    if not is_generic(n, [c.plane for c in cons]):
        return
    base = region_components(SphereRegion(n, cons))[0]
    for p in itertools.permutations(cons):
        assert region_components(SphereRegion(n, p))[0] == base
    far = Constraint(make_hyperplane(tuple([1.0] + [0.0] * n), 1.5), -1)
    assert region_components(SphereRegion(n, cons + (far,)))[0] == base


@settings(max_examples=40)
@given(st.integers(0, 2**32 - 1))
def test_monotonicity_of_witnesses(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 3))
    R = SphereRegion(n, (Constraint(random_plane(n, rng), 1),))
    new = Constraint(random_plane(n, rng), int(rng.choice([-1, 1])))
    if not is_generic(n, R.planes() + [new.plane]):
        return
    _, wit = region_components(R)
    bigger = SphereRegion(n, R.constraints + (new,))
    for w in wit:
        assert bigger.contains(w) or not new.holds(w)


@settings(max_examples=40)
@given(st.integers(0, 2**32 - 1))
def test_euler_additive_over_components(seed):
    rng = np.random.default_rng(seed)
    cons = tuple(Constraint(random_plane(2, rng), int(rng.choice([-1, 1])), True) for _ in range(3))
    if not is_generic(2, [c.plane for c in cons]):
        return
    eng = engine_for(2, [c.plane for c in cons])
    m = region_mask(eng, SphereRegion(2, cons))
    count, lab = eng.components(m)
    assert eng.euler(m, closed=True) == sum(eng.euler(lab == c, closed=True) for c in range(count))


def test_region_json_roundtrip():
    R = region(2, C((1, 0, 0), 0.2), C((0, 1, 0), -0.1, -1, True))
    assert SphereRegion.from_json(R.to_json()) == R
    assert SphereRegion.from_json(SphereRegion.full(1).to_json(), 1) == SphereRegion.full(1)


def test_kappa_region_matches_side():
    P = kappa((0.0, 1.0), 0.5)
    R = SphereRegion(1, (Constraint(P, 1),))
    assert R.contains((0.0, 1.0)) and not R.contains((0.0, -1.0))
