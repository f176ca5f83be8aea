import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cleave.cleaving import DecoratedTree
from cleave.errors import BadIndex, ColourMismatch
from cleave.geometry import Rotation, make_hyperplane, plane_rotation, random_rotation
from cleave.operad import CleavageElement, chop_equivalent, compose_i
from cleave.regions import Constraint, SphereRegion, regions_equal
from cleave.sampling import random_element
from cleave.semidirect import (SemidirectElement, ev_twisted, group_act, sd_compose_i, sd_equal, sd_unit,
                               untwisted)
from cleave.trees import left_blown

S1 = SphereRegion.full(1)


def two_ary(U, P):
    return CleavageElement(DecoratedTree(left_blown(2), (P,), U))


def test_identity_and_rot90():
    a = two_ary(S1, make_hyperplane((1, 0), 0))
    assert chop_equivalent(group_act(Rotation.identity(2), a), a)
    b = group_act(plane_rotation(2, math.pi / 2), a)
    assert np.allclose(b.decorations[0].nu, (0, 1)) and abs(b.decorations[0].offset) < 1e-12
    for x, y in zip(a.timber, b.timber):
        assert regions_equal(y, x.rotated(plane_rotation(2, math.pi / 2)))
    # leaf 1 sat on x > 0 and now sits on y > 0
    assert regions_equal(b.timber[0], SphereRegion(1, (Constraint(make_hyperplane((0, 1), 0), 1),)))


def test_identity_twists_reduce_to_compose(figure):
    g = two_ary(figure.timber[1], make_hyperplane((0, 0, 1), 0))
    e = sd_compose_i(untwisted(figure), 2, untwisted(g))
    assert chop_equivalent(e.base, compose_i(figure, 2, g))
    assert all(np.allclose(r.m, np.eye(3)) for r in e.twists)


def test_unit_and_errors(figure):
    e = untwisted(figure)
    assert sd_equal(sd_compose_i(sd_unit(figure.input), 1, e), e)
    with pytest.raises(BadIndex):
        ev_twisted(e, 5)
    with pytest.raises(ColourMismatch):
        sd_compose_i(e, 1, sd_unit(SphereRegion.full(2)))


def test_json_roundtrip(figure):
    rng = np.random.default_rng(0)
    e = SemidirectElement(figure, tuple(random_rotation(3, rng) for _ in range(4)))
    assert sd_equal(SemidirectElement.from_json(e.to_json()), e)


def _twisted(n, k, rng, U=None):
    a = random_element(n, k, rng, U=U, require_ob=U is None)
    return SemidirectElement(a, tuple(random_rotation(n + 1, rng) for _ in range(k)))


@settings(max_examples=25)
@given(st.integers(0, 2**32 - 1), st.integers(1, 2))
def test_random_laws(seed, n):
    rng = np.random.default_rng(seed)
    e = _twisted(n, 2, rng)
    i = int(rng.integers(1, 3))
    f0 = random_element(n, 2, rng, U=ev_twisted(e, i), require_ob=False)
    f = SemidirectElement(f0, tuple(random_rotation(n + 1, rng) for _ in range(2)))
    j = int(rng.integers(1, 3))
    g0 = random_element(n, 2, rng, U=ev_twisted(f, j), require_ob=False)
    g = SemidirectElement(g0, tuple(random_rotation(n + 1, rng) for _ in range(2)))
    ef = sd_compose_i(e, i, f)
    assert sd_equal(sd_compose_i(ef, i + j - 1, g), sd_compose_i(e, i, sd_compose_i(f, j, g)))
    for jj in (1, 2):
        assert regions_equal(ev_twisted(ef, i + jj - 1), ev_twisted(f, jj))
    assert sd_equal(sd_compose_i(e, i, sd_unit(ev_twisted(e, i))), e)


@settings(max_examples=25)
@given(st.integers(0, 2**32 - 1), st.integers(1, 2))
def test_action_commutes_with_composition(seed, n):
    rng = np.random.default_rng(seed)
    f = random_element(n, 3, rng)
    i = int(rng.integers(1, 4))
    g = random_element(n, 2, rng, U=f.timber[i - 1], require_ob=False)
    rho = random_rotation(n + 1, rng)
    lhs = group_act(rho, compose_i(f, i, g))
    rhs = compose_i(group_act(rho, f), i, group_act(rho, g))
    assert chop_equivalent(lhs, rhs)
    for x, y in zip(f.timber, group_act(rho, f).timber):
        assert regions_equal(y, x.rotated(rho))
