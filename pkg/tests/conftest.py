import numpy as np
import pytest
from hypothesis import settings

from cleave.cleaving import DecoratedTree
from cleave.geometry import kappa, make_hyperplane
from cleave.operad import CleavageElement
from cleave.regions import SphereRegion
from cleave.trees import BinaryTree, Leaf, Node, left_blown

settings.register_profile("repo", deadline=None, max_examples=60)
settings.load_profile("repo")


def unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def figure_element() -> CleavageElement:
    """Nested configuration on S^2: x=0 at the root, a tilted cap cut on the left, y=0 on the right."""
    t = BinaryTree(Node(Node(Leaf(1), Leaf(2)), Node(Leaf(3), Leaf(4))))
    decs = (make_hyperplane((1, 0, 0), 0), kappa(unit((-1, 0.2, 0.1)), 0.6), make_hyperplane((0, 1, 0), 0))
    return CleavageElement(DecoratedTree(t, decs, SphereRegion.full(2)))


def parallel_element(n: int, k: int, spread: float = 0.6) -> CleavageElement:
    e = tuple(1.0 if c == 0 else 0.0 for c in range(n + 1))
    offs = np.linspace(spread, -spread, k - 1)
    return CleavageElement(DecoratedTree(left_blown(k), tuple(make_hyperplane(e, o) for o in offs),
                                         SphereRegion.full(n)))


@pytest.fixture
def figure():
    return figure_element()
