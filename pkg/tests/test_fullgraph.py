import itertools

import pytest

from cleave import fullgraph as fg
from cleave.errors import BadIndex, BudgetExceeded, CyclicOrientation, DimMismatch


def edges(G):
    return {(i, j) if G.points(i, j) else (j, i) for i, j in itertools.combinations(range(1, G.k + 1), 2)}


def zero(k):
    return {p: 0 for p in itertools.combinations(range(1, k + 1), 2)}


def test_from_permutation_examples():
    G = fg.from_permutation(1, {(1, 2): 0}, (1, 2))
    assert edges(G) == {(1, 2)}
    H = fg.from_permutation(1, zero(3), (3, 2, 1))
    assert edges(H) == {(3, 2), (2, 1), (3, 1)}


def test_to_permutation_examples():
    assert fg.to_permutation(fg.FullGraph.make(1, 2, {(1, 2): 0}, {(1, 2): 1})) == (1, 2)
    tri = fg.FullGraph.make(1, 3, zero(3), {(1, 2): -1, (1, 3): -1, (2, 3): -1})
    assert fg.to_permutation(tri) == (3, 2, 1)
    cyc = fg.FullGraph.make(1, 3, zero(3), {(1, 2): 1, (2, 3): 1, (1, 3): -1})
    with pytest.raises(CyclicOrientation):
        fg.to_permutation(cyc)


def test_roundtrip_and_counts():
    assert [fg.count(1, 2), fg.count(2, 2), fg.count(2, 3)] == [2, 4, 48]
    allg = fg.enumerate_graphs(2, 3)
    assert len(allg) == len(set(allg)) == 48
    for G in allg:
        assert fg.from_permutation(2, dict(G.labels), fg.to_permutation(G)) == G
    with pytest.raises(BudgetExceeded):
        fg.enumerate_graphs(2, 6, budget=1000)


def test_compose_unit_and_copy_rule():
    G = fg.from_permutation(2, {(1, 2): 1, (1, 3): 0, (2, 3): 1}, (2, 3, 1))
    u = fg.unit_graph(2)
    assert fg.compose_i(u, 1, G) == G
    for i in (1, 2, 3):
        assert fg.compose_i(G, i, u) == G
    H = fg.from_permutation(2, {(1, 2): 0}, (2, 1))
    C = fg.compose_i(G, 2, H)
    assert C.k == 4
    # vertices 2 and 3 replace old vertex 2; outside edges copy the old edge
    for w, old in ((1, 1), (4, 3)):
        for b in (2, 3):
            assert C.label(w, b) == G.label(old, 2)
            assert C.points(w, b) == G.points(old, 2)
    assert C.label(2, 3) == 0 and C.points(3, 2)
    with pytest.raises(BadIndex):
        fg.compose_i(G, 4, H)
    with pytest.raises(DimMismatch):
        fg.compose_i(G, 1, fg.unit_graph(1))


def test_associativity_up_to_five_vertices():
    pools = {k: fg.enumerate_graphs(2, k) for k in (1, 2, 3)}
    for a, b, c in itertools.product((2, 3), (1, 2), (2,)):
        if a + b + c - 2 > 5:
            continue
        for F in pools[a][::5]:
            for G in pools[b][::3]:
                for H in pools[c]:
                    for i in range(1, a + 1):
                        for j in range(1, b + 1):
                            assert fg.compose_i(fg.compose_i(F, i, G), i + j - 1, H) == \
                                fg.compose_i(F, i, fg.compose_i(G, j, H))
                        for i2 in range(i + 1, a + 1):
                            assert fg.compose_i(fg.compose_i(F, i, G), i2 + b - 1, H) == \
                                fg.compose_i(fg.compose_i(F, i2, H), i, G)


def test_leq_examples():
    a = fg.from_permutation(2, {(1, 2): 0}, (1, 2))
    b = fg.from_permutation(2, {(1, 2): 1}, (2, 1))
    c = fg.from_permutation(2, {(1, 2): 0}, (2, 1))
    assert fg.leq(a, a) and fg.leq(a, b) and not fg.leq(a, c)
    with pytest.raises(DimMismatch):
        fg.leq(a, fg.unit_graph(2))


def test_leq_partial_order_and_degree():
    allg = fg.enumerate_graphs(2, 3)
    le = {(x, y): fg.leq(x, y) for x in allg for y in allg}
    for x in allg:
        assert le[(x, x)]
    for x, y in itertools.permutations(allg, 2):
        if le[(x, y)]:
            assert not le[(y, x)]
            assert fg.degree(x) < fg.degree(y)
    for x, y, z in itertools.product(allg[::3], allg, allg[::2]):
        if le[(x, y)] and le[(y, z)]:
            assert le[(x, z)]


def test_gamma():
    G = fg.from_permutation(2, {(1, 2): 1, (1, 3): 0, (2, 3): 1}, (3, 1, 2))
    g = fg.gamma_ij(G, 1, 3)
    assert g.k == 2 and g.label(1, 2) == 0 and g.points(2, 1)
    with pytest.raises(BadIndex):
        fg.gamma_ij(G, 2, 2)
    allg = fg.enumerate_graphs(2, 3)
    for x, y in itertools.product(allg, allg):
        if fg.leq(x, y):
            assert all(fg.leq(fg.gamma_ij(x, i, j), fg.gamma_ij(y, i, j))
                       for i, j in ((1, 2), (1, 3), (2, 3)))


def test_json_roundtrip():
    for G in fg.enumerate_graphs(2, 3):
        assert fg.FullGraph.from_json(G.to_json()) == G
