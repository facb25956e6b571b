from itertools import combinations, permutations, product

import pytest

from enhomology.errors import GraphError, SchemaError, TreeError
from enhomology.treecomb import (
    CompleteGraph,
    Labeling,
    LevelTree,
    delete_leaf,
    dfs_edge_index,
    enumerate_trees,
    graph_compose,
    graph_leq,
    in_Kn,
    minimal_complete_graph,
    relabel,
    theta_deletions,
    tree_count,
    tree_kappa_membership,
)

WORKED_TREE = LevelTree.from_text("[2];[3,2]")


def small_graphs(vertices, max_weight):
    pairs = list(combinations(vertices, 2))
    for ordering in permutations(vertices):
        for weights in product(range(max_weight + 1), repeat=len(pairs)):
            yield CompleteGraph.build(ordering, dict(zip(pairs, weights)))


def test_text_form_round_trip():
    assert WORKED_TREE.fibers == ((2,), (3, 2))
    assert WORKED_TREE.to_text() == "[2];[3,2]"
    assert WORKED_TREE.leaf_count == 5
    assert WORKED_TREE.edge_count == 7
    with pytest.raises(SchemaError):
        LevelTree.from_text("2;3,2")


def test_fiber_counts_must_match_vertices():
    with pytest.raises(TreeError):
        LevelTree(((2,), (3,)))
    with pytest.raises(TreeError):
        LevelTree(((2,), (0, 1)))


def test_enumerate_small_cases():
    assert len(enumerate_trees(1, 4)) == 1
    assert [t.to_text() for t in enumerate_trees(2, 3)] == [
        "[1];[3]", "[2];[1,2]", "[2];[2,1]", "[3];[1,1,1]",
    ]
    assert len(enumerate_trees(3, 2)) == 3


@pytest.mark.parametrize("r", range(1, 7))
def test_two_level_counts_are_powers_of_two(r):
    assert len(enumerate_trees(2, r)) == 2 ** (r - 1)


@pytest.mark.parametrize("r", range(1, 6))
def test_three_level_counts_follow_the_recursion(r):
    trees = enumerate_trees(3, r)
    assert len(trees) == tree_count(3, r)
    assert len(set(trees)) == len(trees)
    assert trees == sorted(trees)


def test_enumerate_rejects_degenerate_bounds():
    with pytest.raises(TreeError):
        enumerate_trees(0, 2)
    with pytest.raises(TreeError):
        enumerate_trees(2, 0)


def test_delete_leaf_on_worked_tree():
    assert delete_leaf(WORKED_TREE, 0).fibers == ((2,), (2, 2))
    assert delete_leaf(WORKED_TREE, 4).fibers == ((2,), (3, 1))
    with pytest.raises(TreeError):
        delete_leaf(LevelTree.trunk(3), 0)


def test_deletion_stays_in_enumeration():
    for n in (1, 2, 3):
        for r in range(2, 5):
            smaller = set(enumerate_trees(n, r - 1))
            for t in enumerate_trees(n, r):
                for first, end in t.top_fiber_ranges():
                    if end - first < 2:
                        continue
                    for s in range(first, end):
                        out = delete_leaf(t, s)
                        assert out.n == n
                        assert out in smaller


def test_relabel_compresses():
    lab = Labeling(('a', 'b', 'c', 'd'))
    assert relabel(lab, 1).order == ('a', 'c', 'd')
    with pytest.raises(TreeError):
        relabel(lab, 4)


def test_dfs_edge_indices():
    assert [dfs_edge_index(WORKED_TREE, i) for i in range(5)] == [2, 3, 4, 6, 7]
    assert dfs_edge_index(LevelTree.trunk(4), 0) == 4
    assert LevelTree.corolla(5).leaf_edge_indices() == (1, 2, 3, 4, 5)
    with pytest.raises(TreeError):
        dfs_edge_index(WORKED_TREE, 5)


def test_edge_indices_are_injective():
    for n in (1, 2, 3):
        for r in range(1, 5):
            for t in enumerate_trees(n, r):
                indices = t.leaf_edge_indices()
                assert len(set(indices)) == r
                assert all(1 <= s <= t.edge_count for s in indices)


def test_theta_deletions_on_worked_tree():
    deletions = theta_deletions(WORKED_TREE)
    assert [(d.leaf, d.sign, d.is_min) for d in deletions] == [
        (0, -1, True), (2, 1, False), (3, -1, True), (4, -1, False),
    ]
    assert theta_deletions(LevelTree.corolla(1)) == []


def test_minimal_complete_graph_weights():
    lab = Labeling((0, 1, 2, 3, 4))
    k = minimal_complete_graph(WORKED_TREE, lab, 2)
    assert k.weight(0, 1) == 0
    assert k.weight(0, 3) == 1
    assert k.ordering == (0, 1, 2, 3, 4)
    corolla = minimal_complete_graph(LevelTree.corolla(3), Labeling((0, 1, 2)), 1)
    assert set(corolla.weights.values()) == {0}


def test_graph_leq_partial_order():
    graphs = list(small_graphs((1, 2, 3), 1)) + list(small_graphs((1, 2), 2))
    by_vertices = {}
    for g in graphs:
        by_vertices.setdefault(g.vertices, []).append(g)
    for group in by_vertices.values():
        for a in group:
            assert graph_leq(a, a)
            for b in group:
                if graph_leq(a, b) and graph_leq(b, a):
                    assert a == b
                for c in group:
                    if graph_leq(a, b) and graph_leq(b, c):
                        assert graph_leq(a, c)


def test_graph_leq_examples():
    a = CompleteGraph.build((1, 2, 3), 0)
    b = CompleteGraph.build((3, 2, 1), 1)
    assert graph_leq(a, b)
    flipped = CompleteGraph.build((2, 1, 3), 0)
    assert not graph_leq(a, flipped)
    with pytest.raises(GraphError):
        graph_leq(a, CompleteGraph.build((1, 2), 0))


def test_graph_compose_examples():
    a = CompleteGraph.build(('x', 'v'), 2)
    unit = CompleteGraph.build(('y',), 0)
    assert graph_compose(a, 'v', unit).ordering == ('x', 'y')
    b = CompleteGraph.build(('p', 'q'), 1)
    c = graph_compose(a, 'v', b)
    assert c.ordering == ('x', 'p', 'q')
    assert (c.weight('x', 'p'), c.weight('x', 'q'), c.weight('p', 'q')) == (2, 2, 1)
    with pytest.raises(GraphError):
        graph_compose(a, 'z', b)


def test_graph_compose_is_associative():
    a = CompleteGraph.build((1, 2), 1)
    b = CompleteGraph.build((3, 4), 0)
    c = CompleteGraph.build((5, 6), 2)
    left = graph_compose(graph_compose(a, 2, b), 4, c)
    right = graph_compose(a, 2, graph_compose(b, 4, c))
    assert left == right


def test_in_kn():
    k = CompleteGraph.build((1, 2, 3), 0)
    assert all(in_Kn(k, n) for n in (1, 2, 3))
    heavy = CompleteGraph.build((1, 2), 2)
    assert not in_Kn(heavy, 2)
    assert in_Kn(heavy, 3)
    assert in_Kn(graph_compose(heavy, 2, CompleteGraph.build((5, 6), 1)), 3)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_minimal_graph_contains_its_tree(n):
    for r in range(1, 5):
        for t in enumerate_trees(n, r):
            for order in permutations(range(r)):
                lab = Labeling(order)
                k = minimal_complete_graph(t, lab, n)
                assert tree_kappa_membership(t, lab, k)
                top = CompleteGraph.build(order, n - 1)
                assert tree_kappa_membership(t, lab, top)


def test_base_case_needs_leaf_order():
    lab = Labeling((0, 1))
    reversed_graph = CompleteGraph.build((1, 0), 0)
    assert not tree_kappa_membership(LevelTree.corolla(2), lab, reversed_graph)


def test_membership_is_monotone():
    for n in (1, 2):
        for r in (2, 3):
            vertices = tuple(range(r))
            graphs = list(small_graphs(vertices, 2))
            above = {k: [b for b in graphs if graph_leq(k, b)] for k in graphs}
            for t in enumerate_trees(n, r):
                for order in permutations(vertices):
                    lab = Labeling(order)
                    member = {k: tree_kappa_membership(t, lab, k) for k in graphs}
                    for k in graphs:
                        if member[k]:
                            assert all(member[b] for b in above[k])


def test_membership_vertex_mismatch():
    with pytest.raises(GraphError):
        tree_kappa_membership(LevelTree.corolla(2), Labeling((0, 1)), CompleteGraph.build((0, 5), 0))
