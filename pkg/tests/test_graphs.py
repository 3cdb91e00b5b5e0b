import math

import pytest

from fliplab.graphs import (
    Graph,
    GraphError,
    ListAssignment,
    automorphisms,
    count_proper,
    enumerate_nonisomorphic,
    gen_complete,
    gen_cycle,
    gen_path,
    gen_random_regular,
    graph_to_text,
    is_proper,
    parse_coloring,
    parse_graph,
    parse_lists,
    proper_colorings,
)


def test_parse_triangle():
    g = parse_graph("3\n0 1\n1 2\n0 2\n")
    assert g.n == 3
    assert g.max_degree == 2
    assert list(g.edges()) == [(0, 1), (0, 2), (1, 2)]


def test_parse_single_vertex_no_edges():
    g = parse_graph("1")
    assert g.n == 1
    assert g.max_degree == 0


def test_parse_comments_and_blank_lines():
    g = parse_graph("# a triangle\n3\n\n0 1\n1 2 # last\n0 2\n")
    assert g.edge_count() == 3


@pytest.mark.parametrize(
    "text,needle",
    [
        ("4\n0 1\n0 1", "duplicate edge"),
        ("3\n1 1", "self-loop"),
        ("3\n0 5", "index"),
        ("3\nnope", "malformed"),
        ("3\n0 1 2", "malformed"),
        ("3\n2 0", "u < v"),
        ("", "empty"),
    ],
)
def test_parse_errors_name_the_problem(text, needle):
    with pytest.raises(GraphError) as err:
        parse_graph(text)
    assert needle in str(err.value)


def test_parse_serialize_roundtrip():
    for g in [gen_cycle(5), gen_complete(4), gen_path(6), parse_graph("2")]:
        assert parse_graph(graph_to_text(g)).adjacency == g.adjacency
    for g in enumerate_nonisomorphic(4):
        assert parse_graph(graph_to_text(g)).adjacency == g.adjacency


def test_generators_shapes():
    assert gen_cycle(5).edge_count() == 5
    assert gen_cycle(5).max_degree == 2
    assert gen_complete(4).edge_count() == 6
    assert gen_complete(4).max_degree == 3
    assert gen_path(4).edge_count() == 3
    with pytest.raises(GraphError):
        gen_cycle(2)


def test_random_regular_is_regular_and_deterministic():
    g1 = gen_random_regular(8, 3, 42)
    g2 = gen_random_regular(8, 3, 42)
    assert g1.adjacency == g2.adjacency
    assert all(g1.degree(u) == 3 for u in range(8))
    g3 = gen_random_regular(8, 3, 43)
    assert all(g3.degree(u) == 3 for u in range(8))


def test_random_regular_infeasible():
    with pytest.raises(GraphError):
        gen_random_regular(5, 3, 1)  # odd stub count
    with pytest.raises(GraphError):
        gen_random_regular(4, 4, 1)  # degree >= n


def test_is_proper():
    tri = gen_cycle(3)
    assert is_proper(tri, (0, 1, 2))
    assert not is_proper(tri, (0, 0, 1))
    assert is_proper(parse_graph("1"), (5,))
    with pytest.raises(GraphError):
        is_proper(tri, (0, 1))


def test_complete_graph_counting():
    # K_{d+1} has exactly (d+1)! proper (d+1)-colorings
    for n in range(2, 6):
        assert count_proper(gen_complete(n), n) == math.factorial(n)


def test_proper_colorings_are_proper_and_complete():
    g = gen_cycle(4)
    found = list(proper_colorings(g, 3))
    assert all(is_proper(g, s) for s in found)
    brute = [
        s
        for s in __import__("itertools").product(range(3), repeat=4)
        if is_proper(g, s)
    ]
    assert sorted(found) == sorted(brute)


def test_enumerate_nonisomorphic_counts():
    # known counts of simple graphs up to isomorphism
    assert [len(enumerate_nonisomorphic(n)) for n in range(1, 6)] == [1, 2, 4, 11, 34]


def test_automorphisms_of_cycle():
    assert len(automorphisms(gen_cycle(5))) == 10
    assert len(automorphisms(gen_complete(3))) == 6


def test_list_assignment():
    lists = ListAssignment(((2, 0, 1), (1, 3, 0)))
    assert lists[0] == (0, 1, 2)
    assert lists.uniform_size == 3
    assert lists.color_universe() == (0, 1, 2, 3)
    assert ListAssignment.uniform(2, 4).lists == ((0, 1, 2, 3), (0, 1, 2, 3))
    mixed = ListAssignment(((0, 1), (0, 1, 2)))
    assert mixed.uniform_size is None
    with pytest.raises(GraphError):
        ListAssignment(((),))


def test_parse_lists_and_coloring():
    lists = parse_lists("0 1 2\n1 2 3\n")
    assert lists.lists == ((0, 1, 2), (1, 2, 3))
    assert parse_coloring("0 1 2\n") == (0, 1, 2)
    with pytest.raises(GraphError):
        parse_coloring("0 1", 3)
