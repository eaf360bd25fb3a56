import pytest
from hypothesis import given

from competing_urns.errors import (Disconnected, DuplicateEdge, EdgeListFormatError,
                                   IndexOutOfRange, ParameterTooSmall, SelfLoop)
from competing_urns.graph import (build_graph, complete, cycle, format_edge_list, generate,
                                  load_graph, parse_edge_list, path, read_edge_list, risk,
                                  risk_pairs, write_edge_list)

from conftest import connected_graphs


def test_single_edge_path():
    g = build_graph(2, [(0, 1)])
    assert g.n == 2 and g.edges == [(0, 1)] and g.degree == (1, 1)


def test_cycle4_from_builder_matches_generator():
    g = build_graph(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
    assert g.degree == (2, 2, 2, 2)
    assert g == cycle(4) == generate("cycle:4") == generate("cycle", 4)


@pytest.mark.parametrize("n,edges,err", [
    (4, [(0, 1), (2, 3)], Disconnected),
    (3, [(0, 1), (1, 0), (1, 2)], DuplicateEdge),
    (3, [(0, 1), (1, 1), (1, 2)], SelfLoop),
    (3, [(0, 1), (1, 3)], IndexOutOfRange),
])
def test_build_errors(n, edges, err):
    with pytest.raises(err):
        build_graph(n, edges)


def test_error_names_offender():
    with pytest.raises(DuplicateEdge, match="1"):
        build_graph(3, [(0, 1), (1, 0), (1, 2)])
    with pytest.raises(SelfLoop, match="2"):
        build_graph(3, [(0, 1), (2, 2)])


def test_risk3_shape():
    g = risk(3)
    assert g.n == 7 and g.num_edges == 9
    assert g.degree[0] == 6
    assert all(d == 2 for d in g.degree[1:])
    for a, b in risk_pairs(3):
        assert b in g.adjacency[a] and 0 in g.adjacency[a] and 0 in g.adjacency[b]


def test_path3():
    g = path(3)
    assert g.degree == (1, 2, 1) and g.edges == [(0, 1), (1, 2)]


@pytest.mark.parametrize("ctor,bad", [(cycle, 2), (path, 0), (complete, 1), (risk, 1)])
def test_parameter_too_small(ctor, bad):
    with pytest.raises(ParameterTooSmall):
        ctor(bad)


@pytest.mark.parametrize("s", [2, 3, 4, 7])
def test_risk_family_invariants(s):
    g = risk(s)
    assert g.num_edges == 3 * s
    assert sorted(g.degree) == [2] * (2 * s) + [2 * s]


@pytest.mark.parametrize("k", range(3, 13))
def test_cycle_regular(k):
    assert set(cycle(k).degree) == {2}


def test_complete_degrees():
    assert complete(5).degree == (4,) * 5 and complete(5).num_edges == 10


@given(connected_graphs())
def test_handshake_and_symmetry(g):
    assert sum(g.degree) == 2 * g.num_edges
    for v, nb in enumerate(g.adjacency):
        assert list(nb) == sorted(set(nb)) and v not in nb
        for u in nb:
            assert v in g.adjacency[u]


@given(connected_graphs())
def test_edge_list_round_trip(g):
    text = format_edge_list(g)
    h = parse_edge_list(text)
    assert h == g
    assert format_edge_list(h) == text


def test_file_round_trip_bit_exact(tmp_path):
    p = tmp_path / "g.txt"
    write_edge_list(risk(3), p)
    raw = p.read_bytes()
    g = read_edge_list(p)
    assert g == risk(3)
    write_edge_list(g, p)
    assert p.read_bytes() == raw
    assert load_graph(str(p)) == risk(3)


def test_labelled_edge_list_reindexed():
    g = parse_edge_list("# a triangle\nn 3\na b\nb c  # comment\nc a\n")
    assert g == cycle(3)


@pytest.mark.parametrize("text", ["", "m 3\n0 1\n", "n 3\n0 1 2\n", "n x\n"])
def test_edge_list_format_errors(text):
    with pytest.raises(EdgeListFormatError):
        parse_edge_list(text)


def test_generate_unknown_family():
    with pytest.raises(ValueError):
        generate("star:4")
