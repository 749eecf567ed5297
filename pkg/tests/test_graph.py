import itertools

import pytest
from hypothesis import given, settings, strategies as st

from riskpath.benchgen import make_chain, make_diamond_sequence
from riskpath.errors import (
    CycleDetected,
    DeadEndVertex,
    InvalidGraph,
    MissingSourceOrTerminal,
    NotAPath,
    PathBudgetExceeded,
    UnreachableVertex,
)
from riskpath.graph import (
    AgentGraph,
    Path,
    check_full_path,
    count_paths,
    enumerate_paths,
    path_edges,
    topological_order,
    validate,
)
from riskpath.sampling import AgentSpec

U = AgentSpec.make("uniform")


def diamond(extra_edges=(), extra_vertices=()):
    edges = [("M", "A", U), ("M", "B", U), ("A", "C", U), ("B", "C", U), *extra_edges]
    return AgentGraph.build(["M", "A", "B", "C", *extra_vertices], edges, "M", "C")


def test_diamond_is_valid():
    validate(diamond())


def test_back_edge_is_a_cycle():
    with pytest.raises(CycleDetected):
        validate(diamond([("C", "M", U)]))


def test_self_loop_is_a_cycle():
    with pytest.raises(CycleDetected):
        validate(diamond([("A", "A", U)]))


def test_isolated_vertex_is_unreachable():
    with pytest.raises(UnreachableVertex) as exc:
        validate(diamond(extra_vertices=["X"]))
    assert exc.value.vertex == "X"


def test_dead_end_vertex():
    with pytest.raises(DeadEndVertex) as exc:
        validate(diamond([("A", "D", U)], ["D"]))
    assert exc.value.vertex == "D"


def test_missing_terminal():
    g = AgentGraph.build(["M", "A"], [("M", "A", U)], "M", "Z")
    with pytest.raises(MissingSourceOrTerminal):
        validate(g)


def test_duplicate_edge_and_unknown_vertex():
    with pytest.raises(InvalidGraph):
        validate(diamond([("M", "A", U)]))
    with pytest.raises(InvalidGraph):
        validate(diamond([("A", "Q", U)]))


def test_topological_order_examples():
    assert topological_order(diamond()) == ["A", "B", "C"]
    assert topological_order(make_chain(2)) == ["v1", "v2"]
    order = topological_order(make_diamond_sequence(4))
    assert len(order) == 12 and order[-1] == "d4"


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5, 6])
def test_topological_order_respects_edges(k):
    g = make_diamond_sequence(k)
    order = topological_order(g)
    assert sorted(order) == sorted(v for v in g.vertices if v != g.source)
    pos = {v: i for i, v in enumerate(order)}
    for e in g.edges:
        if e.src != g.source:
            assert pos[e.src] < pos[e.dst]


def test_enumerate_paths_examples():
    assert len(enumerate_paths(diamond())) == 2
    paths = enumerate_paths(make_diamond_sequence(4))
    assert len(paths) == 16 and all(len(p) == 8 for p in paths)
    assert len(enumerate_paths(make_chain(5))) == 1


@pytest.mark.parametrize("k", range(1, 7))
def test_diamond_path_count_brute_force(k):
    g = make_diamond_sequence(k)
    paths = enumerate_paths(g)
    assert len(paths) == 2**k == count_paths(g)
    # brute force: one branch choice per diamond
    expected = set()
    for choice in itertools.product("ab", repeat=k):
        vs = ["d0"]
        for i, c in enumerate(choice):
            vs += [f"{c}{i}", f"d{i + 1}"]
        expected.add(tuple(vs))
    assert {p.vertices for p in paths} == expected
    assert [p.vertices for p in paths] == sorted(p.vertices for p in paths)


def test_path_cap():
    with pytest.raises(PathBudgetExceeded):
        enumerate_paths(make_diamond_sequence(4), cap=15)
    assert len(enumerate_paths(make_diamond_sequence(4), cap=16)) == 16


def test_path_helpers():
    g = diamond()
    assert [e.id for e in path_edges(g, Path(("M", "A", "C")))] == ["M->A", "A->C"]
    assert str(Path(("M", "A", "C"))) == "M -> A -> C"
    with pytest.raises(NotAPath):
        check_full_path(g, Path(("A", "C")))
    with pytest.raises(InvalidGraph):
        path_edges(g, Path(("M", "C")))


def test_graph_round_trip():
    g = make_diamond_sequence(2, AgentSpec.make("gaussian", mu=0.5, sigma=2.0))
    assert AgentGraph.from_dict(g.to_dict()).to_dict() == g.to_dict()


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 7), st.data())
def test_random_dags_validate_and_sort(nv, data):
    # random DAG over a fixed order, with s -> every vertex and every vertex -> t
    names = [f"x{i}" for i in range(nv)]
    pairs = [(names[i], names[j]) for i in range(nv) for j in range(i + 1, nv)]
    chosen = set(data.draw(st.lists(st.sampled_from(pairs), unique=True)))
    chosen |= {("s", v) for v in names} | {(v, "t") for v in names}
    g = AgentGraph.build(["s", "t", *names], [(u, v, U) for u, v in sorted(chosen)], "s", "t")
    validate(g)
    order = topological_order(g)
    pos = {v: i for i, v in enumerate(order)}
    assert all(pos[e.src] < pos[e.dst] for e in g.edges if e.src != "s")
    assert len(enumerate_paths(g)) == count_paths(g)
