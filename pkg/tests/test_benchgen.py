import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from riskpath.benchgen import (
    GENERATORS,
    SUITE,
    BenchSpec,
    make_chain,
    make_correlated_diamond,
    make_diamond_sequence,
    make_two_path,
    replicate_path,
)
from riskpath.errors import InvalidParams
from riskpath.evaluation import AnalyticOracle, analytic_var
from riskpath.graph import Path, count_paths, enumerate_paths, validate
from riskpath.sampling import AgentSpec, derive_rng, sample_edge


def test_chain_examples():
    g = make_chain(1)
    assert (len(g.vertices), len(g.edges)) == (2, 1)
    g = make_chain(8)
    paths = enumerate_paths(g)
    assert len(g.vertices) == 9 and len(paths) == 1 and len(paths[0]) == 8
    with pytest.raises(InvalidParams):
        make_chain(0)


@pytest.mark.parametrize("k,nv,np_", [(1, 4, 2), (2, 7, 4), (4, 13, 16)])
def test_diamond_examples(k, nv, np_):
    g = make_diamond_sequence(k)
    assert len(g.vertices) == nv and len(g.edges) == 4 * k
    paths = enumerate_paths(g)
    assert len(paths) == np_ and all(len(p) == 2 * k for p in paths)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.integers(1, 16))
def test_closed_form_counts(k, m):
    g = make_diamond_sequence(k)
    validate(g)
    assert (len(g.vertices), len(g.edges), count_paths(g)) == (3 * k + 1, 4 * k, 2**k)
    c = make_chain(m)
    validate(c)
    assert (len(c.vertices), len(c.edges), count_paths(c)) == (m + 1, m, 1)


@pytest.mark.parametrize("V,L", [(7, 5), (8, 5), (4, 2), (6, 4)])
def test_two_path_shape(V, L):
    g = make_two_path(V, L)
    validate(g)
    paths = enumerate_paths(g)
    assert len(g.vertices) == V and len(paths) == 2 and all(len(p) == L for p in paths)


def test_two_path_rejects_impossible():
    with pytest.raises(InvalidParams):
        make_two_path(4, 3)  # branches would share the single final edge


def test_replicate():
    base = make_chain(8)
    p = Path(base.vertices)
    same = replicate_path(base, p, 1)
    assert same.to_dict() == base.to_dict()
    g = replicate_path(base, p, 5)
    assert len(g.edges) == 40 and count_paths(g) == 1
    validate(g)


def test_replicated_analytic_var():
    base = make_chain(3)
    g = replicate_path(base, Path(base.vertices), 2)
    o = AnalyticOracle(g)
    assert abs(analytic_var(o, enumerate_paths(g)[0], 0.9) - 0.9 ** (1 / 6)) < 1e-7


def test_correlated_diamond():
    g = make_correlated_diamond(0.5)
    z = g.initial.sample(10**5, derive_rng(0, "src", "t"))
    a, _ = sample_edge(g.edge("s", "a"), z, derive_rng(0, "s->a", "t"))
    b, _ = sample_edge(g.edge("a", "t"), z, derive_rng(0, "a->t", "t"))
    assert abs(np.corrcoef(a, b)[0, 1] - 0.5) < 0.05
    # comonotone: true VaR of the max equals one edge's VaR, below the split-budget quantile
    o = AnalyticOracle(make_correlated_diamond(1.0))
    top = Path(("s", "a", "t"))
    assert abs(analytic_var(o, top, 0.9) - 1.2815516) < 1e-6
    assert analytic_var(o, top, 0.9) < 1.6448536
    with pytest.raises(InvalidParams):
        make_correlated_diamond(1.2)


def test_every_generator_validates():
    for name in GENERATORS:
        params = {"m": 3} if name == "chain" else {"k": 2} if name == "diamond_sequence" else {}
        if name == "correlated_diamond":
            params = {"rho": 0.2}
        validate(BenchSpec(name, params).build())
    for factory, d in SUITE.values():
        validate(factory())


def test_benchspec_errors():
    with pytest.raises(InvalidParams):
        BenchSpec("nope").build()
    with pytest.raises(InvalidParams):
        BenchSpec("chain", {"m": 2, "bogus": 1}).build()
    g = BenchSpec("chain", {"m": 2, "kind": "gaussian", "mu": 1.0, "sigma": 0.5}).build()
    assert g.edges[0].agent == AgentSpec.make("gaussian", mu=1.0, sigma=0.5)


def test_suite_shapes():
    shapes = {name: (len(f().vertices), count_paths(f()), d) for name, (f, d) in SUITE.items()}
    assert shapes["MouseNav"] == (4, 2, 5)
    assert shapes["16-Rooms"] == (13, 16, 100)
    assert shapes["Fetch"] == (7, 2, 30)
    assert shapes["BoxRelay"][0] == 10 and shapes["BoxRelay"][2] == 50
