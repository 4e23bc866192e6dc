import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from medgraph.errors import GraphError, ParseError, UnknownNodeError
from medgraph.graphs import (TailedDirectedGraph, UnrolledDag, format_lig,
                             format_unrolled_lig, parse_lig)
from medgraph.randomgen import random_rolled_graph


def test_build_basic(graph_plain):
    assert graph_plain.baseline == {"P"}
    assert graph_plain.process_nodes == {"Q", "R", "S"}
    assert len(graph_plain.all_edges) == 4


def test_unknown_edge_endpoint():
    with pytest.raises(UnknownNodeError):
        TailedDirectedGraph.build("AB", directed={("A", "Z")})


def test_edge_both_plain_and_tailed():
    with pytest.raises(GraphError):
        TailedDirectedGraph.build("AB", directed={("A", "B")},
                                  tailed={("A", "B")})


def test_self_loops_dropped():
    g = TailedDirectedGraph.build("AB", directed={("A", "A"), ("A", "B")})
    assert g.directed == {("A", "B")}


def test_no_plain_edge_into_baseline():
    with pytest.raises(GraphError):
        TailedDirectedGraph.build("AB", baseline={"B"}, directed={("A", "B")})


def test_no_process_edge_into_baseline():
    with pytest.raises(GraphError):
        TailedDirectedGraph.build("AB", baseline={"B"}, tailed={("A", "B")})


def test_ancestors_through_cycle(graph_plain):
    # R sits on the process cycle, so it is its own ancestor
    assert graph_plain.ancestors({"R"}) == {"P", "Q", "R", "S"}
    assert graph_plain.ancestors({"P"}) == set()


def test_tailed_ancestors(graph_tailed):
    assert graph_tailed.tailed_ancestors({"R"}) == {"Q", "S"}
    assert graph_tailed.tailed_ancestors_process({"R"}) == {"Q", "S"}
    assert graph_tailed.tailed_ancestors({"S"}) == set()


def test_tailed_ancestors_exclude_targets():
    g = TailedDirectedGraph.build("ABC", tailed={("A", "B"), ("B", "C")})
    assert g.tailed_ancestors({"B", "C"}) == {"A"}


def test_strip_tails_idempotent(graph_tailed):
    stripped = graph_tailed.strip_tails()
    assert stripped.tailed == frozenset()
    assert stripped.all_edges == graph_tailed.all_edges
    assert stripped.strip_tails() == stripped


def test_remove_edges_out_of(graph_plain):
    aux = graph_plain.remove_edges_out_of({"R"})
    assert ("R", "S") not in aux.all_edges
    assert ("Q", "R") in aux.all_edges


def test_descendants(graph_plain):
    assert graph_plain.descendants({"P"}) == {"S", "Q", "R"}


# -- hypothesis properties ------------------------------------------------


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_ancestor_monotonicity(seed):
    rng = np.random.default_rng(seed)
    g = random_rolled_graph(rng)
    nodes = sorted(g.nodes)
    a = {nodes[int(rng.integers(len(nodes)))]}
    b = a | {nodes[int(rng.integers(len(nodes)))]}
    assert g.ancestors(a) <= g.ancestors(b)
    assert g.tailed_ancestors(a) <= g.ancestors(a) | a


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_strip_then_remove_commutes_with_queries(seed):
    rng = np.random.default_rng(seed)
    g = random_rolled_graph(rng)
    s = g.strip_tails()
    assert s.nodes == g.nodes
    assert s.all_edges == g.all_edges


# -- unrolled DAGs ---------------------------------------------------------


def test_unrolled_validation_backwards_edge():
    with pytest.raises(GraphError):
        UnrolledDag.build(2, {"X"}, set(), {(("X", 2), ("X", 1))})


def test_unrolled_validation_baseline_lag():
    with pytest.raises(GraphError):
        UnrolledDag.build(2, {"X"}, {"B"}, {(("B", 1), ("X", 2))})


def test_unrolled_nodes(dag_plain):
    nodes = dag_plain.node_set()
    assert ("P", 0) in nodes and ("P", 1) not in nodes
    assert ("Q", 2) in nodes


def test_restrict_lags(dag_plain):
    sub = dag_plain.restrict_lags(1)
    assert all(s[1] <= 1 and t[1] <= 1 for s, t in sub.edges)
    assert sub.edges <= dag_plain.edges


def test_unrolled_ancestors(dag_plain):
    anc = dag_plain.ancestors({("R", 1)})
    assert ("Q", 0) in anc and ("R", 0) in anc
    assert ("R", 2) not in anc


# -- DSL --------------------------------------------------------------------


EXAMPLE = """\
# comment line
node P baseline
node Q
node R
node S
P -> S
Q -> R   # trailing comment
S o-> Q
role outcome S
unobserved R
"""


def test_parse_lig_round_trip():
    spec = parse_lig(EXAMPLE)
    assert spec.graph.baseline == {"P"}
    assert ("S", "Q") in spec.graph.tailed
    assert spec.latent == {"R"}
    assert spec.roles == {"outcome": ["S"]}
    text = format_lig(spec.graph, spec.latent, spec.roles)
    assert parse_lig(text).graph == spec.graph


def test_parse_error_carries_line_number():
    with pytest.raises(ParseError) as err:
        parse_lig("node A\nA -> B\n")
    assert err.value.line_number == 2


def test_parse_duplicate_node():
    with pytest.raises(ParseError):
        parse_lig("node A\nnode A\n")


def test_parse_bad_statement():
    with pytest.raises(ParseError) as err:
        parse_lig("node A\nfrobnicate A\n")
    assert "line 2" in str(err.value)


def test_format_unrolled(dag_plain):
    text = format_unrolled_lig(dag_plain)
    assert "node P@0 baseline" in text
    assert "Q@0 -> R@1" in text
