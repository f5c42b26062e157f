import json
import math
import xml.etree.ElementTree as ET
from dataclasses import replace

import pytest
from hypothesis import given
from hypothesis import strategies as st

from authornet.errors import ConfigurationError, DomainError
from authornet.ingest import AreaAuthorList, AuthorKey
from authornet.network import (
    EXPORT_FORMATS,
    PENWIDTH_RANGE,
    RelatednessEdge,
    RelatednessGraph,
    build_graph,
    export_graph,
    graph_from_json,
    graph_to_json,
    link_strength,
    penwidths,
)
from authornet.noise import NoiseModel, ProbabilitySample, noise_model
from authornet.overlap import OverlapMatrix, PairOverlap, overlap_matrix

pygraphviz = pytest.importorskip("pygraphviz")

GRAPHML_NS = "{http://graphml.graphdrawing.org/xmlns}"


def model(mean, median=None):
    return NoiseModel(mean if median is None else median, mean, ProbabilitySample((), "cross-domain", ()))


PUBLISHED = model(1.80e-6, 1.62e-6)


def keys(prefix, count):
    return frozenset(AuthorKey(f"{prefix}{i}") for i in range(count))


def three_area_fixture():
    # a and b share 5 of 10 and 20; c shares nothing with either.
    shared = keys("s", 5)
    return overlap_matrix([
        AreaAuthorList("a", shared | keys("a", 5)),
        AreaAuthorList("b", shared | keys("b", 15)),
        AreaAuthorList("c", keys("c", 30)),
    ])


def matrix_of(values):
    """A matrix over ``len`` areas filled with the given p_hat values in pair order."""
    n = 2
    while n * (n - 1) // 2 < len(values):
        n += 1
    assert n * (n - 1) // 2 == len(values)
    areas = [f"x{i:02d}" for i in range(n)]
    cells, it = [], iter(values)
    for i in range(n):
        for j in range(i + 1, n):
            cells.append(PairOverlap(areas[i], areas[j], 100, 200, 1, next(it), False))
    return OverlapMatrix(tuple(areas), tuple(cells))


def test_link_strength_examples():
    assert link_strength(1.80e-6, PUBLISHED) == 0
    assert link_strength(0.0, PUBLISHED) < 0
    assert link_strength(5.0e-6, PUBLISHED) == pytest.approx(3.2e-6, rel=1e-12)
    assert link_strength(5.0e-6, PUBLISHED, "median") == pytest.approx(3.38e-6, rel=1e-12)


def test_all_at_floor_gives_no_included_edges():
    g = build_graph(matrix_of([1.8e-6] * 6), model(1.8e-6))
    assert len(g.nodes) == 4 and len(g.edges) == 6
    assert g.included_edges() == []


def test_planted_fixture_one_strong_edge():
    mat = three_area_fixture()
    floor = noise_model(ProbabilitySample((0.0, 1e-4), "cross-domain", (("u", "v"), ("u", "w")))).mean_p0
    g = build_graph(mat, model(floor))
    included = g.included_edges()
    assert [(e.area_a, e.area_b) for e in included] == [("a", "b")]
    assert included[0].link_strength == pytest.approx(1 - 0.5 ** (1 / 20) - 5e-5, rel=1e-12)
    assert g.ranked_edges()[0] == included[0]


def test_infinite_threshold_keeps_nodes():
    g = build_graph(three_area_fixture(), model(0.0), threshold=math.inf)
    assert g.nodes == ("a", "b", "c") and len(g.edges) == 3 and not g.included_edges()


def test_build_errors():
    with pytest.raises(ConfigurationError):
        build_graph(three_area_fixture(), None)
    with pytest.raises(DomainError):
        build_graph(three_area_fixture(), model(0.0), threshold=-1e-9)
    with pytest.raises(DomainError):
        build_graph(three_area_fixture(), model(0.0), threshold=math.nan)


def test_graph_structure_invariants():
    g = build_graph(three_area_fixture(), model(0.0))
    pairs = [frozenset((e.area_a, e.area_b)) for e in g.edges]
    assert len(set(pairs)) == len(pairs)
    assert all(len(p) == 2 and p <= set(g.nodes) for p in pairs)
    for e in g.edges:
        assert e.link_strength == e.p_hat - g.noise_floor
        assert e.included == (e.link_strength > g.threshold)


probs = st.lists(st.floats(0, 1e-3), min_size=6, max_size=6)


@given(probs, st.floats(0, 5e-4), st.floats(0, 5e-4), st.floats(0, 5e-4))
def test_monotone_thresholding(values, floor, t1, t2):
    t1, t2 = sorted((t1, t2))
    mat = matrix_of(values)
    low = {(e.area_a, e.area_b) for e in build_graph(mat, model(floor), t1).included_edges()}
    high = {(e.area_a, e.area_b) for e in build_graph(mat, model(floor), t2).included_edges()}
    assert high <= low


@given(st.lists(st.integers(0, 10**6), min_size=6, max_size=6), st.integers(1, 10**6))
def test_constant_shift_keeps_ranking(raw, shift):
    # dyadic values keep the shifted subtraction exact
    values = [v * 2.0**-30 for v in raw]
    c = shift * 2.0**-30
    base = build_graph(matrix_of(values), model(0.0))
    moved = build_graph(matrix_of([v + c for v in values]), model(0.0))
    for e0, e1 in zip(base.edges, moved.edges):
        assert e1.link_strength == e0.link_strength + c
    assert [(e.area_a, e.area_b) for e in base.ranked_edges()] == [(e.area_a, e.area_b) for e in moved.ranked_edges()]


@given(probs)
def test_penwidth_order_preserving(values):
    g = build_graph(matrix_of(values), model(1e-4))
    widths = penwidths(g)
    inc = g.included_edges()
    assert set(widths) == {(e.area_a, e.area_b) for e in inc}
    for e in inc:
        assert PENWIDTH_RANGE[0] <= widths[(e.area_a, e.area_b)] <= PENWIDTH_RANGE[1]
        for f in inc:
            if e.link_strength < f.link_strength:
                assert widths[(e.area_a, e.area_b)] <= widths[(f.area_a, f.area_b)]


def test_penwidth_extremes():
    g = build_graph(matrix_of([1e-5, 3e-5, 2e-5]), model(0.0))
    assert sorted(penwidths(g).values()) == pytest.approx([0.5, 4.25, 8.0], abs=1e-12)


# -- export ----------------------------------------------------------------

def empty_graph():
    return RelatednessGraph(("solo", "pair"), (), 1e-6)


def two_node_graph():
    return RelatednessGraph(
        ("a", "b"), (RelatednessEdge("a", "b", 0.1 + 0.2, 0.1 + 0.2 - 1e-6, True, 3, 4, 1),), 1e-6,
    )


@pytest.mark.parametrize("fmt", EXPORT_FORMATS)
def test_empty_edge_graph_exports(fmt):
    data = export_graph(empty_graph(), fmt)
    text = data.decode("utf-8")
    if fmt == "graphml":
        root = ET.fromstring(data)
        assert len(root.findall(f".//{GRAPHML_NS}node")) == 2
        assert not root.findall(f".//{GRAPHML_NS}edge")
    elif fmt == "dot":
        g = pygraphviz.AGraph(string=text)
        assert set(g.nodes()) == {"solo", "pair"} and not g.edges()
    elif fmt == "json":
        doc = json.loads(text)
        assert [n["id"] for n in doc["nodes"]] == ["solo", "pair"] and doc["edges"] == []
    else:
        assert text.splitlines() == ["area_a,area_b,n,m,k,p_hat,undefined,link_strength,included"]


def test_two_node_json_round_trip():
    g = two_node_graph()
    assert graph_from_json(export_graph(g, "json")) == g


@given(probs, st.floats(0, 1e-3), st.one_of(st.floats(0, 1e-3), st.just(math.inf)))
def test_json_round_trip_bit_exact(values, floor, threshold):
    g = build_graph(matrix_of(values), model(floor), threshold)
    back = graph_from_json(graph_to_json(g))
    assert back == g
    assert [e.link_strength.hex() for e in back.edges] == [e.link_strength.hex() for e in g.edges]


def test_graphml_carries_real_link_strength():
    root = ET.fromstring(export_graph(build_graph(three_area_fixture(), model(0.0)), "graphml"))
    keys_by_id = {k.get("id"): k for k in root.findall(f"{GRAPHML_NS}key")}
    ls_key = next(k for k in keys_by_id.values() if k.get("attr.name") == "link_strength")
    assert ls_key.get("for") == "edge" and ls_key.get("attr.type") == "double"
    edges = root.findall(f".//{GRAPHML_NS}edge")
    assert len(edges) == 3
    values = [float(d.text) for e in edges for d in e if d.get("key") == ls_key.get("id")]
    assert len(values) == 3


def test_dot_renders_without_warnings(capfd):
    g = build_graph(three_area_fixture(), model(0.0))
    ag = pygraphviz.AGraph(string=export_graph(g, "dot").decode())
    ag.layout("neato")
    assert ag.draw(format="svg")
    assert not ag.directed
    assert ag.number_of_edges() == len(g.included_edges())
    assert "Warning" not in capfd.readouterr().err


def test_dot_quotes_odd_names():
    g = RelatednessGraph(('x "y"', "back\\slash"), (RelatednessEdge('x "y"', "back\\slash", 0.2, 0.1, True),), 0.1)
    ag = pygraphviz.AGraph(string=export_graph(g, "dot").decode())
    assert set(ag.nodes()) == {'x "y"', "back\\slash"}


def test_csv_edgelist_mirrors_pairs():
    g = build_graph(three_area_fixture(), model(0.0))
    rows = export_graph(g, "csv-edgelist").decode().splitlines()
    assert len(rows) == 4
    assert rows[1].startswith("a,b,10,20,5,")
    assert rows[1].endswith(",1")


def test_unknown_format():
    with pytest.raises(ValueError):
        export_graph(empty_graph(), "png")


def test_excluded_edges_kept_in_json():
    g = build_graph(three_area_fixture(), model(0.0), threshold=0.5)
    doc = json.loads(graph_to_json(g))
    assert len(doc["edges"]) == 3 and not any(e["included"] for e in doc["edges"])
    assert replace(g) == graph_from_json(graph_to_json(g))
