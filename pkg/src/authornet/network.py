"""Noise-corrected relatedness networks and their export.

Nodes are areas.  Every pair of areas gets an edge whose link strength is
its matching probability less the noise floor; edges at or below the
threshold are kept in the data but marked as not included, and renderers
only draw included edges.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

import networkx as nx

from .errors import ConfigurationError, DomainError
from .noise import NoiseModel
from .overlap import PAIR_COLUMNS, OverlapMatrix

EXPORT_FORMATS = ("graphml", "dot", "json", "csv-edgelist")
PENWIDTH_RANGE = (0.5, 8.0)


@dataclass(frozen=True)
class RelatednessEdge:
    area_a: str
    area_b: str
    p_hat: float
    link_strength: float
    included: bool
    n: int = 0
    m: int = 0
    k: int = 0
    undefined: bool = False


@dataclass(frozen=True)
class RelatednessGraph:
    nodes: tuple[str, ...]
    edges: tuple[RelatednessEdge, ...]
    noise_floor: float
    noise_statistic: str = "mean"
    threshold: float = 0.0

    def included_edges(self) -> list[RelatednessEdge]:
        return [e for e in self.edges if e.included]

    def ranked_edges(self) -> list[RelatednessEdge]:
        """Edges by decreasing link strength, ties broken by area names."""
        return sorted(self.edges, key=lambda e: (-e.link_strength, e.area_a, e.area_b))


def link_strength(p_hat: float, noise: NoiseModel, statistic: str = "mean") -> float:
    """Matching probability less the noise floor (the noise mean by default)."""
    return p_hat - noise.floor(statistic)


def build_graph(
    matrix: OverlapMatrix, noise: NoiseModel | None, threshold: float = 0.0, statistic: str = "mean"
) -> RelatednessGraph:
    if noise is None:
        raise ConfigurationError("a noise model is required to build a relatedness graph")
    if not threshold >= 0:
        raise DomainError(f"threshold must be >= 0, got {threshold!r}")
    floor = noise.floor(statistic)
    edges = []
    for c in matrix.cells:
        l = c.p_hat - floor
        edges.append(RelatednessEdge(c.area_a, c.area_b, c.p_hat, l, l > threshold, c.n, c.m, c.k, c.undefined))
    return RelatednessGraph(tuple(matrix.areas), tuple(edges), floor, statistic, float(threshold))


def penwidths(graph: RelatednessGraph) -> dict[tuple[str, str], float]:
    """Line widths for included edges, min-max scaled within this graph."""
    included = graph.included_edges()
    if not included:
        return {}
    lo_w, hi_w = PENWIDTH_RANGE
    strengths = [e.link_strength for e in included]
    lo, hi = min(strengths), max(strengths)
    if hi == lo:
        return {(e.area_a, e.area_b): (lo_w + hi_w) / 2 for e in included}
    return {(e.area_a, e.area_b): lo_w + (e.link_strength - lo) / (hi - lo) * (hi_w - lo_w) for e in included}


def _float_out(x):
    return x if math.isfinite(x) else repr(x)


def _float_in(x):
    return float(x)


def graph_to_json(graph: RelatednessGraph) -> str:
    doc = {
        "noise_floor": _float_out(graph.noise_floor),
        "noise_statistic": graph.noise_statistic,
        "threshold": _float_out(graph.threshold),
        "nodes": [{"id": name} for name in graph.nodes],
        "edges": [
            {
                "source": e.area_a, "target": e.area_b, "p_hat": e.p_hat,
                "link_strength": e.link_strength, "included": e.included,
                "n": e.n, "m": e.m, "k": e.k, "undefined": e.undefined,
            }
            for e in graph.edges
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def graph_from_json(text: str | bytes) -> RelatednessGraph:
    doc = json.loads(text)
    edges = tuple(
        RelatednessEdge(
            e["source"], e["target"], float(e["p_hat"]), float(e["link_strength"]), bool(e["included"]),
            int(e.get("n", 0)), int(e.get("m", 0)), int(e.get("k", 0)), bool(e.get("undefined", False)),
        )
        for e in doc["edges"]
    )
    return RelatednessGraph(
        tuple(n["id"] for n in doc["nodes"]), edges,
        _float_in(doc["noise_floor"]), doc.get("noise_statistic", "mean"), _float_in(doc["threshold"]),
    )


def _graphml(graph):
    g = nx.Graph(noise_floor=graph.noise_floor, noise_statistic=graph.noise_statistic,
                 threshold=str(graph.threshold))
    g.add_nodes_from(graph.nodes)
    for e in graph.edges:
        g.add_edge(
            e.area_a, e.area_b, p_hat=e.p_hat, link_strength=e.link_strength,
            included=e.included, k=e.k, n=e.n, m=e.m,
        )
    return "\n".join(nx.generate_graphml(g, encoding="utf-8", prettyprint=True)) + "\n"


def _dot_id(name):
    # only the double quote is an escape inside DOT quoted strings
    return '"' + name.replace('"', '\\"') + '"'


def _dot(graph):
    widths = penwidths(graph)
    lines = ["graph relatedness {", "  node [shape=ellipse];"]
    for name in graph.nodes:
        lines.append(f"  {_dot_id(name)};")
    for e in graph.included_edges():
        w = widths[(e.area_a, e.area_b)]
        lines.append(
            f"  {_dot_id(e.area_a)} -- {_dot_id(e.area_b)} "
            f'[penwidth={w:.4f}, link_strength="{e.link_strength!r}"];'
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


def _csv(graph):
    buf = io.StringIO(newline="")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([*PAIR_COLUMNS, "link_strength", "included"])
    for e in graph.edges:
        writer.writerow([
            e.area_a, e.area_b, e.n, e.m, e.k, repr(e.p_hat), int(e.undefined),
            repr(e.link_strength), int(e.included),
        ])
    return buf.getvalue()


def export_graph(graph: RelatednessGraph, format: str) -> bytes:
    """Serialize ``graph`` as UTF-8 ``graphml``, ``dot``, ``json`` or ``csv-edgelist``.

    Only included edges appear in ``dot``; the other formats carry every
    edge with its ``included`` flag.
    """
    if format == "graphml":
        text = _graphml(graph)
    elif format == "dot":
        text = _dot(graph)
    elif format == "json":
        text = graph_to_json(graph)
    elif format == "csv-edgelist":
        text = _csv(graph)
    else:
        raise ValueError(f"unknown export format {format!r}; expected one of {EXPORT_FORMATS}")
    return text.encode("utf-8")
