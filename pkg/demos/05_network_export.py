"""A relatedness network with the name-collision floor subtracted.

Edges with link strength at or below zero are kept in the data but left
out of the drawing.  The strongest edges should be the pairs the generator
planted.
"""

import sys
from pathlib import Path

from authornet import build_graph, cross_noise_sample, export_graph, noise_model, overlap_matrix
from authornet.synthetic import default_plan, key_lists, planted_pairs

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo-network")
out.mkdir(exist_ok=True)

plan = default_plan()
lists = key_lists(plan, seed=3)
model = noise_model(cross_noise_sample(lists["alpha"], lists["beta"]))

graph = build_graph(overlap_matrix(lists["alpha"]), model)
print(f"{len(graph.included_edges())} of {len(graph.edges)} edges above the noise floor")
print("planted:", sorted(planted_pairs(plan)["alpha"]))
for e in graph.ranked_edges()[:5]:
    print(f"  {e.area_a} -- {e.area_b}: link strength {e.link_strength:.3e}")

for fmt, ext in [("graphml", "graphml"), ("dot", "dot"), ("json", "json"), ("csv-edgelist", "edges.csv")]:
    (out / f"alpha.{ext}").write_bytes(export_graph(graph, fmt))
print(f"\nwrote {out}/alpha.* (render the dot file with e.g. `neato -Tsvg`)")
