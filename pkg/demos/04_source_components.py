"""
Source components decide the outcome
====================================

If the graph is not strongly connected, consensus is only possible when
every source component (a component nobody outside can influence) settles
on the same belief. Agent ids below are 0-based in code and 1-based in
printed output. Two independent conf triangles feed a chain of three
followers.
"""

from biasdyn import bias as bz
from biasdyn import build_graph, predict_consensus, run_to_verdict, simulate, strongly_connected_components

c = bz.conf()
edges = []
for base in (0, 3):
    for k in range(3):
        edges.append((base + k, base + (k + 1) % 3, 0.7, c))
        edges.append((base + k, base + k, 0.3, c))
edges += [(1, 6, 0.5, c), (4, 6, 0.5, c), (6, 7, 1.0, c), (7, 8, 0.8, c), (8, 8, 0.2, c)]
g = build_graph(9, edges)

# %%
parts = strongly_connected_components(g)
for comp, is_src in zip(parts.components, parts.source_flags):
    print(sorted(a + 1 for a in comp), "source" if is_src else "")

# %%
# Identical source triangles agree, so everybody does.
same = [0.2, 0.9, 0.5, 0.2, 0.9, 0.5, 0.0, 1.0, 0.3]
print(predict_consensus(g, same))
print(run_to_verdict(g, same, 100_000, eps_consensus=1e-4))

# %%
# Sources pinned at 0 and 1 can never be reconciled.
apart = [0, 0, 0, 1, 1, 1, 0.5, 0.5, 0.5]
print(predict_consensus(g, apart))
print("smallest gap over 10**4 steps:", simulate(g, apart, 10_000).gap.min())
