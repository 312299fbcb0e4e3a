"""Inside OLA: the full-domain lattice, predictive tagging and k-minimal nodes.

Every node of the lattice assigns one generalisation level per QID. OLA
bisects the lattice at median heights, tags nodes k-anonymous or not, and
lets monotonicity propagate each answer up or down, so only a fraction of
nodes is ever checked directly. The cheapest k-minimal node wins.
"""

from anonylat import AlgoParams, MetricKind, ola_search
from anonylat.datagen import synthetic_census
from anonylat.oracle import exhaustive_ola

table, hierarchies = synthetic_census(n=300, seed=8)
heights = tuple(hierarchies[a.name].height for a in table.qids)
print("QIDs:", [a.name for a in table.qids])
print("hierarchy heights:", heights)

params = AlgoParams(k=10, max_sup=0.03, metric=MetricKind.GWEIGHT)
result = ola_search(table, hierarchies, params)

print(f"\nlattice nodes:    {result.lattice_nodes}")
print(f"directly checked: {result.checked_nodes} "
      f"(predictive tagging saved "
      f"{result.lattice_nodes - result.checked_nodes} checks)")
print(f"k-minimal nodes:  {len(result.k_minimal)}")
for node, loss in sorted(result.k_minimal)[:8]:
    marker = "  <- chosen" if node == result.node else ""
    print(f"  node {node}  gweight={loss:.3f}{marker}")

print(f"\nchosen node {result.node}, loss {result.loss:.3f}, "
      f"{result.partition.num_classes} classes, "
      f"{result.partition.suppressed_count} rows suppressed")

# The brute-force oracle enumerates every node and must agree exactly.
node, loss = exhaustive_ola(table, hierarchies, params)
print(f"exhaustive oracle: node {node}, loss {loss:.3f} "
      f"(equal: {loss == result.loss})")

# The same search under a different metric may pick a different node:
for metric in MetricKind:
    r = ola_search(table, hierarchies,
                   AlgoParams(k=10, max_sup=0.03, metric=metric))
    print(f"  metric {metric.value:8} -> node {r.node} "
          f"({r.partition.num_classes} classes)")
