"""Write the seeded 5000-node heavy-tailed benchmark network to disk.

This is the generation script for the sweep/estimation benchmark fixture;
regenerating from the seed always gives the identical edge list.
"""

import sys
from pathlib import Path

import alaam

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("demo_out/fixture.edges")
out.parent.mkdir(parents=True, exist_ok=True)
g = alaam.heavy_tailed_graph(n=5000, seed=20240901)
g.write_edge_list(out)
print(f"{g} -> {out}")
print(f"mean degree {2 * g.edge_count / g.n:.2f}, max degree {int(g.deg.max())}")
