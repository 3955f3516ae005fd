"""Load a network and attributes, report the descriptive statistics.

Builds a small seeded network on disk first, so the demo shows the actual
file formats the loaders expect.
"""

from pathlib import Path

import numpy as np

import alaam

work = Path("demo_out/01")
work.mkdir(parents=True, exist_ok=True)

# a toy directed friendship network, plain edge list with comments
edges = work / "friends.edges"
rng = np.random.default_rng(1)
lines = ["# one arc per line, ids are arbitrary tokens"]
for u in range(40):
    for v in rng.choice(40, size=rng.integers(2, 7), replace=False):
        if v != u:
            lines.append(f"s{u} s{v}")
edges.write_text("\n".join(lines) + "\n")

g = alaam.load_graph(edges, directed=True)
print(g)
print(alaam.descriptive_stats(g).to_text())

# attributes: header row, a #types line, one row per node (loader order)
attrs = work / "friends.attrs"
male = rng.integers(0, 2, size=g.n)
age = np.round(rng.normal(16, 1.2, size=g.n), 1)
rows = ["male,age", "#types male:binary,age:continuous"]
rows += [f"{male[i]},{age[i]}" for i in range(g.n)]
attrs.write_text("\n".join(rows) + "\n")

w = alaam.load_covariates(attrs, g.n)
y = alaam.outcome_from(w, "male")
print()
print(alaam.outcome_degree_stats(g, y).to_text())
