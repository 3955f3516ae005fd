"""Seeded synthetic network generators for experiments and tests.

Shipping generators instead of redistributing datasets keeps every fixture
reproducible from a seed.
"""

from __future__ import annotations

import numpy as np

from .graph import Graph


def heavy_tailed_graph(n: int = 5000, max_attach: int = 30,
                       seed: int = 20240901) -> Graph:
    """Undirected preferential-attachment graph with a skewed degree profile.

    Each new node attaches k edges to existing nodes chosen proportionally
    to degree, with k drawn from P(k) proportional to 1/k on 1..max_attach,
    so the graph has both hubs and a thick population of low-degree nodes.
    The defaults give mean degree around 15, matching large online social
    networks.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    core = 5  # small complete core to seed preferential attachment
    edges = [(i, j) for i in range(core) for j in range(i + 1, core)]
    # endpoint multiset: sampling from it is degree-proportional choice
    endpoints = [v for e in edges for v in e]

    ks = np.arange(1, max_attach + 1)
    pk = (1.0 / ks) / (1.0 / ks).sum()

    for v in range(core, n):
        k = min(int(rng.choice(ks, p=pk)), v)
        targets: set[int] = set()
        while len(targets) < k:
            targets.add(int(endpoints[rng.integers(len(endpoints))]))
        for t in sorted(targets):
            edges.append((t, v))
            endpoints.append(t)
            endpoints.append(v)
    return Graph(np.array(edges, dtype=np.int64), n, directed=False)


def gnp_graph(n: int, mean_degree: float, seed: int, directed: bool = False) -> Graph:
    """Sparse uniformly random graph with the requested mean degree."""
    rng = np.random.Generator(np.random.PCG64(seed))
    m_target = int(round(n * mean_degree / (1 if directed else 2)))
    pairs: set[tuple[int, int]] = set()
    while len(pairs) < m_target:
        need = m_target - len(pairs)
        u = rng.integers(n, size=2 * need + 8)
        v = rng.integers(n, size=2 * need + 8)
        for a, b in zip(u, v):
            if a == b:
                continue
            key = (int(a), int(b)) if directed else (min(int(a), int(b)), max(int(a), int(b)))
            pairs.add(key)
            if len(pairs) == m_target:
                break
    edges = np.array(sorted(pairs), dtype=np.int64)
    return Graph(edges, n, directed=directed)
