"""Brute-force reference statistics over dense adjacency matrices.

Everything here is computed straight from the configuration definitions
with explicit sums over node tuples, independent of the package's kernels,
so tests can pin the fast implementations against it.
"""

import math

import numpy as np


def naive_statistic(kind, A, y, directed, alpha=None, c=None, w=None):
    A = np.asarray(A, dtype=np.int64)
    y = np.asarray(y, dtype=np.float64)
    n = A.shape[0]
    outdeg = A.sum(axis=1)
    indeg = A.sum(axis=0)
    deg = outdeg if not directed else outdeg + indeg
    mutual = (A * A.T).sum(axis=1)

    if kind == "Density":
        return y.sum()
    if kind == "Activity":
        return float(y @ deg)
    if kind == "GWActivity":
        return float(y @ np.exp(-alpha * deg))
    if kind == "Sender":
        return float(y @ outdeg)
    if kind == "Receiver":
        return float(y @ indeg)
    if kind == "GWSender":
        return float(y @ np.exp(-alpha * outdeg))
    if kind == "GWReceiver":
        return float(y @ np.exp(-alpha * indeg))
    if kind == "Contagion":
        q = float(y @ A @ y)
        return q if directed else q / 2.0
    if kind == "Reciprocity":
        return float(y @ mutual)
    if kind == "ContagionReciprocity":
        return float(y @ (A * A.T) @ y) / 2.0
    if kind == "EgoInTwoStar":
        return float(sum(y[i] * math.comb(int(indeg[i]), 2) for i in range(n)))
    if kind == "EgoOutTwoStar":
        return float(sum(y[i] * math.comb(int(outdeg[i]), 2) for i in range(n)))
    if kind == "EgoInThreeStar":
        return float(sum(y[i] * math.comb(int(indeg[i]), 3) for i in range(n)))
    if kind == "EgoOutThreeStar":
        return float(sum(y[i] * math.comb(int(outdeg[i]), 3) for i in range(n)))
    if kind == "MixedTwoStar":
        return float(y @ (indeg * outdeg - mutual))
    if kind == "MixedTwoStarSource":
        total = 0.0
        for i in range(n):
            for v in range(n):
                total += y[i] * A[i, v] * (outdeg[v] - A[v, i])
        return total
    if kind == "MixedTwoStarSink":
        total = 0.0
        for i in range(n):
            for v in range(n):
                total += y[i] * A[v, i] * (indeg[v] - A[i, v])
        return total
    if kind == "TransitiveTriangleT1":
        return float(np.einsum("i,ji,ik,jk->", y, A, A, A))
    if kind == "TransitiveTriangleD1":
        return float(np.einsum("i,ij,ik,jk->", y, A, A, A))
    if kind == "TransitiveTriangleU1":
        return float(np.einsum("i,ji,ki,jk->", y, A, A, A))
    if kind == "CyclicTriangleC1":
        return float(np.einsum("i,ij,jk,ki->", y, A, A, A))
    if kind == "TransitiveTriangleT3":
        # one count per transitive configuration a->b, b->c, a->c, all three
        # nodes carrying the attribute
        return float(np.einsum("ab,bc,ac,a,b,c->", A, A, A, y, y, y))
    if kind == "CyclicTriangleC3":
        # each all-attribute directed 3-cycle counted once (3 rotations)
        return float(np.einsum("ab,bc,ca,a,b,c->", A, A, A, y, y, y)) / 3.0
    if kind == "AlterInTwoStar2":
        s = A.T @ y  # attribute-bearing in-neighbors per node
        return float(sum(math.comb(int(v), 2) for v in s))
    if kind == "AlterOutTwoStar2":
        s = A @ y
        return float(sum(math.comb(int(v), 2) for v in s))
    if kind == "ContinuousCovariate":
        return float(y @ w)
    if kind == "SenderMatch":
        same = (c[:, None] == c[None, :])
        return float(np.einsum("i,ij,ij->", y, A, same))
    if kind == "ReceiverMatch":
        same = (c[:, None] == c[None, :])
        return float(np.einsum("i,ji,ij->", y, A, same))
    if kind == "ReciprocityMatch":
        same = (c[:, None] == c[None, :])
        return float(np.einsum("i,ij,ji,ij->", y, A, A, same))
    raise ValueError(f"naive oracle has no kind {kind}")


def naive_change(kind, A, y, i, directed, **kw):
    """Change statistic as an explicit statistic difference."""
    y1 = np.array(y, dtype=np.float64)
    y0 = y1.copy()
    y1[i], y0[i] = 1.0, 0.0
    return (naive_statistic(kind, A, y1, directed, **kw)
            - naive_statistic(kind, A, y0, directed, **kw))
