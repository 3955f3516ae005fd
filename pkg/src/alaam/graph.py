"""Immutable network representation, attribute tables, and file ingestion.

The network is stored in CSR form with per-node sorted neighbor arrays, so
edge queries are O(log degree) and degree lookups are O(1). Graphs and
covariate tables never mutate after construction and are safe to share
across worker threads.
"""

from __future__ import annotations

import hashlib
import math
import warnings
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components


class GraphFormatError(ValueError):
    """Malformed edge-list or attribute file."""


class CovariateError(ValueError):
    """Bad covariate table: unknown column, wrong type, wrong length."""


COVARIATE_KINDS = ("continuous", "binary", "categorical")


def _build_csr(n: int, src: np.ndarray, dst: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """CSR (indptr, indices) with indices sorted within each row."""
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, src + 1, 1)
    np.cumsum(indptr, out=indptr)
    return indptr, np.ascontiguousarray(dst, dtype=np.int64)


class Graph:
    """Fixed network over nodes 0..n-1, directed or undirected.

    Parameters
    ----------
    edges : (m, 2) int array of endpoints. For undirected graphs each edge
        is given once in either orientation. Self-loops and duplicates are
        rejected here; the file loader strips them first.
    n : node count (must cover all endpoints).
    directed : arc vs edge semantics.
    labels : optional original node identifiers, index-aligned.
    """

    def __init__(self, edges, n: int, directed: bool, labels: Sequence[str] | None = None):
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if n <= 0:
            raise GraphFormatError("graph has no nodes")
        if edges.size and (edges.min() < 0 or edges.max() >= n):
            raise GraphFormatError("edge endpoint out of range")
        if np.any(edges[:, 0] == edges[:, 1]):
            raise GraphFormatError("self-loops are not allowed")

        if not directed:
            lo = np.minimum(edges[:, 0], edges[:, 1])
            hi = np.maximum(edges[:, 0], edges[:, 1])
            edges = np.stack([lo, hi], axis=1)
        keys = edges[:, 0] * n + edges[:, 1]
        if np.unique(keys).size != keys.size:
            raise GraphFormatError("duplicate edges are not allowed")

        self.n = int(n)
        self.directed = bool(directed)
        self.labels = tuple(str(x) for x in labels) if labels is not None else None

        if directed:
            src, dst = edges[:, 0], edges[:, 1]
        else:
            # store both orientations so out_neighbors is the full neighborhood
            src = np.concatenate([edges[:, 0], edges[:, 1]])
            dst = np.concatenate([edges[:, 1], edges[:, 0]])
        self.out_indptr, self.out_indices = _build_csr(n, src, dst)
        if directed:
            self.in_indptr, self.in_indices = _build_csr(n, dst, src)
        else:
            self.in_indptr, self.in_indices = self.out_indptr, self.out_indices
        for a in (self.out_indptr, self.out_indices, self.in_indptr, self.in_indices):
            a.setflags(write=False)

        self.deg_out = np.diff(self.out_indptr)
        self.deg_in = np.diff(self.in_indptr)
        # total degree: neighbor count (undirected) or in+out (directed)
        self.deg = self.deg_out if not directed else self.deg_out + self.deg_in
        self._edge_count = int(edges.shape[0])

        if directed:
            self.mut_indptr, self.mut_indices = self._mutual_adjacency()
        else:
            self.mut_indptr = np.zeros(n + 1, dtype=np.int64)
            self.mut_indices = np.empty(0, dtype=np.int64)
        self.mut_degree = np.diff(self.mut_indptr)

    def _mutual_adjacency(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-node sorted lists of j with both i->j and j->i present."""
        chunks = []
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        for i in range(self.n):
            mut = np.intersect1d(self.out_neighbors(i), self.in_neighbors(i),
                                 assume_unique=True)
            indptr[i + 1] = indptr[i] + mut.size
            chunks.append(mut)
        indices = np.concatenate(chunks) if chunks else np.empty(0, dtype=np.int64)
        return indptr, np.ascontiguousarray(indices, dtype=np.int64)

    # --- queries -----------------------------------------------------------

    def out_neighbors(self, i: int) -> np.ndarray:
        return self.out_indices[self.out_indptr[i]:self.out_indptr[i + 1]]

    def in_neighbors(self, i: int) -> np.ndarray:
        return self.in_indices[self.in_indptr[i]:self.in_indptr[i + 1]]

    def mutual_neighbors(self, i: int) -> np.ndarray:
        return self.mut_indices[self.mut_indptr[i]:self.mut_indptr[i + 1]]

    def has_edge(self, i: int, j: int) -> bool:
        """True iff arc i->j (or edge {i,j} when undirected) exists."""
        row = self.out_neighbors(i)
        k = np.searchsorted(row, j)
        return k < row.size and row[k] == j

    @property
    def edge_count(self) -> int:
        """Number of arcs (directed) or edges (undirected)."""
        return self._edge_count

    def density(self) -> float:
        pairs = self.n * (self.n - 1)
        if not self.directed:
            pairs //= 2
        return self._edge_count / pairs if pairs else math.nan

    def digest(self) -> str:
        """Stable content hash of the adjacency structure."""
        h = hashlib.sha256()
        h.update(f"{self.n}|{int(self.directed)}".encode())
        h.update(self.out_indptr.tobytes())
        h.update(self.out_indices.tobytes())
        return h.hexdigest()

    def to_scipy(self, symmetric: bool = False) -> sp.csr_matrix:
        """Adjacency as scipy CSR; symmetric=True gives the undirected skeleton."""
        data = np.ones(self.out_indices.size, dtype=np.int8)
        a = sp.csr_matrix((data, self.out_indices.copy(), self.out_indptr.copy()),
                          shape=(self.n, self.n))
        if symmetric and self.directed:
            a = a.maximum(a.T)
        return a

    def edge_array(self) -> np.ndarray:
        """(m, 2) endpoints, one row per arc/edge."""
        src = np.repeat(np.arange(self.n, dtype=np.int64), self.deg_out)
        pairs = np.stack([src, self.out_indices], axis=1)
        if not self.directed:
            pairs = pairs[pairs[:, 0] < pairs[:, 1]]
        return pairs

    def write_edge_list(self, path) -> None:
        """Write one edge per line using original labels when available."""
        pairs = self.edge_array()
        with open(path, "w") as f:
            for u, v in pairs:
                if self.labels is not None:
                    f.write(f"{self.labels[u]} {self.labels[v]}\n")
                else:
                    f.write(f"{u} {v}\n")

    def __repr__(self) -> str:
        kind = "directed" if self.directed else "undirected"
        return f"Graph(n={self.n}, {kind}, {self._edge_count} {'arcs' if self.directed else 'edges'})"


def load_graph(path, directed: bool) -> Graph:
    """Read a whitespace-separated edge list.

    Node identifiers are arbitrary tokens, remapped to dense 0-based indices
    in first-appearance order; the mapping is kept on ``Graph.labels``.
    Lines starting with ``#`` and blank lines are skipped. Duplicate edges
    collapse; self-loops are dropped with a counted warning.
    """
    ids: dict[str, int] = {}
    src: list[int] = []
    dst: list[int] = []
    loops = 0
    with open(path) as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            tokens = line.split()
            if len(tokens) != 2:
                raise GraphFormatError(
                    f"{path}: line {lineno}: expected two node identifiers, got {len(tokens)}")
            u = ids.setdefault(tokens[0], len(ids))
            v = ids.setdefault(tokens[1], len(ids))
            if u == v:
                loops += 1
                continue
            src.append(u)
            dst.append(v)
    if not src:
        raise GraphFormatError(f"{path}: empty graph (no edges)")
    if loops:
        warnings.warn(f"{path}: dropped {loops} self-loop(s)", stacklevel=2)
    n = len(ids)
    edges = np.stack([np.array(src, dtype=np.int64), np.array(dst, dtype=np.int64)], axis=1)
    # collapse duplicates (and both orientations of an undirected edge)
    if not directed:
        lo = np.minimum(edges[:, 0], edges[:, 1])
        hi = np.maximum(edges[:, 0], edges[:, 1])
        edges = np.stack([lo, hi], axis=1)
    edges = np.unique(edges, axis=0)
    labels = [None] * n
    for token, idx in ids.items():
        labels[idx] = token
    return Graph(edges, n, directed, labels=labels)


class CovariateTable:
    """Typed per-node covariate columns.

    Each column is continuous (float), binary (0/1), or categorical
    (non-negative integer codes). Every column has exactly n entries.
    """

    def __init__(self, n: int, columns: Mapping[str, tuple[str, np.ndarray]] | None = None):
        self.n = int(n)
        self._cols: dict[str, tuple[str, np.ndarray]] = {}
        for name, (kind, values) in (columns or {}).items():
            self.add(name, kind, values)

    def add(self, name: str, kind: str, values) -> None:
        if kind not in COVARIATE_KINDS:
            raise CovariateError(f"column {name!r}: unknown kind {kind!r}")
        arr = np.asarray(values)
        if arr.shape != (self.n,):
            raise CovariateError(
                f"column {name!r}: {arr.shape[0] if arr.ndim else 0} entries for {self.n} nodes")
        if kind == "continuous":
            arr = arr.astype(np.float64)
        else:
            as_float = arr.astype(np.float64)
            arr = as_float.astype(np.int64)
            if np.any(arr != as_float):
                raise CovariateError(f"column {name!r}: non-integer value in {kind} column")
            if kind == "binary" and not np.isin(arr, (0, 1)).all():
                raise CovariateError(f"column {name!r}: binary column has values outside {{0,1}}")
            if kind == "categorical" and arr.min(initial=0) < 0:
                raise CovariateError(f"column {name!r}: negative categorical code")
        arr.setflags(write=False)
        self._cols[name] = (kind, arr)

    def names(self) -> list[str]:
        return list(self._cols)

    def kind(self, name: str) -> str:
        self._require(name)
        return self._cols[name][0]

    def values(self, name: str) -> np.ndarray:
        self._require(name)
        return self._cols[name][1]

    def _require(self, name: str) -> None:
        if name not in self._cols:
            raise CovariateError(
                f"no covariate column {name!r}; have {sorted(self._cols)}")

    def __contains__(self, name: str) -> bool:
        return name in self._cols

    def __repr__(self) -> str:
        spec = ", ".join(f"{k}:{v[0]}" for k, v in self._cols.items())
        return f"CovariateTable(n={self.n}, {spec})"


def parse_attr_types(spec: str) -> dict[str, str]:
    """Parse ``name:kind,name:kind`` column type declarations."""
    out: dict[str, str] = {}
    for part in spec.replace(";", ",").split(","):
        part = part.strip()
        if not part:
            continue
        if ":" not in part:
            raise CovariateError(f"bad column type {part!r}; expected name:kind")
        name, kind = part.split(":", 1)
        out[name.strip()] = kind.strip()
    return out


def load_covariates(path, n: int, types: Mapping[str, str] | None = None) -> CovariateTable:
    """Read a delimited attribute file: header row, then one row per node.

    Column types come from ``types`` or from a ``#types name:kind,...`` line
    directly after the header; they are never guessed from the data.
    Delimiter is comma when the header contains one, else whitespace.
    """
    with open(path) as f:
        lines = [ln.rstrip("\n") for ln in f]
    lines = [ln for ln in lines if ln.strip()]
    if not lines:
        raise CovariateError(f"{path}: empty attribute file")
    sep = "," if "," in lines[0] else None
    header = [h.strip() for h in lines[0].split(sep)]
    body = lines[1:]
    declared: dict[str, str] = dict(types or {})
    if body and body[0].lstrip().startswith("#types"):
        declared = {**parse_attr_types(body[0].split("#types", 1)[1]), **declared}
        body = body[1:]
    body = [ln for ln in body if not ln.lstrip().startswith("#")]
    missing = [c for c in header if c not in declared]
    if missing:
        raise CovariateError(
            f"{path}: no type declared for column(s) {missing}; "
            "pass --attr-types or add a '#types name:kind,...' line")
    if len(body) != n:
        raise CovariateError(f"{path}: {len(body)} data rows for {n} nodes")

    raw = np.empty((n, len(header)), dtype=np.float64)
    for r, line in enumerate(body):
        cells = [c.strip() for c in line.split(sep)]
        if len(cells) != len(header):
            raise CovariateError(
                f"{path}: row {r + 2}: {len(cells)} cells for {len(header)} columns")
        for c, cell in enumerate(cells):
            try:
                raw[r, c] = float(cell)
            except ValueError:
                raise CovariateError(
                    f"{path}: row {r + 2}, column {header[c]!r}: "
                    f"non-numeric value {cell!r}") from None
    table = CovariateTable(n)
    for c, name in enumerate(header):
        table.add(name, declared[name], raw[:, c])
    return table


class OutcomeVector:
    """Binary outcome assignment with an optional free/fixed node mask.

    Fixed nodes (``free=False``) never change under sampling.
    """

    def __init__(self, values, free=None):
        arr = np.asarray(values)
        if not np.isin(arr, (0, 1)).all():
            raise ValueError("outcome values must be 0 or 1")
        self.values = np.ascontiguousarray(arr, dtype=np.int8)
        if free is None:
            self.free = np.ones(self.values.size, dtype=np.bool_)
        else:
            self.free = np.asarray(free, dtype=np.bool_)
            if self.free.shape != self.values.shape:
                raise ValueError("free mask length must match outcome length")

    @property
    def n(self) -> int:
        return self.values.size

    def density(self) -> float:
        return float(self.values.mean())

    def copy(self) -> "OutcomeVector":
        return OutcomeVector(self.values.copy(), self.free.copy())

    @classmethod
    def zeros(cls, n: int) -> "OutcomeVector":
        return cls(np.zeros(n, dtype=np.int8))

    @classmethod
    def random(cls, n: int, p: float, rng: np.random.Generator) -> "OutcomeVector":
        return cls((rng.random(n) < p).astype(np.int8))

    def __repr__(self) -> str:
        return f"OutcomeVector(n={self.n}, ones={int(self.values.sum())}, free={int(self.free.sum())})"


def outcome_from(table: CovariateTable, column: str, free=None) -> OutcomeVector:
    """Use a binary covariate column as the modeled outcome vector."""
    if table.kind(column) != "binary":
        raise CovariateError(f"outcome column {column!r} must be binary, is {table.kind(column)}")
    return OutcomeVector(table.values(column), free=free)


# --- descriptive reports ----------------------------------------------------


@dataclass(frozen=True)
class GraphReport:
    nodes: int
    directed: bool
    giant_component: int
    mean_degree: float
    max_in_degree: int
    max_out_degree: int
    density: float
    clustering: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)

    def to_text(self) -> str:
        return "\n".join(f"{k} = {v}" for k, v in self.as_dict().items())


@dataclass(frozen=True)
class OutcomeDegreeReport:
    percent_ones: float
    mean_in_degree_0: float
    mean_out_degree_0: float
    mean_in_degree_1: float
    mean_out_degree_1: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)

    def to_text(self) -> str:
        def fmt(v):
            return "NA" if isinstance(v, float) and math.isnan(v) else v
        return "\n".join(f"{k} = {fmt(v)}" for k, v in self.as_dict().items())


def descriptive_stats(g: Graph) -> GraphReport:
    """Whole-network summary: size, giant component, degrees, density, transitivity.

    The giant component uses weak connectivity and the global clustering
    coefficient (3 x triangles / connected triples) is computed on the
    undirected skeleton, so directed graphs get one number each.
    """
    a = g.to_scipy(symmetric=True)
    _, comp = connected_components(a, directed=False)
    giant = int(np.bincount(comp).max())

    deg = np.diff(a.indptr)  # skeleton degrees
    triples = float((deg * (deg - 1) // 2).sum())
    paths2 = (a @ a).multiply(a).sum()  # 6 * triangles
    clustering = (paths2 / 2.0) / triples if triples else 0.0

    mean_degree = g.edge_count / g.n if g.directed else 2.0 * g.edge_count / g.n
    return GraphReport(
        nodes=g.n,
        directed=g.directed,
        giant_component=giant,
        mean_degree=mean_degree,
        max_in_degree=int(g.deg_in.max()),
        max_out_degree=int(g.deg_out.max()),
        density=g.density(),
        clustering=float(clustering),
    )


def outcome_degree_stats(g: Graph, y: OutcomeVector) -> OutcomeDegreeReport:
    """Mean in/out degree of nodes with and without the outcome attribute.

    An empty group gets NaN means, never zero.
    """
    if y.n != g.n:
        raise ValueError("outcome length must match node count")
    ones = y.values == 1

    def group_mean(degs: np.ndarray, mask: np.ndarray) -> float:
        return float(degs[mask].mean()) if mask.any() else math.nan

    return OutcomeDegreeReport(
        percent_ones=100.0 * float(ones.mean()),
        mean_in_degree_0=group_mean(g.deg_in, ~ones),
        mean_out_degree_0=group_mean(g.deg_out, ~ones),
        mean_in_degree_1=group_mean(g.deg_in, ones),
        mean_out_degree_1=group_mean(g.deg_out, ones),
    )
