"""Immutable simple undirected graphs and the BFS-based structural queries
used throughout the package: components, cores, girth, short-cycle deletion
and short-cycle counting.

Vertices are the integers ``0..n-1``. Edges are stored once, as ``(u, v)``
with ``u < v``, sorted lexicographically; adjacency is kept in CSR form with
ascending neighbour lists.
"""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence, Union

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

__all__ = [
    "Graph",
    "GraphStats",
    "GraphValidationError",
    "SelfLoopError",
    "DuplicateEdgeError",
    "VertexRangeError",
    "EdgeListFormatError",
    "CycleBudgetExceeded",
    "Finite",
    "ExceedsCap",
    "Acyclic",
    "GirthResult",
    "build_graph",
    "graph_stats",
    "component_labels",
    "largest_component",
    "induced_subgraph",
    "core_mask",
    "girth",
    "short_cycle_edge_deletion",
    "count_short_cycles",
    "parse_edge_list",
    "format_edge_list",
    "read_edge_list",
    "write_edge_list",
]


class GraphValidationError(ValueError):
    """Raised when an edge list does not describe a simple graph."""

    def __init__(self, message: str, pair: tuple[int, int] | None = None):
        super().__init__(message)
        self.pair = pair


class SelfLoopError(GraphValidationError):
    pass


class DuplicateEdgeError(GraphValidationError):
    pass


class VertexRangeError(GraphValidationError):
    pass


class EdgeListFormatError(ValueError):
    pass


class CycleBudgetExceeded(RuntimeError):
    """Cycle enumeration explored more paths than its budget allows."""


class Graph:
    """Simple undirected graph on vertices ``0..n-1``.

    Instances are immutable; construct them with :func:`build_graph` (which
    validates) or :meth:`Graph.from_canonical` (which trusts its input).
    """

    __slots__ = ("n", "edges", "indptr", "indices", "edge_ids", "_adj")

    def __init__(self, n: int, edges: np.ndarray):
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        self.n = int(n)
        self.edges = edges
        m = len(edges)
        src = np.concatenate([edges[:, 0], edges[:, 1]])
        dst = np.concatenate([edges[:, 1], edges[:, 0]])
        eid = np.concatenate([np.arange(m), np.arange(m)])
        order = np.lexsort((dst, src))
        self.indices = dst[order].astype(np.int64)
        self.edge_ids = eid[order].astype(np.int64)
        counts = np.bincount(src, minlength=self.n) if m else np.zeros(self.n, np.int64)
        self.indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(counts, out=self.indptr[1:])
        for arr in (self.edges, self.indices, self.edge_ids, self.indptr):
            arr.flags.writeable = False
        self._adj = None

    @classmethod
    def from_canonical(cls, n: int, edges) -> "Graph":
        """Wrap edges already in canonical form (u < v, sorted, unique)."""
        return cls(n, edges)

    @classmethod
    def from_pairs(cls, n: int, edges) -> "Graph":
        """Canonicalise trusted pairs (any orientation, no loops or duplicates)."""
        arr = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        arr = np.sort(arr, axis=1)
        if len(arr):
            arr = arr[np.lexsort((arr[:, 1], arr[:, 0]))]
        return cls(n, arr)

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def incident_edge_ids(self, v: int) -> np.ndarray:
        return self.edge_ids[self.indptr[v]:self.indptr[v + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        if not (0 <= u < self.n and 0 <= v < self.n):
            return False
        nbrs = self.neighbors(u)
        i = np.searchsorted(nbrs, v)
        return bool(i < len(nbrs) and nbrs[i] == v)

    def adjacency(self) -> list[list[int]]:
        """Per-vertex ascending neighbour lists (cached)."""
        if self._adj is None:
            ind = self.indices.tolist()
            ptr = self.indptr.tolist()
            self._adj = [ind[ptr[v]:ptr[v + 1]] for v in range(self.n)]
        return self._adj

    def edge_list(self) -> list[tuple[int, int]]:
        return [tuple(e) for e in self.edges.tolist()]

    def pair_codes(self) -> np.ndarray:
        return self.edges[:, 0] * self.n + self.edges[:, 1]

    def edge_subgraph(self, mask: np.ndarray) -> "Graph":
        """Spanning subgraph keeping the edges selected by a boolean mask."""
        return Graph(self.n, self.edges[np.asarray(mask, dtype=bool)])

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.edges, other.edges)

    def __hash__(self):
        return hash((self.n, self.edges.tobytes()))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


class GraphStats(NamedTuple):
    n: int
    m: int
    min_degree: int
    max_degree: int


@dataclass(frozen=True)
class Finite:
    value: int


@dataclass(frozen=True)
class ExceedsCap:
    cap: int


@dataclass(frozen=True)
class Acyclic:
    pass


GirthResult = Union[Finite, ExceedsCap, Acyclic]


def build_graph(n: int, edge_list: Iterable[Sequence[int]]) -> Graph:
    """Validate an edge list and return the canonical graph.

    Raises
    ------
    VertexRangeError, SelfLoopError, DuplicateEdgeError
        On the first offending pair, in input order.
    """
    if n < 0:
        raise GraphValidationError(f"vertex count must be non-negative, got {n}")
    arr = np.asarray(list(edge_list) if not isinstance(edge_list, np.ndarray) else edge_list,
                     dtype=np.int64).reshape(-1, 2)
    if len(arr) == 0:
        return Graph(n, arr)
    bad = np.flatnonzero((arr < 0).any(axis=1) | (arr >= n).any(axis=1))
    if len(bad):
        pair = tuple(int(x) for x in arr[bad[0]])
        raise VertexRangeError(f"edge {pair} has an endpoint outside 0..{n - 1}", pair)
    loops = np.flatnonzero(arr[:, 0] == arr[:, 1])
    if len(loops):
        pair = tuple(int(x) for x in arr[loops[0]])
        raise SelfLoopError(f"self-loop {pair}", pair)
    canon = np.sort(arr, axis=1)
    codes = canon[:, 0] * n + canon[:, 1]
    _, first, counts = np.unique(codes, return_index=True, return_counts=True)
    if (counts > 1).any():
        dup_codes = set(codes[first[counts > 1]].tolist())
        seen = set()
        for i, c in enumerate(codes.tolist()):
            if c in dup_codes:
                if c in seen:
                    pair = tuple(int(x) for x in arr[i])
                    raise DuplicateEdgeError(f"duplicate edge {pair}", pair)
                seen.add(c)
    order = np.argsort(codes, kind="stable")
    return Graph(n, canon[order])


def graph_stats(graph: Graph) -> GraphStats:
    deg = graph.degrees
    if graph.n == 0:
        return GraphStats(0, 0, 0, 0)
    return GraphStats(graph.n, graph.m, int(deg.min()), int(deg.max()))


def component_labels(graph: Graph) -> tuple[int, np.ndarray]:
    if graph.n == 0:
        return 0, np.zeros(0, dtype=np.int64)
    mat = csr_matrix((np.ones(len(graph.indices), dtype=np.int8), graph.indices, graph.indptr),
                     shape=(graph.n, graph.n))
    count, labels = connected_components(mat, directed=False)
    return count, labels


def induced_subgraph(graph: Graph, vertices) -> tuple[Graph, np.ndarray]:
    """Induced subgraph relabelled to ``0..k-1`` in ascending original order.

    Returns the subgraph and the array mapping new labels to original ones.
    """
    keep = np.zeros(graph.n, dtype=bool)
    keep[np.asarray(vertices, dtype=np.int64)] = True
    mapping = np.flatnonzero(keep)
    relabel = np.full(graph.n, -1, dtype=np.int64)
    relabel[mapping] = np.arange(len(mapping))
    e = graph.edges
    inside = keep[e[:, 0]] & keep[e[:, 1]] if len(e) else np.zeros(0, bool)
    sub = relabel[e[inside]] if len(e) else e
    # relabelling is monotone, so canonical order is preserved
    return Graph(len(mapping), sub), mapping


def largest_component(graph: Graph) -> tuple[Graph, np.ndarray]:
    """Induced subgraph on the largest component; ties go to the component
    holding the smallest vertex index."""
    if graph.n == 0:
        return graph, np.zeros(0, dtype=np.int64)
    _, labels = component_labels(graph)
    sizes = np.bincount(labels)
    # labels are assigned in order of first vertex in scipy, but do not rely on it
    first_vertex = np.full(len(sizes), graph.n, dtype=np.int64)
    np.minimum.at(first_vertex, labels, np.arange(graph.n))
    best = max(range(len(sizes)), key=lambda c: (sizes[c], -first_vertex[c]))
    return induced_subgraph(graph, np.flatnonzero(labels == best))


def core_mask(graph: Graph, k: int) -> np.ndarray:
    """Boolean mask of the k-core (iterated removal of vertices of degree < k)."""
    deg = graph.degrees.astype(np.int64).copy()
    alive = np.ones(graph.n, dtype=bool)
    queue = deque(np.flatnonzero(deg < k).tolist())
    alive[deg < k] = False
    adj = graph.adjacency() if len(queue) else None
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if alive[w]:
                deg[w] -= 1
                if deg[w] < k:
                    alive[w] = False
                    queue.append(w)
    return alive


def _adjacency_sets(graph: Graph, vertices=None) -> dict[int, set[int]]:
    adj = graph.adjacency()
    if vertices is None:
        vertices = range(graph.n)
    keep = set(int(v) for v in vertices)
    return {v: {w for w in adj[v] if w in keep} for v in sorted(keep)}


def _find_short_cycle(adj, root: int, limit: int):
    """Truncated BFS from ``root``.

    Returns ``(length_bound, cycle)`` for the best closed walk through the
    root of length at most ``limit``, where ``cycle`` is an actual simple
    cycle (vertex list) of length at most ``length_bound``; ``None`` if no
    closed walk of length ``<= limit`` passes through the root.
    """
    dist = {root: 0}
    parent = {root: -1}
    queue = deque([root])
    best = None
    while queue:
        x = queue.popleft()
        dx = dist[x]
        bound = limit if best is None else best[0] - 1
        if 2 * dx + 1 > bound:
            break
        for y in adj[x]:
            if y == parent[x]:
                continue
            dy = dist.get(y)
            if dy is None:
                dist[y] = dx + 1
                parent[y] = x
                queue.append(y)
            else:
                cand = dx + dy + 1
                if cand <= limit and (best is None or cand < best[0]):
                    best = (cand, x, y)
    if best is None:
        return None
    _, x, y = best
    path_x = [x]
    while path_x[-1] != root:
        path_x.append(parent[path_x[-1]])
    path_y = [y]
    while path_y[-1] != root:
        path_y.append(parent[path_y[-1]])
    on_x = {v: i for i, v in enumerate(path_x)}
    j = 0
    while path_y[j] not in on_x:
        j += 1
    lca = path_y[j]
    cycle = path_x[: on_x[lca] + 1] + path_y[:j][::-1]
    return best[0], cycle


def _girth_of_adjacency(adj, cap: int) -> int | None:
    """Exact girth if it is at most ``cap``, else ``None``."""
    best = None
    for root in adj:
        limit = cap if best is None else best - 1
        if limit < 3:
            break
        found = _find_short_cycle(adj, root, limit)
        if found is not None:
            best = found[0] if best is None else min(best, found[0])
    return best


def girth(graph: Graph, cap: int) -> GirthResult:
    """Girth of ``graph`` if it is at most ``cap``.

    The search runs a truncated BFS from every vertex of the 2-core; the
    minimum over roots of the shortest closed walk through the root is the
    girth.
    """
    if cap < 3:
        raise ValueError(f"cap must be >= 3, got {cap}")
    core = core_mask(graph, 2)
    if not core.any():
        return Acyclic()
    value = _girth_of_adjacency(_adjacency_sets(graph, np.flatnonzero(core)), cap)
    return ExceedsCap(cap) if value is None else Finite(value)


def _delete_short_cycles(adj: dict[int, set[int]], ell: int) -> list[tuple[int, int]]:
    """In-place greedy deletion on a dict-of-sets adjacency."""
    deleted = []
    for root in sorted(adj):
        while True:
            found = _find_short_cycle(adj, root, ell)
            if found is None:
                break
            cyc = found[1]
            pairs = [tuple(sorted((cyc[i], cyc[(i + 1) % len(cyc)]))) for i in range(len(cyc))]
            u, v = min(pairs)
            adj[u].discard(v)
            adj[v].discard(u)
            deleted.append((u, v))
    return deleted


def short_cycle_edge_deletion(graph: Graph, ell: int) -> tuple[Graph, list[tuple[int, int]]]:
    """Delete edges until no cycle of length ``<= ell`` remains.

    Roots are visited in ascending order; while a cycle of length at most
    ``ell`` is found from the current root its lexicographically smallest
    edge is removed. Deleting edges never creates cycles, so one pass over
    the roots suffices.
    """
    if ell < 3:
        raise ValueError(f"ell must be >= 3, got {ell}")
    core = np.flatnonzero(core_mask(graph, 2))
    if len(core) == 0:
        return graph, []
    adj = _adjacency_sets(graph, core)
    deleted = _delete_short_cycles(adj, ell)
    if not deleted:
        return graph, []
    gone = {u * graph.n + v for u, v in deleted}
    keep = ~np.isin(graph.pair_codes(), np.fromiter(gone, dtype=np.int64))
    return graph.edge_subgraph(keep), deleted


def count_short_cycles(graph: Graph, ell: int, budget: int = 10**7) -> int:
    """Number of distinct cycles of length at most ``ell``.

    Each cycle is enumerated from its smallest vertex in both directions and
    halved. ``budget`` caps the number of simple paths explored.
    """
    if ell < 3:
        raise ValueError(f"ell must be >= 3, got {ell}")
    core = np.flatnonzero(core_mask(graph, 2))
    if len(core) == 0:
        return 0
    adj = _adjacency_sets(graph, core)
    nbrs = {v: sorted(ws) for v, ws in adj.items()}
    total = 0
    explored = 0
    for s in nbrs:
        on_path = {s}
        stack = [(s, iter([w for w in nbrs[s] if w > s]), 1)]
        while stack:
            v, it, length = stack[-1]
            w = next(it, None)
            if w is None:
                stack.pop()
                on_path.discard(v)
                continue
            explored += 1
            if explored > budget:
                raise CycleBudgetExceeded(
                    f"more than {budget} paths explored while counting cycles up to length {ell}")
            if length + 1 > ell or w in on_path:
                continue
            if length + 1 >= 3 and s in adj[w]:
                total += 1
            if length + 1 < ell:
                on_path.add(w)
                stack.append((w, iter([x for x in nbrs[w] if x > s]), length + 1))
    return total // 2


# --- edge-list text format ---------------------------------------------------


def format_edge_list(graph: Graph) -> str:
    lines = [f"{graph.n} {graph.m}"]
    lines.extend(f"{u} {v}" for u, v in graph.edges.tolist())
    return "\n".join(lines) + "\n"


def parse_edge_list(text: str) -> Graph:
    rows = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        rows.append(line)
    if not rows:
        raise EdgeListFormatError("missing 'n m' header line")
    head = rows[0].split()
    if len(head) != 2:
        raise EdgeListFormatError(f"header must be 'n m', got {rows[0]!r}")
    try:
        n, m = int(head[0]), int(head[1])
        pairs = []
        for line in rows[1:]:
            parts = line.split()
            if len(parts) != 2:
                raise EdgeListFormatError(f"edge line must be 'u v', got {line!r}")
            pairs.append((int(parts[0]), int(parts[1])))
    except ValueError as exc:
        if isinstance(exc, EdgeListFormatError):
            raise
        raise EdgeListFormatError(f"non-integer token: {exc}") from None
    if len(pairs) != m:
        raise EdgeListFormatError(f"header declares {m} edges, found {len(pairs)}")
    for u, v in pairs:
        if u >= v:
            raise EdgeListFormatError(f"edge line must satisfy u < v, got {u} {v}")
    return build_graph(n, pairs)


def read_edge_list(path: str | os.PathLike) -> Graph:
    with open(path, encoding="utf-8") as fh:
        return parse_edge_list(fh.read())


def write_edge_list(graph: Graph, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_edge_list(graph))
