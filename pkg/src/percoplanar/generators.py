"""Base-graph families.

Vertex numbering is fixed per family: row-major for grids, binary codes for
hypercubes, consecutive blocks for disjoint cliques. Tree growth probes
neighbours in ascending index order, so this numbering is part of what makes
a trial reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .graph import Graph, read_edge_list

__all__ = [
    "FAMILIES",
    "FamilySpec",
    "FamilySpecError",
    "GenerationError",
    "generate",
    "complete_graph",
    "complete_bipartite",
    "hypercube",
    "grid",
    "random_regular",
    "disjoint_cliques",
    "validate_min_degree",
    "MAX_COMPLETE_N",
]

FAMILIES = ("complete", "complete_bipartite", "hypercube", "grid",
            "random_regular", "disjoint_cliques", "from_file")

# K_n is stored explicitly; beyond this use percolation.sample_gnp
MAX_COMPLETE_N = 6000


class FamilySpecError(ValueError):
    pass


class GenerationError(RuntimeError):
    pass


@dataclass(frozen=True)
class FamilySpec:
    family: str
    n: Optional[int] = None
    a: Optional[int] = None
    b: Optional[int] = None
    dim: Optional[int] = None
    rows: Optional[int] = None
    cols: Optional[int] = None
    r: Optional[int] = None
    copies: Optional[int] = None
    path: Optional[str] = None

    _required = {
        "complete": ("n",),
        "complete_bipartite": ("a", "b"),
        "hypercube": ("dim",),
        "grid": ("rows", "cols"),
        "random_regular": ("n", "r"),
        "disjoint_cliques": ("copies", "r"),
        "from_file": ("path",),
    }

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise FamilySpecError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        for name in self._required[self.family]:
            value = getattr(self, name)
            if value is None:
                raise FamilySpecError(f"family {self.family!r} needs parameter {name!r}")
            if name != "path" and int(value) < 1:
                raise FamilySpecError(f"{name} must be >= 1, got {value}")
        if self.family == "random_regular":
            if (self.n * self.r) % 2:
                raise FamilySpecError(f"n * r must be even, got n={self.n}, r={self.r}")
            if self.r >= self.n:
                raise FamilySpecError(f"r must be < n, got n={self.n}, r={self.r}")
        if self.family == "complete" and self.n > MAX_COMPLETE_N:
            raise FamilySpecError(
                f"complete graphs above {MAX_COMPLETE_N} vertices are not materialised; "
                "use percolation.sample_gnp for G(n, p)")


def complete_graph(n: int) -> Graph:
    u, v = np.triu_indices(n, k=1)
    return Graph(n, np.stack([u, v], axis=1).astype(np.int64))


def complete_bipartite(a: int, b: int) -> Graph:
    u = np.repeat(np.arange(a), b)
    v = np.tile(np.arange(a, a + b), a)
    return Graph(a + b, np.stack([u, v], axis=1))


def hypercube(dim: int) -> Graph:
    n = 1 << dim
    verts = np.arange(n)
    pairs = []
    for bit in range(dim):
        low = verts[(verts >> bit) & 1 == 0]
        pairs.append(np.stack([low, low | (1 << bit)], axis=1))
    return Graph.from_pairs(n, np.concatenate(pairs))


def grid(rows: int, cols: int) -> Graph:
    idx = np.arange(rows * cols).reshape(rows, cols)
    horiz = np.stack([idx[:, :-1].ravel(), idx[:, 1:].ravel()], axis=1)
    vert = np.stack([idx[:-1, :].ravel(), idx[1:, :].ravel()], axis=1)
    return Graph.from_pairs(rows * cols, np.concatenate([horiz, vert]))


def disjoint_cliques(copies: int, r: int) -> Graph:
    k = r + 1
    u, v = np.triu_indices(k, k=1)
    offsets = (np.arange(copies) * k)[:, None]
    us = (u[None, :] + offsets).ravel()
    vs = (v[None, :] + offsets).ravel()
    return Graph(copies * k, np.stack([us, vs], axis=1))


def random_regular(n: int, r: int, seed: int, restarts: int = 10_000) -> Graph:
    """r-regular simple graph from the pairing model.

    Stubs are paired at random; pairs that would form a loop or a repeated
    edge are returned to the pool and re-paired with fresh randomness. If the
    leftover stubs admit no valid pair the whole attempt restarts.
    """
    FamilySpec("random_regular", n=n, r=r)
    rng = np.random.default_rng([seed & ((1 << 64) - 1), n, r])
    for _ in range(restarts):
        edges = _pairing_attempt(n, r, rng)
        if edges is not None:
            return Graph.from_pairs(n, edges)
    raise GenerationError(f"pairing model failed after {restarts} restarts (n={n}, r={r})")


def _pairing_attempt(n: int, r: int, rng: np.random.Generator):
    stubs = np.repeat(np.arange(n, dtype=np.int64), r)
    accepted = np.zeros(0, dtype=np.int64)
    stalls = 0
    while len(stubs):
        rng.shuffle(stubs)
        a, b = stubs[0::2], stubs[1::2]
        lo, hi = np.minimum(a, b), np.maximum(a, b)
        codes = lo * n + hi
        ok = lo != hi
        ok &= ~np.isin(codes, accepted)
        # within a batch keep only the first copy of a repeated pair
        _, first = np.unique(codes, return_index=True)
        once = np.zeros(len(codes), dtype=bool)
        once[first] = True
        ok &= once
        if not ok.any():
            stalls += 1
            if stalls > 20 or not _has_valid_pair(stubs, accepted, n):
                return None
            continue
        stalls = 0
        accepted = np.union1d(accepted, codes[ok])
        stubs = np.concatenate([a[~ok], b[~ok]])
    return np.stack([accepted // n, accepted % n], axis=1)


def _has_valid_pair(stubs: np.ndarray, accepted: np.ndarray, n: int) -> bool:
    pool = np.unique(stubs)
    taken = set(accepted.tolist())
    for i, u in enumerate(pool.tolist()):
        for v in pool[i + 1:].tolist():
            if u * n + v not in taken:
                return True
    return False


def generate(spec: FamilySpec, seed: int = 0) -> Graph:
    """Build the base graph described by ``spec``; deterministic in (spec, seed)."""
    f = spec.family
    if f == "complete":
        return complete_graph(spec.n)
    if f == "complete_bipartite":
        return complete_bipartite(spec.a, spec.b)
    if f == "hypercube":
        return hypercube(spec.dim)
    if f == "grid":
        return grid(spec.rows, spec.cols)
    if f == "random_regular":
        return random_regular(spec.n, spec.r, seed)
    if f == "disjoint_cliques":
        return disjoint_cliques(spec.copies, spec.r)
    return read_edge_list(spec.path)


def validate_min_degree(graph: Graph, r: int) -> bool:
    return graph.n == 0 or int(graph.degrees.min()) >= r
