"""Independent reference implementations used as test oracles."""

from __future__ import annotations

import itertools
import random
from collections import deque

import numpy as np

from percoplanar.graph import Graph


def adjacency_bits(n, edges):
    adj = [0] * n
    for u, v in edges:
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    return adj


def _route(adj, pairs, spare_mask):
    """Can every (a, b) in ``pairs`` be joined by a path whose interior uses
    distinct vertices from ``spare_mask``, no vertex shared between paths?"""
    if not pairs:
        return True
    (a, b), rest = pairs[0], pairs[1:]

    def extend(x, used):
        if adj[x] >> b & 1 and x != a:
            if _route(adj, rest, spare_mask & ~used):
                return True
        free = adj[x] & spare_mask & ~used
        while free:
            low = free & -free
            y = low.bit_length() - 1
            free ^= low
            if extend(y, used | low):
                return True
        return False

    free = adj[a] & spare_mask
    while free:
        low = free & -free
        y = low.bit_length() - 1
        free ^= low
        if extend(y, low):
            return True
    return False


def _has_subdivision(adj, n, branch_pairs, branch):
    mask = 0
    for v in branch:
        mask |= 1 << v
    spare = ((1 << n) - 1) & ~mask
    missing = [(a, b) for a, b in branch_pairs if not adj[a] >> b & 1]
    return _route(adj, missing, spare)


def brute_force_nonplanar(n, edges) -> bool:
    """Exhaustive search for a subdivision of K5 or K3,3."""
    adj = adjacency_bits(n, edges)
    deg = [bin(a).count("1") for a in adj]
    rich4 = [v for v in range(n) if deg[v] >= 4]
    for branch in itertools.combinations(rich4, 5):
        pairs = list(itertools.combinations(branch, 2))
        if _has_subdivision(adj, n, pairs, branch):
            return True
    rich3 = [v for v in range(n) if deg[v] >= 3]
    for six in itertools.combinations(rich3, 6):
        first = six[0]
        for others in itertools.combinations(six[1:], 2):
            left = (first, *others)
            right = tuple(v for v in six if v not in left)
            pairs = [(a, b) for a in left for b in right]
            if _has_subdivision(adj, n, pairs, six):
                return True
    return False


def brute_girth(n, edges):
    """Shortest cycle by BFS from every edge removed in turn (None if acyclic)."""
    adj = [set() for _ in range(n)]
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    best = None
    for u, v in edges:
        dist = {u: 0}
        q = deque([u])
        while q:
            x = q.popleft()
            for y in adj[x]:
                if (x, y) in ((u, v), (v, u)) or y in dist:
                    continue
                dist[y] = dist[x] + 1
                q.append(y)
        if v in dist:
            length = dist[v] + 1
            best = length if best is None else min(best, length)
    return best


def brute_cycle_count(n, edges, ell):
    """Count cycles of length <= ell as sets of edges forming one cycle."""
    adj = [set() for _ in range(n)]
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    found = set()
    for k in range(3, ell + 1):
        for verts in itertools.combinations(range(n), k):
            first, rest = verts[0], verts[1:]
            for perm in itertools.permutations(rest):
                if perm[0] > perm[-1]:
                    continue
                cyc = (first, *perm)
                if all(cyc[(i + 1) % k] in adj[cyc[i]] for i in range(k)):
                    found.add(frozenset(frozenset((cyc[i], cyc[(i + 1) % k])) for i in range(k)))
    return len(found)


def random_edges(n, density, rng):
    return [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < density]


def all_graphs(n):
    pairs = list(itertools.combinations(range(n), 2))
    for mask in range(1 << len(pairs)):
        yield [pairs[i] for i in range(len(pairs)) if mask >> i & 1]


def random_tree(n, rng):
    return [(rng.randrange(v), v) for v in range(1, n)]


# --- planar corpus -----------------------------------------------------------


def grid_edges(rows, cols):
    e = []
    for i in range(rows):
        for j in range(cols):
            v = i * cols + j
            if j + 1 < cols:
                e.append((v, v + 1))
            if i + 1 < rows:
                e.append((v, v + cols))
    return e


def stacked_triangulation(n, rng):
    """Planar by construction: repeatedly insert a vertex into a face."""
    edges = [(0, 1), (0, 2), (1, 2)]
    faces = [(0, 1, 2), (0, 1, 2)]
    for v in range(3, n):
        a, b, c = faces.pop(rng.randrange(len(faces)))
        edges += [(a, v), (b, v), (c, v)]
        faces += [(a, b, v), (a, c, v), (b, c, v)]
    return edges


def outerplanar(n, rng):
    """Cycle plus random non-crossing chords."""
    edges = {(i, i + 1) for i in range(n - 1)} | {(0, n - 1)}

    def chords(lo, hi):
        if hi - lo < 2:
            return
        k = rng.randrange(lo + 1, hi)
        if rng.random() < 0.7 and (lo, hi) != (0, n - 1):
            edges.add((lo, hi))
        chords(lo, k)
        chords(k, hi)

    chords(0, n - 1)
    return sorted(edges)


def planar_corpus(count, seed):
    """(n, edges) pairs of planar graphs: grids, random grid subgraphs,
    stacked triangulations, outerplanar graphs and their subdivisions."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        kind = len(out) % 5
        if kind == 0:
            r, c = rng.randint(2, 12), rng.randint(2, 12)
            out.append((r * c, grid_edges(r, c)))
        elif kind == 1:
            r, c = rng.randint(3, 15), rng.randint(3, 15)
            keep = rng.uniform(0.5, 0.95)
            out.append((r * c, [e for e in grid_edges(r, c) if rng.random() < keep]))
        elif kind == 2:
            n = rng.randint(4, 40)
            out.append((n, stacked_triangulation(n, rng)))
        elif kind == 3:
            n = rng.randint(4, 40)
            out.append((n, outerplanar(n, rng)))
        else:
            n = rng.randint(4, 25)
            base = stacked_triangulation(n, rng)
            sub, m = [], n
            for u, v in base:
                if rng.random() < 0.4:
                    sub += [(u, m), (v, m)]
                    m += 1
                else:
                    sub.append((u, v))
            out.append((m, sub))
    return out


def as_graph(n, edges) -> Graph:
    return Graph.from_pairs(n, np.asarray(edges, dtype=np.int64).reshape(-1, 2))


# acceptance results, filled by test_acceptance and printed by conftest
ACCEPTANCE: dict[int, str] = {}
