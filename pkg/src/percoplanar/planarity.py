"""Planarity oracle and checkable non-planarity certificates.

A planar graph with girth ``g`` and ``n >= 3`` vertices has at most
``g(n-2)/(g-2)`` edges. A certificate names a graph ``H`` (vertex set,
edge list, girth floor ``g``) that breaks this bound, so ``H`` is not
planar. ``H`` is either a subgraph of the host graph, or a graph whose
edges are realised in the host by internally disjoint paths (a
subdivision); either way the host contains a non-planar subdivision and is
itself non-planar.

All density decisions use :class:`fractions.Fraction`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional, Union

import networkx as nx
import numpy as np

from .graph import (Finite, Graph, _adjacency_sets, _delete_short_cycles, core_mask, girth,
                    induced_subgraph, largest_component, short_cycle_edge_deletion)

__all__ = [
    "Certificate",
    "OracleVerdict",
    "Verification",
    "CertificateFormatError",
    "euler_bound",
    "euler_slack",
    "is_planar",
    "oracle_verdict",
    "density_certificate",
    "subdivision_certificate",
    "kuratowski_certificate",
    "verify_certificate",
    "format_certificate",
    "parse_certificate",
]


class CertificateFormatError(ValueError):
    pass


def euler_bound(n: int, g: int) -> Fraction:
    """Maximum edge count ``g(n-2)/(g-2)`` of a planar graph with girth ``g``."""
    if n < 3 or g < 3:
        raise ValueError(f"euler_bound needs n >= 3 and g >= 3, got n={n}, g={g}")
    return Fraction(g * (n - 2), g - 2)


def euler_slack(n: int, g: int) -> Fraction:
    """The looser form ``n + 2n/(g-2)``, always strictly above :func:`euler_bound`."""
    if n < 3 or g < 3:
        raise ValueError(f"euler_slack needs n >= 3 and g >= 3, got n={n}, g={g}")
    return n + Fraction(2 * n, g - 2)


@dataclass(frozen=True)
class Certificate:
    """Density/girth violation on a named graph.

    ``paths[i]`` lists the internal host vertices realising ``edges[i]``
    (oriented from ``edges[i][0]`` to ``edges[i][1]``); an empty tuple, or
    an empty ``paths``, means the edge is a host edge.
    """

    g: int
    vertices: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]
    paths: tuple[tuple[int, ...], ...] = ()
    n_prime: int = -1
    m_prime: int = -1

    def __post_init__(self):
        if self.n_prime < 0:
            object.__setattr__(self, "n_prime", len(self.vertices))
        if self.m_prime < 0:
            object.__setattr__(self, "m_prime", len(self.edges))

    @property
    def kind(self) -> str:
        return "subdivision" if any(self.paths) else "density-girth"


@dataclass(frozen=True)
class OracleVerdict:
    planar: bool
    note: str = ""

    kind = "oracle"


class Verification(NamedTuple):
    ok: bool
    reason: str

    def __bool__(self) -> bool:
        return self.ok


# --- kernel (degree-2 suppression) ------------------------------------------


def _peel(adj: dict[int, set[int]]) -> None:
    """Remove vertices of degree <= 1 in place."""
    stack = [v for v, ws in adj.items() if len(ws) <= 1]
    while stack:
        v = stack.pop()
        ws = adj.pop(v, None)
        if ws is None:
            continue
        for w in ws:
            nb = adj[w]
            nb.discard(v)
            if len(nb) <= 1:
                stack.append(w)


def _chains(adj: dict[int, set[int]]) -> list[tuple[int, int, tuple[int, ...]]]:
    """Maximal paths between vertices of degree >= 3 through degree-2 vertices.

    ``adj`` must have minimum degree 2. Components that are bare cycles have
    no branch vertex and are skipped. Loops (``a == b``) and parallel chains
    are reported as found.
    """
    branch = sorted(v for v, ws in adj.items() if len(ws) >= 3)
    is_branch = set(branch)
    used = set()
    out = []
    for a in branch:
        for w in sorted(adj[a]):
            if (a, w) in used:
                continue
            prev, cur, inner = a, w, []
            while cur not in is_branch:
                inner.append(cur)
                nxt = [x for x in adj[cur] if x != prev]
                prev, cur = cur, nxt[0]
            used.add((a, w))
            used.add((cur, prev))
            out.append((a, cur, tuple(inner)))
    return out


def _kernel_simple_graph(adj: dict[int, set[int]]) -> nx.Graph:
    H = nx.Graph()
    for a, b, _ in _chains(adj):
        if a != b:
            H.add_edge(a, b)
    return H


def is_planar(graph: Graph) -> bool:
    """Exact planarity test.

    Trees and low-degree fringes are stripped, degree-2 vertices suppressed
    (neither changes planarity), and the remaining simple kernel is handed to
    the left-right planarity test of networkx.
    """
    n, m = graph.n, graph.m
    if n >= 3 and m > 3 * n - 6:
        return False
    core = core_mask(graph, 2)
    if not core.any():
        return True
    adj = _adjacency_sets(graph, np.flatnonzero(core))
    H = _kernel_simple_graph(adj)
    k, e = H.number_of_nodes(), H.number_of_edges()
    if k < 5:
        return True
    if e > 3 * k - 6:
        return False
    planar, _ = nx.check_planarity(H)
    return bool(planar)


def oracle_verdict(graph: Graph) -> OracleVerdict:
    n, m = graph.n, graph.m
    if n >= 3 and m > 3 * n - 6:
        return OracleVerdict(False, f"m = {m} > 3n - 6 = {3 * n - 6}")
    planar = is_planar(graph)
    return OracleVerdict(planar, "left-right test on the degree-2-suppressed kernel")


# --- certificate search ------------------------------------------------------


def _plain_certificate(sub: Graph, mapping: np.ndarray, g: int) -> Optional[Certificate]:
    n, m = sub.n, sub.m
    if n < 3 or m <= euler_bound(n, g):
        return None
    edges = tuple((int(mapping[u]), int(mapping[v])) for u, v in sub.edges.tolist())
    return Certificate(g, tuple(int(v) for v in mapping), edges)


def subdivision_certificate(graph: Graph, g: int) -> Optional[Certificate]:
    """Search for a min-degree-3 subdivided subgraph whose branch graph has
    girth >= g and breaks the Euler bound.

    Repeatedly: take the 2-core, suppress degree-2 vertices, and cut one
    chain out of every loop, parallel pair and branch-graph cycle shorter
    than ``g``; stop when nothing is cut.
    """
    if g < 3:
        raise ValueError(f"g must be >= 3, got {g}")
    core = np.flatnonzero(core_mask(graph, 2))
    if len(core) == 0:
        return None
    adj = _adjacency_sets(graph, core)
    while True:
        _peel(adj)
        chains = _chains(adj)
        if not chains:
            return None
        cut = []
        best = {}
        for c in chains:
            a, b, inner = c
            if a == b:
                cut.append(c)
                continue
            key = (min(a, b), max(a, b))
            other = best.get(key)
            if other is None:
                best[key] = c
            elif (len(inner), inner) < (len(other[2]), other[2]):
                cut.append(other)
                best[key] = c
            else:
                cut.append(c)
        if not cut and g > 3:
            kadj: dict[int, set[int]] = {}
            for a, b in best:
                kadj.setdefault(a, set()).add(b)
                kadj.setdefault(b, set()).add(a)
            for a, b in _delete_short_cycles(kadj, g - 1):
                cut.append(best[(a, b)])
        if not cut:
            break
        for a, b, inner in cut:
            # removing the first host edge of the chain detaches the rest
            x = inner[0] if inner else b
            adj[a].discard(x)
            adj[x].discard(a)
    verts = sorted({v for key in best for v in key})
    if len(verts) < 3 or len(best) <= euler_bound(len(verts), g):
        return None
    edges, paths = [], []
    for key in sorted(best):
        a, b, inner = best[key]
        if a > b:
            inner = inner[::-1]
        edges.append(key)
        paths.append(tuple(inner))
    return Certificate(g, tuple(verts), tuple(edges), tuple(paths))


def density_certificate(graph: Graph, ell: int) -> Optional[Certificate]:
    """First certificate found by, in order:

    1. ``m > 3n - 6`` on the 3-core (girth floor 3);
    2. short-cycle deletion at horizon ``ell`` followed by the girth-``ell+1``
       bound on the 2-core of the largest remaining component;
    3. :func:`subdivision_certificate` for girth floors ``3..ell+1``;
    4. :func:`kuratowski_certificate`.
    """
    if ell < 3:
        raise ValueError(f"ell must be >= 3, got {ell}")
    core3 = np.flatnonzero(core_mask(graph, 3))
    if len(core3) >= 3:
        sub, mapping = induced_subgraph(graph, core3)
        cert = _plain_certificate(sub, mapping, 3)
        if cert is not None:
            return cert

    core2 = np.flatnonzero(core_mask(graph, 2))
    if len(core2) == 0:
        return None
    sub, mapping = induced_subgraph(graph, core2)
    pruned, _ = short_cycle_edge_deletion(sub, ell)
    comp, cmap = largest_component(pruned)
    keep = np.flatnonzero(core_mask(comp, 2))
    if len(keep) >= 3:
        inner, imap = induced_subgraph(comp, keep)
        cert = _plain_certificate(inner, mapping[cmap[imap]], ell + 1)
        if cert is not None:
            return cert

    for g in range(3, ell + 2):
        cert = subdivision_certificate(graph, g)
        if cert is not None:
            return cert
    return kuratowski_certificate(graph)


def kuratowski_certificate(graph: Graph) -> Optional[Certificate]:
    """Certificate from a K5 or K3,3 subdivision found by the planarity test.

    K5 (girth 3, 10 > 9 edges) and K3,3 (girth 4, 9 > 8 edges) both break
    the density bound, so the obstruction is an ordinary subdivision
    certificate. The obstruction is extracted from the degree-2-suppressed
    kernel and its edges expanded back into host paths. Returns ``None`` for
    planar graphs.
    """
    core = np.flatnonzero(core_mask(graph, 2))
    if len(core) < 5:
        return None
    adj = _adjacency_sets(graph, core)
    chain = {}
    for a, b, inner in _chains(adj):
        if a == b:
            continue
        if a > b:
            a, b, inner = b, a, inner[::-1]
        if (a, b) not in chain or len(inner) < len(chain[(a, b)]):
            chain[(a, b)] = inner
    K = nx.Graph(list(chain))
    if K.number_of_nodes() < 5:
        return None
    planar, obstruction = nx.check_planarity(K, counterexample=True)
    if planar:
        return None
    oadj = {int(v): {int(w) for w in obstruction[v]} for v in obstruction}

    def hop(x, y):
        inner = chain[(x, y)] if x < y else chain[(y, x)][::-1]
        return [*inner, y]

    edges, paths = [], []
    for a, b, via in _chains(oadj):
        if a > b:
            a, b, via = b, a, via[::-1]
        walk = [a, *via, b]
        host = []
        for x, y in zip(walk, walk[1:]):
            host.extend(hop(x, y))
        edges.append((a, b))
        paths.append(tuple(host[:-1]))
    order = sorted(range(len(edges)), key=edges.__getitem__)
    verts = tuple(sorted({v for e in edges for v in e}))
    g = 3 if len(verts) == 5 else 4
    return Certificate(g, verts, tuple(edges[i] for i in order), tuple(paths[i] for i in order))


# --- verification ------------------------------------------------------------


def verify_certificate(graph: Graph, cert: Union[Certificate, OracleVerdict]) -> Verification:
    """Re-check a certificate against ``graph`` from scratch."""
    if isinstance(cert, OracleVerdict):
        if cert.planar:
            return Verification(False, "verdict-claims-planar")
        if is_planar(graph):
            return Verification(False, "oracle-disagrees")
        return Verification(True, "ok")

    g = cert.g
    verts = list(cert.vertices)
    if g < 3:
        return Verification(False, "bad-girth-floor")
    if cert.n_prime != len(verts) or cert.m_prime != len(cert.edges):
        return Verification(False, "count-mismatch")
    if len(set(verts)) != len(verts):
        return Verification(False, "repeated-vertex")
    if len(verts) < 3:
        return Verification(False, "too-few-vertices")
    if any(not 0 <= v < graph.n for v in verts):
        return Verification(False, "vertex-out-of-range")
    paths = cert.paths if cert.paths else ((),) * len(cert.edges)
    if len(paths) != len(cert.edges):
        return Verification(False, "path-count-mismatch")

    branch = set(verts)
    pairs = set()
    interior = set()
    for (a, b), inner in zip(cert.edges, paths):
        if a == b or a not in branch or b not in branch:
            return Verification(False, "bad-edge")
        key = (min(a, b), max(a, b))
        if key in pairs:
            return Verification(False, "duplicate-edge")
        pairs.add(key)
        walk = [a, *inner, b]
        for x in inner:
            if x in branch or x in interior or not 0 <= x < graph.n:
                return Verification(False, "path-overlap")
            interior.add(x)
        for x, y in zip(walk, walk[1:]):
            if not graph.has_edge(x, y):
                return Verification(False, "missing-edge")

    index = {v: i for i, v in enumerate(sorted(branch))}
    h = Graph.from_pairs(len(index), [(index[a], index[b]) for a, b in pairs])
    if g > 3 and isinstance(girth(h, g - 1), Finite):
        return Verification(False, "girth-violated")
    if Fraction(len(pairs)) <= euler_bound(len(branch), g):
        return Verification(False, "density-not-violated")
    return Verification(True, "ok")


# --- text form ---------------------------------------------------------------


def format_certificate(cert: Certificate) -> str:
    lines = [
        f"certificate {cert.kind}",
        f"g {cert.g}",
        "vertices " + " ".join(str(v) for v in cert.vertices),
        "edges " + " ".join(f"{a}-{b}" for a, b in cert.edges),
    ]
    for i, inner in enumerate(cert.paths):
        if inner:
            lines.append(f"path {i} " + " ".join(str(v) for v in inner))
    return "\n".join(lines) + "\n"


def parse_certificate(text: str) -> Certificate:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines or lines[0] not in ("certificate density-girth", "certificate subdivision"):
        raise CertificateFormatError("first line must be 'certificate density-girth' or "
                                     "'certificate subdivision'")
    g = None
    verts: tuple[int, ...] = ()
    edges: tuple[tuple[int, int], ...] = ()
    inner: dict[int, tuple[int, ...]] = {}
    try:
        for line in lines[1:]:
            key, _, rest = line.partition(" ")
            toks = rest.split()
            if key == "g":
                g = int(toks[0])
            elif key == "vertices":
                verts = tuple(int(t) for t in toks)
            elif key == "edges":
                edges = tuple(tuple(int(x) for x in t.split("-")) for t in toks)
                if any(len(e) != 2 for e in edges):
                    raise CertificateFormatError("edges must be written as u-v")
            elif key == "path":
                inner[int(toks[0])] = tuple(int(t) for t in toks[1:])
            else:
                raise CertificateFormatError(f"unknown certificate line {line!r}")
    except (ValueError, IndexError) as exc:
        if isinstance(exc, CertificateFormatError):
            raise
        raise CertificateFormatError(f"malformed certificate: {exc}") from None
    if g is None:
        raise CertificateFormatError("missing 'g' line")
    paths = tuple(inner.get(i, ()) for i in range(len(edges))) if inner else ()
    return Certificate(g, verts, edges, paths)
