"""Constructive non-planarity search on a percolated graph.

The sample ``G_p`` is exposed in two rounds through one coupled sampler:
a pair is in ``G_1`` when its variate is below ``p1`` and in ``G_p`` when it
is below ``p``; revealing ``p1 <= U < p`` on pairs that missed ``G_1`` is the
sprinkling round with probability ``p2 = 1 - (1-p)/(1-p1)``.

A restricted BFS grows a tree in ``G_1`` from a root with at least ``d``
retained neighbours, probing each vertex's neighbours once in ascending
order, until the tree size and frontier ratio fall in the target band. Frontier
rounds then keep growing the tree through a trimmed matching, classify probed
pairs as internal (back into the tree), heavy (into vertices with large
frontier degree) or eligible, and the explored part of ``G_p`` is handed to
the certificate search whenever a round falls back into the tree, hits heavy
vertices, or stops expanding.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .graph import Graph
from .percolation import CoupledSampler, coupled_sampler, split_probability
from .planarity import Certificate, density_certificate, is_planar, verify_certificate

__all__ = [
    "WitnessParams",
    "TreeState",
    "RoundLedger",
    "RoundOutcome",
    "WitnessReport",
    "TreeGrowthFailure",
    "RootSearchExhausted",
    "GrowthStalled",
    "BandMissed",
    "initial_tree_growth",
    "expand_frontier",
    "sprinkle_certify",
    "find_witness",
    "GREW",
    "INTERNAL_HEAVY",
    "HEAVY_BIPARTITE",
    "FINALIZE",
]

log = logging.getLogger(__name__)

GREW = "grew"
INTERNAL_HEAVY = "internal-heavy"
HEAVY_BIPARTITE = "heavy-bipartite"
FINALIZE = "finalize"


@dataclass(frozen=True)
class WitnessParams:
    """Tunable constants of the search.

    Defaults (see :meth:`for_graph`) follow the asymptotic choices
    ``i0 = ceil(ln^3 r)``, ``d = ceil(sqrt(ln r))``, ``l0 = (2d)^d``,
    horizon ``ceil(10/eps)`` and band ``[eps/4, 3eps/4]``; the constants that
    only make sense for astronomically large ``r`` are replaced by practical
    ones: ``i0`` is capped at ``n // 12`` and at least ``10 ln n`` roots
    may be tried. ``heavy_multiplier`` times ``r`` is the frontier-degree threshold
    for heavy vertices (``ln r`` reproduces ``r ln r``). ``trim_degree`` is the
    retained-degree above which a frontier vertex loses its matching edges
    (``ln ln r`` is the asymptotic choice). ``r1_slack`` is subtracted from the
    per-vertex probe budget ``r - max_v |N(v) & B|``.
    """

    epsilon: float
    r: int
    i0: int
    d: int
    l0_cap: int
    ell: int
    ratio_band: tuple[float, float]
    heavy_multiplier: float = 8.0
    round_cap: int = 100
    trim_degree: float = 1.0
    r1_slack: int = 0

    def __post_init__(self):
        lo, hi = self.ratio_band
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")
        if self.r < 1:
            raise ValueError(f"r must be >= 1, got {self.r}")
        if not self.i0 >= self.d >= 1:
            raise ValueError(f"need i0 >= d >= 1, got i0={self.i0}, d={self.d}")
        if not 0 < lo <= hi <= 1:
            raise ValueError(f"ratio_band must satisfy 0 < lo <= hi <= 1, got {self.ratio_band}")
        if self.ell < 3:
            raise ValueError(f"ell must be >= 3, got {self.ell}")
        if self.l0_cap < 1 or self.round_cap < 1:
            raise ValueError("l0_cap and round_cap must be >= 1")

    @classmethod
    def for_graph(cls, epsilon: float, r: int, n: int, **overrides) -> "WitnessParams":
        if not epsilon > 0:
            raise ValueError(f"epsilon must be > 0, got {epsilon}")
        lr = math.log(r) if r > 1 else 0.0
        i0 = max(1, math.ceil(lr ** 3))
        d = max(1, math.ceil(math.sqrt(lr)))
        # the tree must stay a small fraction of the graph or neighbourhoods deplete
        i0 = max(min(i0, n // 12), d)
        ln_n = max(1, math.ceil(math.log(max(n, 2))))
        values = dict(
            epsilon=epsilon,
            r=r,
            i0=i0,
            d=d,
            l0_cap=max(1, min(max(math.ceil((2 * d) ** d), 10 * ln_n), n)),
            ell=min(max(3, math.ceil(10 / epsilon)), 12),
            ratio_band=(epsilon / 4, min(3 * epsilon / 4, 1.0)),
            heavy_multiplier=8.0,
            round_cap=10 * ln_n,
            trim_degree=max(lr, 1.0),
            r1_slack=0,
        )
        values.update(overrides)
        return cls(**values)


@dataclass(frozen=True, eq=False)
class TreeState:
    """Growing tree ``T`` with frontier ``S``.

    ``probed``/``cutoff`` record which vertices have had their neighbour
    window exposed and where that window ends, so no pair is exposed twice;
    ``sampled`` holds every exposed pair that lies in ``G_p`` together with
    its variate.
    """

    n: int
    vertices: tuple[int, ...]
    frontier: tuple[int, ...]
    rejected: frozenset[int]
    parent: dict
    tree_edges: tuple[tuple[int, int], ...]
    round: int
    probed: np.ndarray = field(repr=False)
    cutoff: np.ndarray = field(repr=False)
    probe_order: tuple[int, ...] = field(repr=False)
    sampled: np.ndarray = field(repr=False)  # rows (u, v, variate)
    probes: int = 0
    attempts: int = 0
    exposure: Optional[object] = field(default=None, compare=False, repr=False)

    @property
    def size(self) -> int:
        return len(self.vertices)

    def tree_graph(self) -> Graph:
        return Graph.from_pairs(self.n, self.tree_edges)


@dataclass(frozen=True, eq=False)
class RoundLedger:
    probed_pairs: np.ndarray       # E_k, rows (frontier vertex, neighbour)
    internal: np.ndarray           # probed pairs back into T
    heavy: frozenset[int]          # V_0
    heavy_pairs: np.ndarray        # probed pairs into V_0
    eligible: np.ndarray           # F_k, probed pairs into V_1
    retained: np.ndarray           # R_k
    new_neighbors: frozenset[int]  # N_k
    matching: np.ndarray           # R_k'

    @property
    def nu(self) -> int:
        return len(self.matching)


@dataclass(frozen=True, eq=False)
class RoundOutcome:
    kind: str
    ledger: RoundLedger
    state: TreeState
    pool: np.ndarray


@dataclass(frozen=True)
class WitnessReport:
    outcome: str                      # "certified" | "exhausted"
    certificate: Optional[Certificate]
    mechanism: str                    # density-after-growth | internal-sprinkle | heavy-bipartite
    reason: str
    rounds: int
    tree_size: int
    probes: int
    seed: int
    stream_id: int
    p: float
    p1: float
    p2: float

    @property
    def certified(self) -> bool:
        return self.outcome == "certified"


class TreeGrowthFailure(Exception):
    reason = "growth-failed"

    def __init__(self, message: str, attempts: int = 0):
        super().__init__(message)
        self.attempts = attempts


class RootSearchExhausted(TreeGrowthFailure):
    reason = "root-search-exhausted"


class GrowthStalled(TreeGrowthFailure):
    reason = "growth-stalled"


class BandMissed(TreeGrowthFailure):
    reason = "band-missed"


# --- probing -----------------------------------------------------------------


class _Exposed:
    """Sampler wrapper that reads each pair's variate at most once per run and
    replays the stored value when a later root attempt probes the pair again."""

    def __init__(self, inner, graph: Graph):
        self.inner = inner
        self.n = graph.n
        self.codes = graph.pair_codes()
        self.values = np.full(len(self.codes), np.nan)

    def uniforms(self, us, vs) -> np.ndarray:
        us, vs = np.asarray(us, dtype=np.int64), np.asarray(vs, dtype=np.int64)
        ids = np.searchsorted(self.codes, np.minimum(us, vs) * self.n + np.maximum(us, vs))
        new = np.isnan(self.values[ids])
        if new.any():
            self.values[ids[new]] = self.inner.uniforms(us[new], vs[new])
        return self.values[ids]

    def query(self, p: float) -> Graph:
        return self.inner.query(p)


def _exposed(sampler, graph: Graph, state: Optional["TreeState"] = None) -> _Exposed:
    if isinstance(sampler, _Exposed):
        return sampler
    if state is not None and state.exposure is not None and state.exposure.inner is sampler:
        return state.exposure
    return _Exposed(sampler, graph)


class _Probe:
    """Mutable probe bookkeeping for one attempt; frozen into TreeState."""

    def __init__(self, graph: Graph, sampler: CoupledSampler, p_record: float,
                 rejected: np.ndarray, r1: int, state: Optional[TreeState] = None):
        self.graph = graph
        self.sampler = sampler
        self.p_record = p_record
        self.rejected = rejected
        self.r1 = max(r1, 0)
        if state is None:
            self.probed = np.zeros(graph.n, dtype=bool)
            self.cutoff = np.full(graph.n, -1, dtype=np.int64)
            self.order: list[int] = []
            self.sampled = [np.zeros((0, 3))]
            self.count = 0
        else:
            self.probed = state.probed.copy()
            self.cutoff = state.cutoff.copy()
            self.order = list(state.probe_order)
            self.sampled = [state.sampled]
            self.count = state.probes

    def probe(self, v: int) -> tuple[np.ndarray, np.ndarray]:
        """Expose the first r1 non-rejected neighbours of v, skipping pairs
        already exposed from the other end. Returns (neighbours, variates)."""
        nbrs = self.graph.neighbors(v)
        window = nbrs[~self.rejected[nbrs]][: self.r1]
        seen = self.probed[window] & (v <= self.cutoff[window])
        fresh = window[~seen]
        self.probed[v] = True
        self.cutoff[v] = window[-1] if len(window) else -1
        self.order.append(v)
        self.count += len(fresh)
        u = self.sampler.uniforms(np.full(len(fresh), v), fresh)
        hit = u < self.p_record
        if hit.any():
            self.sampled.append(np.stack([np.full(hit.sum(), v), fresh[hit], u[hit]], axis=1))
        return fresh, u

    def sampled_array(self) -> np.ndarray:
        arr = np.concatenate(self.sampled) if len(self.sampled) > 1 else self.sampled[0]
        self.sampled = [arr]
        return arr


def _b_counts(graph: Graph, rejected: np.ndarray) -> np.ndarray:
    """Number of neighbours in B, per vertex."""
    counts = np.zeros(graph.n, dtype=np.int64)
    for b in np.flatnonzero(rejected):
        counts[graph.neighbors(b)] += 1
    return counts


def _r1(params: WitnessParams, rejected: np.ndarray, b_counts: np.ndarray) -> int:
    # every vertex outside B keeps at least r1 neighbours outside B
    outside = b_counts[~rejected]
    worst = int(outside.max()) if len(outside) else 0
    return params.r - worst - params.r1_slack


def _in_band(size: int, frontier: int, params: WitnessParams) -> bool:
    lo, hi = params.ratio_band
    return params.i0 <= size <= 2 * params.i0 and lo <= frontier / size <= hi


def initial_tree_growth(graph: Graph, sampler: CoupledSampler, p1: float,
                        params: WitnessParams, p: Optional[float] = None,
                        start: int = 0, rejected=(), attempts: int = 0) -> TreeState:
    """Root search plus restricted BFS in ``G_1`` until the size/ratio band is hit.

    Roots are tried in ascending order. A root needs at least ``d`` retained
    neighbours; each failed root, and the root of each growth that stalls or
    overshoots the band, joins the rejected set ``B``. At most ``l0_cap``
    roots are tried in total; ``start``, ``rejected`` and ``attempts`` resume
    an earlier search.

    Raises
    ------
    RootSearchExhausted
        No root reached ``d`` retained neighbours.
    GrowthStalled, BandMissed
        The last qualifying root's tree died, ran out of rounds, or
        overshot ``2 * i0`` outside the band.
    """
    p_record = p1 if p is None else p
    sampler = _exposed(sampler, graph)
    rejected_mask = np.zeros(graph.n, dtype=bool)
    rejected_mask[list(rejected)] = True
    rejected = rejected_mask
    b_counts = _b_counts(graph, rejected)

    def reject(v):
        rejected[v] = True
        b_counts[graph.neighbors(v)] += 1

    failure: Optional[TreeGrowthFailure] = None
    for root in range(start, graph.n):
        if attempts >= params.l0_cap:
            break
        attempts += 1
        pr = _Probe(graph, sampler, p_record, rejected, _r1(params, rejected, b_counts))
        fresh, u = pr.probe(root)
        children = fresh[u < p1]
        if len(children) < params.d:
            reject(root)
            continue
        in_tree = np.zeros(graph.n, dtype=bool)
        in_tree[root] = True
        in_tree[children] = True
        order = [root, *children.tolist()]
        parent = {int(c): root for c in children.tolist()}
        tree_edges = [(root, int(c)) for c in children.tolist()]
        frontier = children.tolist()
        level = 1
        while True:
            if _in_band(len(order), len(frontier), params):
                return TreeState(
                    n=graph.n, vertices=tuple(order), frontier=tuple(frontier),
                    rejected=frozenset(np.flatnonzero(rejected).tolist()), parent=parent,
                    tree_edges=tuple(tree_edges), round=level, probed=pr.probed,
                    cutoff=pr.cutoff, probe_order=tuple(pr.order),
                    sampled=pr.sampled_array(), probes=pr.count, attempts=attempts,
                    exposure=sampler)
            if len(order) > 2 * params.i0:
                failure = BandMissed(f"tree reached {len(order)} > 2*i0 = {2 * params.i0} "
                                     "outside the ratio band", attempts)
                break
            if not frontier or level >= params.round_cap:
                failure = GrowthStalled(f"tree from root {root} stopped at {len(order)} vertices "
                                        f"after {level} levels", attempts)
                break
            nxt = []
            for w in frontier:
                fresh, u = pr.probe(w)
                for x in fresh[u < p1].tolist():
                    if not in_tree[x]:
                        in_tree[x] = True
                        parent[x] = w
                        tree_edges.append((w, x))
                        order.append(x)
                        nxt.append(x)
            frontier = nxt
            level += 1
        log.debug("root %d rejected: %s", root, failure)
        reject(root)
    if failure is None:
        raise RootSearchExhausted(
            f"no root among {attempts} tried has {params.d} retained neighbours", attempts)
    failure.attempts = attempts
    raise failure


def expand_frontier(graph: Graph, state: TreeState, sampler: CoupledSampler, p1: float,
                    params: WitnessParams, p: Optional[float] = None) -> RoundOutcome:
    """One frontier round.

    Classification order: internal-heavy if probes back into the tree reach
    ``(eps/10) r s``; heavy-bipartite if probes into heavy vertices reach the
    same count; grew if the trimmed matching exceeds ``(1 + eps/25) s``;
    otherwise finalize. The grown state is returned in every case.
    """
    eps, r = params.epsilon, params.r
    sampler = _exposed(sampler, graph, state)
    rejected = np.zeros(graph.n, dtype=bool)
    rejected[list(state.rejected)] = True
    r1 = _r1(params, rejected, _b_counts(graph, rejected))
    pr = _Probe(graph, sampler, p1 if p is None else p, rejected, r1, state)
    in_tree = np.zeros(graph.n, dtype=bool)
    in_tree[list(state.vertices)] = True

    src, dst, var = [], [], []
    for w in state.frontier:
        fresh, u = pr.probe(w)
        src.append(np.full(len(fresh), w, dtype=np.int64))
        dst.append(fresh)
        var.append(u)
    src = np.concatenate(src) if src else np.zeros(0, np.int64)
    dst = np.concatenate(dst) if dst else np.zeros(0, np.int64)
    var = np.concatenate(var) if var else np.zeros(0)
    pairs = np.stack([src, dst], axis=1)

    internal = in_tree[dst]
    outside = ~internal
    targets, counts = np.unique(dst[outside], return_counts=True)
    heavy = targets[counts >= params.heavy_multiplier * r]
    to_heavy = outside & np.isin(dst, heavy)
    eligible = outside & ~to_heavy
    kept = eligible & (var < p1)

    ret_src = src[kept]
    frontier_deg = dict(zip(*np.unique(ret_src, return_counts=True)))
    overloaded = {int(w) for w, c in frontier_deg.items() if c > params.trim_degree}
    ok = kept.copy()
    if overloaded:
        ok &= ~np.isin(src, list(overloaded))
    idx = np.flatnonzero(ok)
    _, first = np.unique(dst[idx], return_index=True)
    match_idx = np.sort(idx[first])
    matching = pairs[match_idx]

    order = list(state.vertices)
    parent = dict(state.parent)
    new_front = sorted(int(x) for x in matching[:, 1].tolist())
    for w, x in matching.tolist():
        parent[x] = w
    order.extend(new_front)
    new_state = replace(
        state, vertices=tuple(order), frontier=tuple(new_front), parent=parent,
        tree_edges=state.tree_edges + tuple((int(w), int(x)) for w, x in matching.tolist()),
        round=state.round + 1, probed=pr.probed, cutoff=pr.cutoff,
        probe_order=tuple(pr.order), sampled=pr.sampled_array(), probes=pr.count,
        exposure=sampler)

    ledger = RoundLedger(
        probed_pairs=pairs, internal=pairs[internal],
        heavy=frozenset(heavy.tolist()), heavy_pairs=pairs[to_heavy],
        eligible=pairs[eligible], retained=pairs[kept],
        new_neighbors=frozenset(dst[kept].tolist()), matching=matching)

    s = len(state.frontier)
    threshold = eps / 10 * r * s
    if s and internal.sum() >= threshold:
        kind, pool = INTERNAL_HEAVY, pairs[internal & (var >= p1)]
    elif s and to_heavy.sum() >= threshold:
        kind, pool = HEAVY_BIPARTITE, pairs[to_heavy & (var < (p1 if p is None else p))]
    elif len(matching) > (1 + eps / 25) * s:
        kind, pool = GREW, pairs[:0]
    else:
        kind, pool = FINALIZE, pairs[:0]
    return RoundOutcome(kind, ledger, new_state, pool)


def sprinkle_certify(n: int, base_edges, pool, p2: float, uniforms,
                     ell: int) -> Optional[Certificate]:
    """Retain each pool pair whose variate is below ``p2``, add the base edges,
    and search the result for a certificate (verified before returning)."""
    if not 0.0 <= p2 <= 1.0:
        raise ValueError(f"p2 must lie in [0, 1], got {p2}")
    base = np.asarray(base_edges, dtype=np.int64).reshape(-1, 2)
    pool = np.asarray(pool, dtype=np.int64).reshape(-1, 2)
    uniforms = np.asarray(uniforms, dtype=float).reshape(-1)
    kept = pool[uniforms < p2]
    both = np.sort(np.concatenate([base, kept]), axis=1)
    both = np.unique(both, axis=0) if len(both) else both
    # search on the touched vertices only; a planar host has no certificate
    labels, compact = np.unique(both, return_inverse=True)
    host = Graph.from_pairs(len(labels), compact.reshape(-1, 2))
    if is_planar(host):
        return None
    cert = density_certificate(host, ell)
    if cert is None or not verify_certificate(host, cert):
        return None
    relabel = labels.tolist()
    return Certificate(
        cert.g, tuple(relabel[v] for v in cert.vertices),
        tuple((relabel[a], relabel[b]) for a, b in cert.edges),
        tuple(tuple(relabel[x] for x in path) for path in cert.paths))


def _explored_certificate(state: TreeState, p1: float, p2: float, ell: int):
    sampled = state.sampled
    if len(sampled) == 0:
        return None
    edges = sampled[:, :2].astype(np.int64)
    u = sampled[:, 2]
    first = u < p1
    # pairs outside the sampled list have variate >= p and are never sprinkled in
    cond = (u[~first] - p1) / (1.0 - p1) if p1 < 1 else np.ones((~first).sum())
    return sprinkle_certify(state.n, edges[first], edges[~first], p2, cond, ell)


def find_witness(graph: Graph, epsilon: float, seed: int,
                 params: Optional[WitnessParams] = None, stream_id: int = 0,
                 p: Optional[float] = None) -> WitnessReport:
    """Run the full search on one sample ``G_p`` with ``p = (1 + eps)/r``.

    ``p`` may be overridden (e.g. subcritical controls); ``p1`` is then
    ``min((1 + eps/2)/r, p)``. A returned certificate is always re-verified
    against the complete sample drawn from the same sampler.
    """
    if params is None:
        r = int(graph.degrees.min()) if graph.n else 0
        params = WitnessParams.for_graph(epsilon, max(r, 1), graph.n)
    r = params.r
    if p is None:
        p = min(1.0, (1 + epsilon) / r)
    p1 = min((1 + epsilon / 2) / r, p)
    p2 = split_probability(p, p1)
    sampler = _exposed(coupled_sampler(graph, seed, stream_id), graph)

    def report(outcome, cert, mechanism, reason, rounds, state):
        if cert is not None:
            sample = sampler.query(p)
            check = verify_certificate(sample, cert)
            if not check:
                raise AssertionError(f"witness produced an unsound certificate: {check.reason}")
        return WitnessReport(
            outcome=outcome, certificate=cert, mechanism=mechanism, reason=reason,
            rounds=rounds, tree_size=state.size if state else 0,
            probes=state.probes if state else 0, seed=seed, stream_id=stream_id,
            p=p, p1=p1, p2=p2)

    mechanisms = {INTERNAL_HEAVY: "internal-sprinkle", HEAVY_BIPARTITE: "heavy-bipartite",
                  FINALIZE: "density-after-growth"}
    state: Optional[TreeState] = None
    rounds = 0
    while True:
        # a tree whose frontier dies hands the search back to the next root
        try:
            if state is None:
                state = initial_tree_growth(graph, sampler, p1, params, p=p)
            else:
                root = state.vertices[0]
                state = initial_tree_growth(graph, sampler, p1, params, p=p, start=root + 1,
                                            rejected=state.rejected | {root},
                                            attempts=state.attempts)
        except TreeGrowthFailure as exc:
            return report("exhausted", None, "", exc.reason, rounds, state)

        last_tried = -1
        for _ in range(params.round_cap):
            if not state.frontier:
                break
            outcome = expand_frontier(graph, state, sampler, p1, params, p=p)
            rounds += 1
            state = outcome.state
            if outcome.kind in mechanisms and len(state.sampled) != last_tried:
                last_tried = len(state.sampled)
                cert = _explored_certificate(state, p1, p2, params.ell)
                if cert is not None:
                    return report("certified", cert, mechanisms[outcome.kind], "", rounds, state)
        if len(state.sampled) != last_tried:
            cert = _explored_certificate(state, p1, p2, params.ell)
            if cert is not None:
                return report("certified", cert, "density-after-growth", "", rounds, state)
        if state.frontier:
            return report("exhausted", None, "", "round-cap", rounds, state)
        log.debug("frontier of the tree from root %d died", state.vertices[0])
