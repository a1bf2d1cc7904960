"""Seeded Bernoulli edge percolation.

Every unordered vertex pair ``(u, v)`` with ``u < v`` of an ``n``-vertex graph
gets a uniform variate that is a pure function of ``(seed, stream_id,
u * n + v)``: the variate is the SplitMix64 output at counter ``u * n + v``
of a stream keyed by ``(seed, stream_id)``. Nothing is shared between edges,
so a sample does not depend on the order in which edges are visited, and
samples at different ``p`` from the same stream are nested.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph

__all__ = [
    "SampleParams",
    "CoupledSampler",
    "derive_seed",
    "pair_uniforms",
    "coupled_sampler",
    "query",
    "percolate",
    "split_probability",
    "two_round_sample",
    "sample_gnp",
]

_MASK64 = (1 << 64) - 1
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


def _mix(z: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def _stream_key(seed: int, stream_id: int) -> np.ndarray:
    s = np.array([seed & _MASK64], dtype=np.uint64)
    t = np.array([stream_id & _MASK64], dtype=np.uint64)
    with np.errstate(over="ignore"):
        return _mix(_mix(s ^ np.uint64(0x5DEECE66D)) + t * _GOLDEN)


def pair_uniforms(seed: int, stream_id: int, codes) -> np.ndarray:
    """Uniform variates in [0, 1) for pair codes ``u * n + v``."""
    codes = np.asarray(codes, dtype=np.int64).astype(np.uint64)
    key = _stream_key(seed, stream_id)
    with np.errstate(over="ignore"):
        bits = _mix(key + (codes + np.uint64(1)) * _GOLDEN)
    return (bits >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))


def derive_seed(*parts) -> int:
    """Deterministic 63-bit seed from a tuple of ints/strings."""
    digest = hashlib.blake2b(repr(tuple(parts)).encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little") >> 1


def _check_probability(p: float, name: str = "p") -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {p}")
    return p


@dataclass(frozen=True)
class SampleParams:
    p: float
    seed: int
    stream_id: int = 0

    def __post_init__(self):
        _check_probability(self.p)


@dataclass(frozen=True)
class CoupledSampler:
    """Fixed per-edge variates of one graph; ``query`` thresholds them."""

    graph: Graph
    seed: int
    stream_id: int = 0
    variates: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        u = pair_uniforms(self.seed, self.stream_id, self.graph.pair_codes())
        u.flags.writeable = False
        object.__setattr__(self, "variates", u)

    def uniforms(self, us, vs) -> np.ndarray:
        """Variates of arbitrary pairs (either orientation) of the base graph."""
        us = np.asarray(us, dtype=np.int64)
        vs = np.asarray(vs, dtype=np.int64)
        lo, hi = np.minimum(us, vs), np.maximum(us, vs)
        return pair_uniforms(self.seed, self.stream_id, lo * self.graph.n + hi)

    def query(self, p: float) -> Graph:
        return self.graph.edge_subgraph(self.variates < _check_probability(p))


def coupled_sampler(graph: Graph, seed: int, stream_id: int = 0) -> CoupledSampler:
    return CoupledSampler(graph, seed, stream_id)


def query(sampler: CoupledSampler, p: float) -> Graph:
    return sampler.query(p)


def percolate(graph: Graph, params: SampleParams) -> Graph:
    """Keep each edge independently with probability ``params.p``."""
    return coupled_sampler(graph, params.seed, params.stream_id).query(params.p)


def split_probability(p: float, p1: float) -> float:
    """Second-round probability ``p2`` with ``(1 - p1)(1 - p2) = 1 - p``."""
    p, p1 = _check_probability(p), _check_probability(p1, "p1")
    if p1 > p:
        raise ValueError(f"p1 = {p1} exceeds p = {p}")
    if p == 1.0:
        if p1 < 1.0:
            raise ValueError("p = 1 cannot be split with p1 < 1")
        return 0.0
    return 1.0 - (1.0 - p) / (1.0 - p1)


def two_round_sample(graph: Graph, p1: float, p2: float, seed: int,
                     stream_id: int = 0) -> tuple[Graph, Graph]:
    """Two independent percolations of ``graph``; their union is ``G_p`` with
    ``p = 1 - (1 - p1)(1 - p2)``."""
    _check_probability(p1, "p1")
    _check_probability(p2, "p2")
    g1 = coupled_sampler(graph, derive_seed(seed, stream_id, "round", 1)).query(p1)
    g2 = coupled_sampler(graph, derive_seed(seed, stream_id, "round", 2)).query(p2)
    return g1, g2


def _decode_pairs(k: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    # pair index k enumerates (u, v), u < v, lexicographically
    def offset(u):
        return u * n - u * (u + 1) // 2

    b = 2 * n - 1
    u = np.floor((b - np.sqrt(np.maximum(b * b - 8.0 * k, 0.0))) / 2).astype(np.int64)
    u = np.clip(u, 0, n - 2)
    while True:
        low = offset(u) > k
        high = offset(u + 1) <= k
        if not (low.any() or high.any()):
            break
        u = u - low + high
    v = k - offset(u) + u + 1
    return u, v


def sample_gnp(n: int, p: float, seed: int, stream_id: int = 0,
               batch: int = 1 << 16) -> Graph:
    """Percolation of the complete graph ``K_n`` without materialising it.

    Gaps between retained pairs (in lexicographic pair order) are geometric,
    which gives the same distribution as :func:`percolate` on ``K_n``; the
    variates are drawn from a separate Philox stream, so samples are not
    coupled with :class:`CoupledSampler` draws.
    """
    p = _check_probability(p)
    total = n * (n - 1) // 2
    if p == 0.0 or total == 0:
        return Graph(n, np.zeros((0, 2), dtype=np.int64))
    if p == 1.0:
        k = np.arange(total, dtype=np.int64)
    else:
        rng = np.random.Generator(np.random.Philox(key=[seed & _MASK64, stream_id & _MASK64]))
        chunks = []
        pos = -1
        mean = total * p
        size = int(mean + 6 * np.sqrt(mean)) + 16
        while pos < total:
            gaps = rng.geometric(p, size=size)
            steps = pos + np.cumsum(gaps)
            chunks.append(steps[steps < total])
            pos = int(steps[-1])
            size = min(batch, size)
        k = np.concatenate(chunks)
    u, v = _decode_pairs(k, n)
    return Graph(n, np.stack([u, v], axis=1))
