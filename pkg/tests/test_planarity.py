import dataclasses
import itertools
import random
from fractions import Fraction

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import (all_graphs, as_graph, brute_force_nonplanar, planar_corpus, random_edges,
                     random_tree)
from percoplanar.generators import complete_bipartite, complete_graph, grid, hypercube
from percoplanar.graph import Finite, build_graph, girth
from percoplanar.planarity import (Certificate, CertificateFormatError, OracleVerdict,
                                   density_certificate, euler_bound, euler_slack, format_certificate,
                                   is_planar, kuratowski_certificate, oracle_verdict,
                                   parse_certificate, subdivision_certificate, verify_certificate)

PETERSEN = as_graph(10, list(nx.petersen_graph().edges()))


def subdivide(n, edges, every=1):
    out, nxt = [], n
    for i, (u, v) in enumerate(edges):
        if i % every == 0:
            out += [(u, nxt), (nxt, v)]
            nxt += 1
        else:
            out.append((u, v))
    return nxt, out


# --- bounds -------------------------------------------------------------------


def test_euler_bound_examples():
    assert euler_bound(5, 3) == 9
    assert euler_bound(6, 4) == 8
    assert euler_bound(10, 5) == Fraction(40, 3)
    assert isinstance(euler_bound(7, 6), Fraction)
    for bad in [(2, 3), (5, 2)]:
        with pytest.raises(ValueError):
            euler_bound(*bad)


def test_euler_slack_above_bound():
    for n in range(3, 30):
        for g in range(3, 12):
            assert euler_slack(n, g) > euler_bound(n, g)


# --- oracle -------------------------------------------------------------------


def test_oracle_examples():
    assert is_planar(complete_graph(4))
    assert not is_planar(complete_graph(5))
    assert not is_planar(complete_bipartite(3, 3))
    assert not is_planar(PETERSEN)
    assert is_planar(build_graph(0, []))
    assert is_planar(hypercube(3))
    assert not is_planar(hypercube(4))


def test_oracle_subdivisions():
    n, e = subdivide(5, complete_graph(5).edge_list())
    assert not is_planar(as_graph(n, e))
    n, e = subdivide(6, complete_bipartite(3, 3).edge_list(), every=2)
    assert not is_planar(as_graph(n, e))


def test_oracle_verdict():
    assert oracle_verdict(complete_graph(6)) == OracleVerdict(False, "m = 15 > 3n - 6 = 12")
    assert oracle_verdict(grid(3, 3)).planar
    assert verify_certificate(complete_graph(5), oracle_verdict(complete_graph(5)))
    assert not verify_certificate(complete_graph(4), OracleVerdict(False))
    assert not verify_certificate(complete_graph(4), OracleVerdict(True))


def test_oracle_brute_force_small_exhaustive():
    for n in range(1, 6):
        for edges in all_graphs(n):
            assert is_planar(as_graph(n, edges)) == (not brute_force_nonplanar(n, edges))


def test_oracle_brute_force_random_sample():
    rng = random.Random(3)
    for _ in range(500):
        n = rng.choice((7, 8))
        edges = random_edges(n, rng.uniform(0.3, 0.8), rng)
        assert is_planar(as_graph(n, edges)) == (not brute_force_nonplanar(n, edges))


# --- density bound on planar graphs ----------------------------------------------


def test_density_bound_holds_on_planar_corpus():
    for n, edges in planar_corpus(300, seed=2):
        g = as_graph(n, edges)
        assert is_planar(g)
        gi = girth(g, max(3, n))
        if isinstance(gi, Finite) and n >= 3:
            assert Fraction(g.m) <= euler_bound(n, gi.value)


# --- certificates -----------------------------------------------------------------


def test_k5_certificate():
    cert = density_certificate(complete_graph(5), 3)
    assert (cert.n_prime, cert.m_prime, cert.g) == (5, 10, 3)
    assert cert.kind == "density-girth"
    assert verify_certificate(complete_graph(5), cert)


def test_no_certificate_for_tree_and_cycle():
    rng = random.Random(0)
    assert density_certificate(as_graph(30, random_tree(30, rng)), 5) is None
    c5 = build_graph(5, [(i, (i + 1) % 5) for i in range(5)])
    assert density_certificate(c5, 3) is None


def test_verify_rejections():
    cert = density_certificate(complete_graph(5), 3)
    k5_minus = build_graph(5, [e for e in complete_graph(5).edge_list() if e != (0, 1)])
    assert verify_certificate(k5_minus, cert).reason == "missing-edge"
    tampered = dataclasses.replace(cert, m_prime=11)
    assert verify_certificate(complete_graph(5), tampered).reason == "count-mismatch"
    big_g = dataclasses.replace(cert, g=4)
    assert verify_certificate(complete_graph(5), big_g).reason == "girth-violated"
    k4 = Certificate(3, (0, 1, 2, 3), tuple(complete_graph(4).edge_list()))
    assert verify_certificate(complete_graph(4), k4).reason == "density-not-violated"
    assert verify_certificate(complete_graph(5), Certificate(3, (0, 1), ((0, 1),))).reason \
        == "too-few-vertices"


def test_k33_density_certificate():
    g = complete_bipartite(3, 3)
    cert = density_certificate(g, 3)
    assert cert is not None and cert.g == 4
    assert verify_certificate(g, cert)


def test_subdivision_certificate_on_subdivided_k5():
    n, edges = subdivide(5, complete_graph(5).edge_list())
    host = as_graph(n, edges)
    cert = subdivision_certificate(host, 3)
    assert cert is not None and cert.kind == "subdivision"
    assert cert.vertices == (0, 1, 2, 3, 4) and len(cert.edges) == 10
    assert verify_certificate(host, cert)
    # two branch paths sharing an interior vertex is not a subdivision
    paths = list(cert.paths)
    paths[1] = paths[0]
    bad = dataclasses.replace(cert, paths=tuple(paths))
    assert verify_certificate(host, bad).reason in ("path-overlap", "missing-edge")


def test_kuratowski_certificate_petersen():
    cert = kuratowski_certificate(PETERSEN)
    assert cert is not None and cert.g == 4 and cert.n_prime == 6
    assert verify_certificate(PETERSEN, cert)
    assert kuratowski_certificate(grid(5, 5)) is None


def test_certificate_text_round_trip():
    n, edges = subdivide(6, complete_bipartite(3, 3).edge_list())
    host = as_graph(n, edges)
    for cert in (density_certificate(complete_graph(5), 3), density_certificate(host, 4)):
        text = format_certificate(cert)
        assert text.splitlines()[0] == f"certificate {cert.kind}"
        again = parse_certificate(text)
        assert again == cert
    assert verify_certificate(host, parse_certificate(format_certificate(
        density_certificate(host, 4))))


def test_certificate_text_errors():
    for bad in ("", "certificate other\n", "certificate density-girth\nvertices 0 1 2\n",
                "certificate density-girth\ng 3\nedges 0-1-2\n",
                "certificate density-girth\ng x\n", "certificate density-girth\ng 3\nfoo 1\n"):
        with pytest.raises(CertificateFormatError):
            parse_certificate(bad)


@st.composite
def random_graph(draw):
    n = draw(st.integers(5, 14))
    pairs = list(itertools.combinations(range(n), 2))
    keep = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return as_graph(n, [e for e, k in zip(pairs, keep) if k])


@settings(max_examples=150, deadline=None)
@given(random_graph(), st.integers(3, 8))
def test_certificate_found_iff_nonplanar(g, ell):
    cert = density_certificate(g, ell)
    if cert is None:
        assert is_planar(g)
    else:
        assert verify_certificate(g, cert)
        assert not is_planar(g)


def test_soundness_on_sparse_random_graphs():
    rng = random.Random(8)
    for _ in range(60):
        n = rng.randint(50, 300)
        c = rng.uniform(1.2, 3.0)
        g = as_graph(n, random_edges(n, c / n, rng))
        for ell in (3, 6, 10):
            cert = density_certificate(g, ell)
            assert (cert is None) == is_planar(g)
            if cert is not None:
                assert verify_certificate(g, cert)
