import math
import random

import pytest

from setpack.instances import ParseError
from setpack.treelemma import (LabeledMultigraph, PreconditionError, TreeCertificate, beta,
                               build_decomposed_subgraph, check_decomposed_subgraph,
                               find_bounded_tree, level_size, random_labeled_multigraph,
                               read_certificate, read_mgraph, size_bound,
                               verify_tree_certificate, write_certificate, write_mgraph)


def plain(n, edges, gamma=1, labels=None):
    labels = labels or [()] * len(edges)
    return LabeledMultigraph(n, tuple(edges), tuple(frozenset(w) for w in labels), gamma)


def K(n):
    return [(u, v) for u in range(n) for v in range(u + 1, n)]


def deep_graph(depth, gamma, seed):
    """Root with three children, binary below, leaves wired by a random 2-regular multigraph.

    Shallow tree edges share symbols with edges near the leaves, so the
    banned-edge rule has something to exclude.
    """
    rng = random.Random(seed)
    edges, vdepth, frontier, n = [], {0: 0}, [], 1
    for _ in range(3):
        edges.append((0, n))
        vdepth[n] = 1
        frontier.append(n)
        n += 1
    for d in range(2, depth + 1):
        nxt = []
        for v in frontier:
            for _ in range(2):
                edges.append((v, n))
                vdepth[n] = d
                nxt.append(n)
                n += 1
        frontier = nxt
    n_tree = len(edges)
    stubs = frontier * 2
    while True:
        rng.shuffle(stubs)
        pairs = [(stubs[i], stubs[i + 1]) for i in range(0, len(stubs), 2)]
        if all(a != b for a, b in pairs):
            break
    edges += pairs
    labels = [set() for _ in edges]
    deep = list(range(n_tree, len(edges))) + [i for i in range(n_tree) if vdepth[edges[i][1]] >= depth - 1]
    sym = 0
    for e in range(n_tree):
        if vdepth[edges[e][1]] <= 3:
            for f in rng.sample(deep, gamma - 1):
                if len(labels[f]) < gamma:
                    labels[e].add(sym)
                    labels[f].add(sym)
                    sym += 1
    return plain(n, edges, gamma, labels)


@pytest.mark.parametrize("gamma, expected", [(1, 7), (2, 10), (4, 13), (3, 12)])
def test_beta_values(gamma, expected):
    b = beta(gamma)
    assert b == expected
    assert 1.5 ** b >= 12 * gamma ** 2 > 1.5 ** (b - 1)


def test_beta_rejects_zero():
    with pytest.raises(ValueError):
        beta(0)


def test_level_size():
    assert [level_size(j) for j in range(6)] == [2, 3, 4, 6, 10, 15]
    assert all(level_size(j) == math.floor(2 * 1.5 ** j) for j in range(30))


def test_triple_parallel_edge():
    H = plain(2, [(0, 1)] * 3)
    cert = find_bounded_tree(H)
    assert cert.vertices == {0, 1} and cert.tree_edges == (0,) and cert.extra == (1, 2)
    assert verify_tree_certificate(H, cert)
    sub = build_decomposed_subgraph(H)
    assert len(sub.vertices) == 2 and len(sub.edges) == 3
    assert [set(b) for b in sub.decomposition.bags] == [{0, 1}, {0, 1}]
    assert sub.decomposition.width == 1


def test_two_adjacent_parallel_pairs():
    # u=0, v=1, w=2: 0=1 doubled, 1=2 doubled, plus 0-2
    H = plain(3, [(0, 1), (0, 1), (1, 2), (1, 2), (0, 2)])
    cert = find_bounded_tree(H)
    assert cert.vertices == {0, 1, 2} and cert.root == 1
    assert cert.tree_edges == (0, 2) and cert.extra == (1, 3)
    assert verify_tree_certificate(H, cert)


def test_every_vertex_on_a_parallel_pair():
    H = plain(4, [(0, 1), (0, 1), (2, 3), (2, 3), (0, 2), (1, 3)])
    cert = find_bounded_tree(H)
    assert cert.case == "all-paired"
    assert cert.vertices == {0, 1, 2, 3} and cert.tree_edges == (0, 2, 4) and cert.extra == (1, 3)
    assert verify_tree_certificate(H, cert)
    sub = build_decomposed_subgraph(H)
    assert len(sub.edges) == len(sub.vertices) + 1


def test_k4_empty_labels():
    H = plain(4, K(4))
    cert = find_bounded_tree(H)
    assert verify_tree_certificate(H, cert)
    assert len(cert.vertices) <= 4 * (math.log(4, 1.5) + 2)
    sub = build_decomposed_subgraph(H)
    assert len(sub.edges) == len(sub.vertices) + 1
    assert check_decomposed_subgraph(H, sub) == []


def test_preconditions():
    with pytest.raises(PreconditionError):
        find_bounded_tree(plain(3, [(0, 1), (1, 2), (0, 2)]))  # degree 2
    with pytest.raises(PreconditionError):
        find_bounded_tree(plain(4, K(4), gamma=1, labels=[(1, 2)] + [()] * 5))
    with pytest.raises(PreconditionError):
        find_bounded_tree(plain(4, K(4), gamma=1, labels=[(1,), (1,)] + [()] * 4))
    with pytest.raises(PreconditionError):
        find_bounded_tree(plain(4, K(4) + [(2, 2)]))
    with pytest.raises(PreconditionError):
        find_bounded_tree(plain(4, K(4), gamma=0))


def test_verifier_rejects_five_leaves():
    H = plain(6, K(6))
    eid = {e: i for i, e in enumerate(K(6))}
    star5 = TreeCertificate(frozenset(range(6)), tuple(eid[(0, v)] for v in range(1, 6)), 0,
                            (eid[(1, 2)], eid[(3, 4)]))
    assert not verify_tree_certificate(H, star5)
    star4 = TreeCertificate(frozenset(range(5)), tuple(eid[(0, v)] for v in range(1, 5)), 0,
                            (eid[(1, 2)], eid[(3, 4)]))
    assert verify_tree_certificate(H, star4)


def test_verifier_rejects_far_label_sharing():
    # path 0-1-...-9 rooted at 0, extras 0-2 and 0-3; gamma=1 so beta=7
    edges = [(i, i + 1) for i in range(9)] + [(0, 2), (0, 3)]
    cert = TreeCertificate(frozenset(range(10)), tuple(range(9)), 0, (9, 10))
    far = [(5,)] + [()] * 7 + [(5,)] + [(), ()]   # edges at distance 0 and 8
    near = [(5,)] + [()] * 6 + [(5,), ()] + [(), ()]  # distance 0 and 7
    assert not verify_tree_certificate(plain(10, edges, 1, far), cert)
    assert verify_tree_certificate(plain(10, edges, 1, near), cert)


def test_verifier_rejects_broken_certificates():
    H = plain(4, K(4))
    good = find_bounded_tree(H)
    assert verify_tree_certificate(H, good)
    e1, e2 = good.extra
    bad = [
        TreeCertificate(good.vertices, good.tree_edges, good.root, (e1, e1)),
        TreeCertificate(good.vertices, good.tree_edges, good.root, (good.tree_edges[0], e2)),
        TreeCertificate(good.vertices, good.tree_edges[1:], good.root, good.extra),
        TreeCertificate(good.vertices, good.tree_edges, 99, good.extra),
        TreeCertificate(good.vertices, good.tree_edges, good.root, (e1, 99)),
    ]
    for cert in bad:
        assert not verify_tree_certificate(H, cert)


def test_verifier_rejects_oversized_tree():
    n = 60
    edges = [(i, i + 1) for i in range(n - 1)] + [(0, 2), (0, 3)]
    cert = TreeCertificate(frozenset(range(n)), tuple(range(n - 1)), 0, (n - 1, n))
    assert n > size_bound(n)
    assert not verify_tree_certificate(plain(n, edges), cert)


@pytest.mark.parametrize("n", [10, 100, 1000])
@pytest.mark.parametrize("gamma", [1, 2, 4])
def test_random_multigraphs(n, gamma):
    for seed in range(8):
        H = random_labeled_multigraph(n, gamma, seed)
        H.check()
        cert = find_bounded_tree(H)
        assert verify_tree_certificate(H, cert)
        sub = build_decomposed_subgraph(H)
        assert len(sub.edges) == len(sub.vertices) + 1
        assert sub.decomposition.width <= 4 * (beta(gamma) + 3)
        assert check_decomposed_subgraph(H, sub) == []


def test_random_cubic_gamma1_properties():
    H = random_labeled_multigraph(100, 1, 7)
    sub = build_decomposed_subgraph(H)
    assert check_decomposed_subgraph(H, sub) == []


@pytest.mark.parametrize("depth, gamma", [(9, 1), (12, 2)])
def test_deep_growth_with_banned_edges(depth, gamma):
    H = deep_graph(depth, gamma, 1)
    H.check()
    trace = {}
    cert = find_bounded_tree(H, trace)
    assert trace["levels"] > beta(gamma)
    if gamma > 1:
        assert trace["banned"] > 0
    assert verify_tree_certificate(H, cert)
    sub = build_decomposed_subgraph(H)
    assert check_decomposed_subgraph(H, sub) == []


def test_check_detects_broken_decomposition():
    H = plain(4, K(4))
    sub = build_decomposed_subgraph(H)
    from dataclasses import replace
    from setpack.pathdecomp import PathDecomposition
    broken = replace(sub, decomposition=PathDecomposition([{v} for v in sorted(sub.vertices)]))
    assert check_decomposed_subgraph(H, broken)


def test_deterministic():
    H = random_labeled_multigraph(200, 2, 3)
    assert find_bounded_tree(H) == find_bounded_tree(H)
    assert random_labeled_multigraph(200, 2, 3) == H


def test_mgraph_roundtrip():
    H = random_labeled_multigraph(30, 2, 1)
    assert read_mgraph(write_mgraph(H)) == H
    cert = find_bounded_tree(H)
    back = read_certificate(write_certificate(cert))
    assert (back.vertices, back.tree_edges, back.root, back.extra) == \
        (cert.vertices, cert.tree_edges, cert.root, cert.extra)


@pytest.mark.parametrize("text", [
    "e 1 2\n",
    "p mgraph 2 1 1\ne 1 3\n",
    "p mgraph 2 2 1\ne 1 2\n",
    "p mgraph 2 1 1\nq\n",
    "p mgraph 2 1 x\ne 1 2\n",
])
def test_mgraph_parse_errors(text):
    with pytest.raises(ParseError):
        read_mgraph(text)


def test_certificate_parse_errors():
    with pytest.raises(ParseError):
        read_certificate("root 1\nvertices 1 2\n")
    with pytest.raises(ParseError):
        read_certificate("root 1 2\nvertices 1 2\ntree 1\nextra 2 3\n")
