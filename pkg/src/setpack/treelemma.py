"""Bounded trees with two extra edges in labeled multigraphs of minimum degree 3.

Given a multigraph whose edges carry small symbol sets (each symbol on few
edges), :func:`find_bounded_tree` returns a tree ``T0`` on
``O(log n)`` vertices with at most 4 leaves, two further edges spanned by its
vertex set, and the property that label-sharing tree edges sit at most
``beta(gamma)`` levels apart.  :func:`build_decomposed_subgraph` turns such a
certificate into a subgraph with one more edge than vertices plus a path
decomposition of bounded width.

Text format (vertex ids 1-based, edge ids are 1-based line order)::

    p mgraph <n> <m> <gamma>
    e <u> <v> <symbol> <symbol> ...
"""
from __future__ import annotations

import math
import random
from collections import defaultdict, deque
from dataclasses import dataclass
from typing import Iterable, Optional

import networkx as nx

from .instances import ParseError
from .pathdecomp import PathDecomposition, validate_decomposition


class PreconditionError(ValueError):
    pass


class LemmaInvariantError(RuntimeError):
    """An inequality the construction relies on failed on this input."""


@dataclass(frozen=True)
class LabeledMultigraph:
    n: int
    edges: tuple[tuple[int, int], ...]
    labels: tuple[frozenset, ...]
    gamma: int

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple((int(u), int(v)) for u, v in self.edges))
        object.__setattr__(self, "labels", tuple(frozenset(w) for w in self.labels))
        if len(self.labels) != len(self.edges):
            raise PreconditionError("need one label set per edge")

    def incidence(self) -> list[list[tuple[int, int]]]:
        """``inc[v]`` lists ``(edge id, other endpoint)`` in edge-id order."""
        inc: list[list[tuple[int, int]]] = [[] for _ in range(self.n)]
        for eid, (u, v) in enumerate(self.edges):
            inc[u].append((eid, v))
            inc[v].append((eid, u))
        return inc

    def degrees(self) -> list[int]:
        deg = [0] * self.n
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def check(self, min_degree: int = 3) -> None:
        if self.gamma < 1:
            raise PreconditionError("gamma must be at least 1")
        for eid, (u, v) in enumerate(self.edges):
            if u == v:
                raise PreconditionError(f"edge {eid} is a self-loop")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise PreconditionError(f"edge {eid} has an endpoint out of range")
        low = [v for v, d in enumerate(self.degrees()) if d < min_degree]
        if low:
            raise PreconditionError(f"vertex {low[0]} has degree below {min_degree}")
        counts: dict = defaultdict(int)
        for eid, w in enumerate(self.labels):
            if len(w) > self.gamma:
                raise PreconditionError(f"edge {eid} has {len(w)} symbols, gamma={self.gamma}")
            for c in w:
                counts[c] += 1
        over = [c for c, cnt in counts.items() if cnt > self.gamma]
        if over:
            raise PreconditionError(f"symbol {over[0]!r} labels more than gamma edges")


@dataclass(frozen=True)
class TreeCertificate:
    vertices: frozenset
    tree_edges: tuple[int, ...]
    root: int
    extra: tuple[int, int]
    case: str = ""


def beta(gamma: int) -> int:
    """``ceil(log_{3/2}(12 gamma^2))``, computed exactly in integers."""
    if gamma < 1:
        raise ValueError("gamma must be at least 1")
    target = 12 * gamma * gamma
    b = 0
    while 3 ** b < target * 2 ** b:
        b += 1
    return b


def level_size(j: int) -> int:
    """``floor(2 (3/2)^j)``."""
    return (2 * 3 ** j) // (2 ** j)


def size_bound(n: int) -> float:
    return 4 * (math.log(n, 1.5) + 2)


def _tree_depths(H: LabeledMultigraph, vertices, tree_edges, root) -> Optional[dict[int, int]]:
    adj = defaultdict(list)
    for eid in tree_edges:
        u, v = H.edges[eid]
        adj[u].append(v)
        adj[v].append(u)
    depth = {root: 0}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in depth:
                depth[v] = depth[u] + 1
                queue.append(v)
    if set(depth) != set(vertices):
        return None
    return depth


def verify_tree_certificate(H: LabeledMultigraph, cert: TreeCertificate) -> bool:
    V0, E0 = set(cert.vertices), list(cert.tree_edges)
    m = len(H.edges)
    if cert.root not in V0 or len(set(E0)) != len(E0):
        return False
    if any(not 0 <= e < m for e in E0 + list(cert.extra)):
        return False
    if any(not set(H.edges[e]) <= V0 for e in E0):
        return False
    if len(E0) != len(V0) - 1:
        return False
    depth = _tree_depths(H, V0, E0, cert.root)
    if depth is None:
        return False
    if len(V0) > size_bound(H.n) + 1e-9:
        return False
    e1, e2 = cert.extra
    if e1 == e2 or e1 in E0 or e2 in E0:
        return False
    if not (set(H.edges[e1]) <= V0 and set(H.edges[e2]) <= V0):
        return False
    deg: dict = defaultdict(int)
    for e in E0:
        u, v = H.edges[e]
        deg[u] += 1
        deg[v] += 1
    if sum(1 for v in V0 if deg[v] == 1) > 4:
        return False
    b = beta(H.gamma)
    dist = {e: min(depth[H.edges[e][0]], depth[H.edges[e][1]]) for e in E0}
    for a in range(len(E0)):
        for c in range(a + 1, len(E0)):
            ea, ec = E0[a], E0[c]
            if H.labels[ea] & H.labels[ec] and abs(dist[ea] - dist[ec]) > b:
                return False
    return True


class _Growth:
    """Layered tree rooted at ``root`` with parent pointers."""

    def __init__(self, H: LabeledMultigraph, root: int):
        self.H = H
        self.depth = {root: 0}
        self.parent: dict[int, tuple[int, int]] = {}  # child -> (edge id, parent)
        self.levels = [[root]]
        self.edge_depth: dict[int, int] = {}  # tree edge -> depth of its child endpoint

    def attach(self, child: int, eid: int, par: int):
        self.depth[child] = self.depth[par] + 1
        self.parent[child] = (eid, par)
        self.edge_depth[eid] = self.depth[child]
        while len(self.levels) <= self.depth[child]:
            self.levels.append([])
        self.levels[self.depth[child]].append(child)

    def span(self, terminals: Iterable[int]) -> tuple[set[int], list[int], int]:
        """Vertices, edges and top vertex of the minimal subtree holding ``terminals``."""
        terminals = set(terminals)
        paths = []
        for t in terminals:
            path = [t]
            while path[-1] in self.parent:
                path.append(self.parent[path[-1]][1])
            paths.append(path)
        common = set(paths[0])
        for p in paths[1:]:
            common &= set(p)
        lca = max(common, key=lambda v: self.depth[v])
        verts, edges = set(), set()
        for p in paths:
            for v in p:
                verts.add(v)
                if v == lca:
                    break
                edges.add(self.parent[v][0])
        return verts, sorted(edges), lca


def _parallel_classes(H: LabeledMultigraph) -> dict[tuple[int, int], list[int]]:
    mult: dict[tuple[int, int], list[int]] = defaultdict(list)
    for eid, (u, v) in enumerate(H.edges):
        mult[(min(u, v), max(u, v))].append(eid)
    return mult


def _corner_cases(H: LabeledMultigraph) -> Optional[TreeCertificate]:
    mult = _parallel_classes(H)
    for (u, v), eids in sorted(mult.items()):
        if len(eids) >= 3:
            return TreeCertificate(frozenset({u, v}), (eids[0],), u, (eids[1], eids[2]), "triple")
    partners: dict[int, list[int]] = defaultdict(list)
    for (u, v), eids in sorted(mult.items()):
        if len(eids) == 2:
            partners[u].append(v)
            partners[v].append(u)
    for v in range(H.n):
        ps = sorted(partners[v])
        if len(ps) >= 2:
            u, w = ps[0], ps[1]
            ea, eb = mult[(min(u, v), max(u, v))][:2]
            ec, ed = mult[(min(v, w), max(v, w))][:2]
            return TreeCertificate(frozenset({u, v, w}), (ea, ec), v, (eb, ed), "double-pair")
    if H.n and all(partners[v] for v in range(H.n)):
        single = next(eids[0] for pair, eids in sorted(mult.items(), key=lambda kv: kv[1][0])
                      if len(eids) == 1)
        u, v = H.edges[single]
        u2, v2 = partners[u][0], partners[v][0]
        ea, eb = mult[(min(u, u2), max(u, u2))][:2]
        ec, ed = mult[(min(v, v2), max(v, v2))][:2]
        return TreeCertificate(frozenset({u, u2, v, v2}), tuple(sorted((ea, single, ec))), u,
                               (eb, ed), "all-paired")
    return None


def find_bounded_tree(H: LabeledMultigraph, trace: Optional[dict] = None) -> TreeCertificate:
    """Grow a layered tree until it stalls, then read off the certificate.

    Level ``j`` of the growing tree holds exactly ``floor(2 (3/2)^j)``
    vertices.  Edges whose symbols meet a tree edge more than ``beta`` levels
    up are never used for growth.  Ties go to the lowest vertex / edge id.
    ``trace``, when given, receives the final level and banned-edge counts.
    """
    H.check()
    cert = _corner_cases(H)
    if cert is not None:
        if trace is not None:
            trace.update(case=cert.case, levels=0, banned=0)
        return cert
    b = beta(H.gamma)
    inc = H.incidence()
    root = None
    for v in range(H.n):
        if len({w for _, w in inc[v]}) >= 3:
            root = v
            break
    if root is None:
        raise LemmaInvariantError("no vertex with three distinct neighbors outside the corner cases")
    T = _Growth(H, root)
    tree_edges: set[int] = set()
    first: dict[int, int] = {}
    for eid, w in inc[root]:
        first.setdefault(w, eid)
    for w in sorted(first)[:3]:
        T.attach(w, first[w], root)
        tree_edges.add(first[w])
    banned_total = 0
    i = 1
    while True:
        for j in range(1, i + 1):
            if len(T.levels[j]) != level_size(j):
                raise LemmaInvariantError(f"level {j} has {len(T.levels[j])} vertices")
        frontier = T.levels[i]
        E1 = sorted({eid for v in frontier for eid, _ in inc[v] if eid not in tree_edges})
        old_symbols = set()
        for eid, d in T.edge_depth.items():
            if d <= i - b:
                old_symbols |= H.labels[eid]
        banned = {e for e in E1 if H.labels[e] & old_symbols}
        banned_total += len(banned)
        inner = [e for e in E1 if H.edges[e][0] in T.depth and H.edges[e][1] in T.depth]
        groups: dict[int, list[int]] = defaultdict(list)
        for e in E1:
            if e in banned:
                continue
            u, v = H.edges[e]
            if u in T.depth and v in T.depth:
                continue
            outer = v if u in T.depth else u
            groups[outer].append(e)
        target = level_size(i + 1)
        if len(groups) >= target:
            for x in sorted(groups)[:target]:
                eid = groups[x][0]
                u, v = H.edges[eid]
                T.attach(x, eid, u if u != x else v)
                tree_edges.add(eid)
            i += 1
            continue
        cert = _stalled(H, T, inner, groups)
        if cert is None:
            raise LemmaInvariantError(
                f"growth stalled at level {i} with {len(groups)} < {target} new vertices, "
                f"{len(inner)} inner edges and {len(banned)} banned edges, yet no certificate")
        if trace is not None:
            trace.update(case=cert.case, levels=i, banned=banned_total)
        return cert


def _stalled(H, T: _Growth, inner: list[int], groups: dict[int, list[int]]) -> Optional[TreeCertificate]:
    def frontier_end(e: int, outer: int) -> int:
        u, v = H.edges[e]
        return u if v == outer else v

    shared = sorted((x for x in groups if len(groups[x]) >= 2), key=lambda x: groups[x][0])
    pendants: list[tuple[int, int, int]] = []  # (edge, tree endpoint, outer vertex)
    if len(inner) >= 2:
        e1, e2 = inner[0], inner[1]
        terminals = set(H.edges[e1]) | set(H.edges[e2])
        case = "two-inner"
    elif any(len(groups[x]) >= 3 for x in shared):
        x = next(x for x in shared if len(groups[x]) >= 3)
        ea, e1, e2 = groups[x][:3]
        terminals = {frontier_end(e, x) for e in (ea, e1, e2)}
        pendants = [(ea, frontier_end(ea, x), x)]
        case = "triple-share"
    elif len(shared) >= 2:
        x, y = shared[0], shared[1]
        ea, e1 = groups[x][:2]
        ec, e2 = groups[y][:2]
        terminals = {frontier_end(e, x) for e in (ea, e1)} | {frontier_end(e, y) for e in (ec, e2)}
        pendants = [(ea, frontier_end(ea, x), x), (ec, frontier_end(ec, y), y)]
        case = "two-shares"
    elif len(inner) == 1 and shared:
        x = shared[0]
        ea, e2 = groups[x][:2]
        e1 = inner[0]
        terminals = set(H.edges[e1]) | {frontier_end(e, x) for e in (ea, e2)}
        pendants = [(ea, frontier_end(ea, x), x)]
        case = "inner-and-share"
    else:
        return None
    verts, edges, lca = T.span(terminals)
    for eid, _, outer in pendants:
        verts.add(outer)
        edges.append(eid)
    return TreeCertificate(frozenset(verts), tuple(sorted(edges)), lca, (e1, e2), case)


@dataclass(frozen=True)
class DecomposedSubgraph:
    vertices: frozenset
    edges: tuple[int, ...]
    decomposition: PathDecomposition
    certificate: TreeCertificate
    beta: int


def build_decomposed_subgraph(H: LabeledMultigraph) -> DecomposedSubgraph:
    """Tree plus both extra edges, with bags spanning ``beta + 2`` consecutive levels."""
    cert = find_bounded_tree(H)
    b = beta(H.gamma)
    depth = _tree_depths(H, cert.vertices, cert.tree_edges, cert.root)
    if depth is None:
        raise LemmaInvariantError("certificate tree is not connected")
    levels: dict[int, set[int]] = defaultdict(set)
    for v, d in depth.items():
        levels[d].add(v)
    always = set(H.edges[cert.extra[0]]) | set(H.edges[cert.extra[1]])
    bags = []
    for i in range(max(levels) + 1):
        bag = set(always)
        for j in range(max(0, i - b - 1), i + 1):
            bag |= levels[j]
        bags.append(bag)
    out = DecomposedSubgraph(cert.vertices, tuple(sorted(cert.tree_edges + cert.extra)),
                             PathDecomposition(bags), cert, b)
    problems = check_decomposed_subgraph(H, out)
    if problems:
        raise LemmaInvariantError("; ".join(problems))
    return out


def check_decomposed_subgraph(H: LabeledMultigraph, sub: DecomposedSubgraph) -> list[str]:
    """Empty list iff properties (a) to (d), validity and the width bound hold."""
    problems = []
    V0, E0 = sub.vertices, sub.edges
    bags = sub.decomposition.bags
    if len(E0) != len(V0) + 1:
        problems.append(f"(a) |E0|={len(E0)} but |V0|={len(V0)}")
    if len(V0) > size_bound(H.n) + 1e-9:
        problems.append(f"(b) |V0|={len(V0)} exceeds {size_bound(H.n):.2f}")
    for i, e in enumerate(E0):
        for f in E0[i + 1:]:
            if H.labels[e] & H.labels[f]:
                ends = set(H.edges[e]) | set(H.edges[f])
                if not any(ends <= bag for bag in bags):
                    problems.append(f"(c) edges {e} and {f} share symbols but no bag holds them")
    for e in E0:
        u, v = H.edges[e]
        idx = [i for i, bag in enumerate(bags) if u in bag and v in bag]
        if not idx or idx[-1] - idx[0] + 1 != len(idx):
            problems.append(f"(d) bags holding edge {e} do not form an interval")
    g = nx.Graph()  # parallel edges do not change coverage
    g.add_nodes_from(V0)
    g.add_edges_from(H.edges[e] for e in E0)
    if not validate_decomposition(g, sub.decomposition):
        problems.append("bags are not a path decomposition of H0")
    if sub.decomposition.width > 4 * (sub.beta + 3):
        problems.append(f"width {sub.decomposition.width} exceeds {4 * (sub.beta + 3)}")
    return problems


def random_labeled_multigraph(n: int, gamma: int, seed: int, max_tries: int = 1000) -> LabeledMultigraph:
    """Random near-cubic multigraph without self-loops, labels respecting ``gamma``.

    Every vertex gets 3 stubs (vertex 0 gets 4 when ``n`` is odd).  Each edge
    receives up to ``gamma`` symbols, each symbol used on at most ``gamma`` edges.
    """
    if n < 2:
        raise ValueError("need at least two vertices")
    rng = random.Random(seed)
    stubs = [v for v in range(n) for _ in range(3)]
    if n % 2:
        stubs.append(0)
    for _ in range(max_tries):
        rng.shuffle(stubs)
        edges = [(stubs[i], stubs[i + 1]) for i in range(0, len(stubs), 2)]
        loops = [i for i, (u, v) in enumerate(edges) if u == v]
        # repair self-loops by swapping endpoints with random other edges
        for i in loops:
            for _ in range(100):
                j = rng.randrange(len(edges))
                (a, b), (c, d) = edges[i], edges[j]
                if a != d and c != b:
                    edges[i], edges[j] = (a, d), (c, b)
                    break
        if all(u != v for u, v in edges):
            break
    else:
        raise RuntimeError("could not draw a loop-free multigraph")
    return LabeledMultigraph(n, tuple(edges), tuple(random_labels(len(edges), gamma, rng)), gamma)


def random_labels(m: int, gamma: int, rng: random.Random) -> list[frozenset]:
    counts: dict[int, int] = {}
    open_symbols: list[int] = []
    labels = []
    for _ in range(m):
        size = rng.randint(0, gamma)
        w: set[int] = set()
        while len(w) < size:
            reusable = [c for c in open_symbols if c not in w]
            if reusable and rng.random() < 0.7:
                c = rng.choice(reusable)
            else:
                c = len(counts)
                counts[c] = 0
                open_symbols.append(c)
            w.add(c)
            counts[c] += 1
            if counts[c] >= gamma:
                open_symbols.remove(c)
        labels.append(frozenset(w))
    return labels


def read_mgraph(text: str) -> LabeledMultigraph:
    header = None
    edges, labels = [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split()
        if not parts or parts[0] == "c":
            continue
        try:
            if parts[0] == "p":
                if header is not None or len(parts) != 5 or parts[1] != "mgraph":
                    raise ParseError("expected a single 'p mgraph <n> <m> <gamma>' header", lineno)
                header = tuple(int(x) for x in parts[2:])
            elif parts[0] == "e":
                if header is None:
                    raise ParseError("edge before header", lineno)
                if len(parts) < 3:
                    raise ParseError("edge line needs two endpoints", lineno)
                u, v = int(parts[1]), int(parts[2])
                if not (1 <= u <= header[0] and 1 <= v <= header[0]):
                    raise ParseError("endpoint out of range", lineno)
                edges.append((u - 1, v - 1))
                labels.append(frozenset(int(x) for x in parts[3:]))
            else:
                raise ParseError(f"unknown line type {parts[0]!r}", lineno)
        except ValueError as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError("non-integer field", lineno) from None
    if header is None:
        raise ParseError("missing 'p mgraph' header")
    if len(edges) != header[1]:
        raise ParseError(f"header announces {header[1]} edges, found {len(edges)}")
    return LabeledMultigraph(header[0], tuple(edges), tuple(labels), header[2])


def write_mgraph(H: LabeledMultigraph) -> str:
    lines = [f"p mgraph {H.n} {len(H.edges)} {H.gamma}"]
    for (u, v), w in zip(H.edges, H.labels):
        lines.append(" ".join(["e", str(u + 1), str(v + 1)] + [str(c) for c in sorted(w)]))
    return "\n".join(lines) + "\n"


def write_certificate(cert: TreeCertificate) -> str:
    return (f"root {cert.root + 1}\n"
            f"vertices {' '.join(str(v + 1) for v in sorted(cert.vertices))}\n"
            f"tree {' '.join(str(e + 1) for e in cert.tree_edges)}\n"
            f"extra {cert.extra[0] + 1} {cert.extra[1] + 1}\n")


def read_certificate(text: str) -> TreeCertificate:
    fields = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split()
        if not parts or parts[0] == "c":
            continue
        if parts[0] not in ("root", "vertices", "tree", "extra") or parts[0] in fields:
            raise ParseError(f"unexpected line {raw.strip()!r}", lineno)
        try:
            fields[parts[0]] = [int(x) - 1 for x in parts[1:]]
        except ValueError:
            raise ParseError("non-integer field", lineno) from None
    missing = {"root", "vertices", "tree", "extra"} - set(fields)
    if missing:
        raise ParseError(f"certificate lacks {sorted(missing)}")
    if len(fields["root"]) != 1 or len(fields["extra"]) != 2:
        raise ParseError("root takes one vertex and extra takes two edges")
    return TreeCertificate(frozenset(fields["vertices"]), tuple(fields["tree"]), fields["root"][0],
                           (fields["extra"][0], fields["extra"][1]))
