"""Reduction from Multicolored Clique to 3-Set Packing with a near-perfect packing.

The produced family has a disjoint subfamily ``f0`` missing exactly three
elements; a perfect packing exists iff the graph has a multicolored clique,
and from a clique one can be built that differs from ``f0`` in O(k^2) sets.

Colored graph text format (vertex ids 1-based, colors 0-based)::

    p mcc <n> <m> <k>
    v <id> <color>
    e <u> <v>
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable

from .core import Packing, SetFamily, check_packing
from .instances import ParseError


class ReductionError(ValueError):
    pass


@dataclass(frozen=True)
class MulticoloredCliqueInstance:
    """Vertices are ``0..n-1``; ``colors[v]`` lies in ``0..k-1``."""

    n: int
    edges: tuple[tuple[int, int], ...]
    k: int
    colors: tuple[int, ...]

    def __post_init__(self):
        if self.k < 1:
            raise ReductionError("k must be positive")
        if len(self.colors) != self.n:
            raise ReductionError("need one color per vertex")
        if any(not 0 <= c < self.k for c in self.colors):
            raise ReductionError(f"colors must lie in 0..{self.k - 1}")
        norm = set()
        for u, v in self.edges:
            if u == v:
                raise ReductionError(f"self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ReductionError(f"edge ({u}, {v}) has an endpoint out of range")
            norm.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", tuple(sorted(norm)))

    def adjacent(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self._edge_set

    @property
    def _edge_set(self) -> frozenset:
        cached = self.__dict__.get("_edges_cache")
        if cached is None:
            cached = frozenset(self.edges)
            object.__setattr__(self, "_edges_cache", cached)
        return cached

    def is_multicolored_clique(self, K: Iterable[int]) -> bool:
        K = sorted(set(K))
        if len(K) != self.k:
            return False
        if sorted(self.colors[v] for v in K) != list(range(self.k)):
            return False
        return all(self.adjacent(u, v) for u, v in itertools.combinations(K, 2))


def multicolored_cliques(instance: MulticoloredCliqueInstance) -> list[tuple[int, ...]]:
    """All multicolored k-cliques, by brute force over color classes."""
    classes = [[v for v in range(instance.n) if instance.colors[v] == c] for c in range(instance.k)]
    out = []
    for combo in itertools.product(*classes):
        if all(instance.adjacent(u, v) for u, v in itertools.combinations(combo, 2)):
            out.append(tuple(sorted(combo)))
    return out


def pad_to_power_of_four(instance: MulticoloredCliqueInstance) -> tuple[MulticoloredCliqueInstance, int]:
    """Raise k to the next ``4^h`` (h >= 1) with one universal vertex per new color."""
    h = 1
    while 4 ** h < instance.k:
        h += 1
    K = 4 ** h
    if K == instance.k:
        return instance, h
    n = instance.n
    extra = list(range(n, n + K - instance.k))
    edges = list(instance.edges)
    for w in extra:
        edges.extend((u, w) for u in range(w))
    colors = instance.colors + tuple(range(instance.k, K))
    return MulticoloredCliqueInstance(n + len(extra), tuple(edges), K, colors), h


def make_amplifier(prefix: str, h: int) -> tuple[list[str], list[tuple[str, str, str]]]:
    """Element names ``prefix_1..prefix_{2*4^h-1}`` and the triples
    ``{prefix_i, prefix_2i, prefix_2i+1}`` for ``1 <= i < 4^h``."""
    if h < 1:
        raise ValueError("amplifier height must be at least 1")
    top = 4 ** h
    names = [f"{prefix}_{i}" for i in range(1, 2 * top)]
    sets = [(f"{prefix}_{i}", f"{prefix}_{2 * i}", f"{prefix}_{2 * i + 1}") for i in range(1, top)]
    return names, sets


def _odd_level(i: int) -> bool:
    return (i.bit_length() - 1) % 2 == 1


@dataclass
class ReductionOutput:
    family: SetFamily
    f0: Packing
    instance: MulticoloredCliqueInstance  # after padding to k = 4^h
    original_n: int
    h: int
    names: list[str]  # names[e] is the symbolic name of element e; names[0] unused
    set_groups: list[str]
    element_ids: dict[str, int] = field(repr=False, default_factory=dict)
    set_ids: dict[tuple[int, ...], int] = field(repr=False, default_factory=dict)

    @property
    def k(self) -> int:
        return self.instance.k

    def vertex_name(self, v: int) -> str:
        return f"v{v + 1}"

    def set_index(self, *names: str) -> int:
        key = tuple(sorted(self.element_ids[n] for n in names))
        return self.set_ids[key]

    def root_set(self, v: int) -> int:
        p = self.vertex_name(v)
        return self.set_index(f"{p}_1", f"{p}_2", f"{p}_3")

    def uncovered_by_f0(self) -> list[str]:
        covered = {e for i in self.f0 for e in self.family.sets[i]}
        return [self.names[e] for e in range(1, self.family.n_elements + 1) if e not in covered]


def reduce_mcc(instance: MulticoloredCliqueInstance) -> ReductionOutput:
    original_n = instance.n
    inst, h = pad_to_power_of_four(instance)
    k, n = inst.k, inst.n
    c = inst.colors

    names: list[str] = [""]
    sets: list[tuple[str, ...]] = []
    groups: list[str] = []

    def add_elems(new: Iterable[str]):
        names.extend(new)

    def vname(v: int) -> str:
        return f"v{v + 1}"

    def ell(i: int) -> str:
        return f"l_{i}"

    def s_name(i: int, j: int) -> str:
        return f"s_({i},{j})"

    top_elems, top_sets = make_amplifier("x", h)
    add_elems(top_elems)
    amp_sets = {}
    for v in range(n):
        el, st = make_amplifier(vname(v), h)
        add_elems(el)
        amp_sets[v] = st
    for v in range(n):
        add_elems([f"{vname(v)}'", f"{vname(v)}''"])
    pairs = list(itertools.combinations(range(k), 2))
    add_elems(s_name(i, j) for i, j in pairs)
    add_elems(ell(i) for i in range(1, 2 * k + 1))

    for i, s in enumerate(top_sets, 1):
        sets.append(s)
        groups.append(f"top:{i}")
    for v in range(n):
        for i, s in enumerate(amp_sets[v], 1):
            sets.append(s)
            groups.append(f"amp:{v}:{i}")
    for v in range(n):  # (i)
        sets.append((f"{vname(v)}_1", f"{vname(v)}'", f"{vname(v)}''"))
        groups.append(f"i:{v}")
    for v in range(n):  # (ii)
        sets.append((f"x_{k + c[v]}", f"{vname(v)}'", f"{vname(v)}''"))
        groups.append(f"ii:{v}")
    for u, v in inst.edges:  # (iii)
        if c[u] == c[v]:
            continue
        if c[u] > c[v]:
            u, v = v, u
        sets.append((f"{vname(u)}_{k + c[v]}", f"{vname(v)}_{k + c[u]}", s_name(c[u], c[v])))
        groups.append(f"iii:{u}:{v}")
    for v in range(n):  # (iv); colors are 0-based, so color i owns l_{2i+1}, l_{2i+2}
        sets.append((f"{vname(v)}_{k + c[v]}", ell(2 * c[v] + 1), ell(2 * c[v] + 2)))
        groups.append(f"iv:{v}")
    for i in range(1, (2 * k) // 3 + 1):  # (v)
        sets.append((ell(3 * i - 2), ell(3 * i - 1), ell(3 * i)))
        groups.append(f"v:{i}")
    s_elems = [s_name(i, j) for i, j in pairs]
    for t in range(0, len(s_elems), 3):  # (vi)
        sets.append(tuple(s_elems[t:t + 3]))
        groups.append(f"vi:{t // 3 + 1}")

    element_ids = {name: e for e, name in enumerate(names) if e}
    id_sets = [tuple(sorted(element_ids[x] for x in s)) for s in sets]
    family = SetFamily(len(names) - 1, tuple(id_sets), 3)
    set_ids = {s: i for i, s in enumerate(id_sets)}

    f0 = []
    for i, g in enumerate(groups):
        kind, _, rest = g.partition(":")
        if kind in ("top", "amp"):
            level_index = int(rest.rsplit(":", 1)[-1])
            if _odd_level(level_index):
                f0.append(i)
        elif kind in ("i", "v", "vi"):
            f0.append(i)
    out = ReductionOutput(family, Packing(tuple(f0)), inst, original_n, h, names, groups,
                          element_ids, set_ids)
    _check_reduction(out)
    return out


def _check_reduction(out: ReductionOutput) -> None:
    k, n = out.k, out.instance.n
    U = out.family.n_elements
    expected = (2 * 4 ** out.h - 1) * (n + 1) + 2 * n + k * (k - 1) // 2 + 2 * k
    if U != expected or U % 3:
        raise ReductionError(f"universe size {U}, expected {expected} divisible by 3")
    if (2 * k) % 3 != 2 or (k * (k - 1) // 2) % 3:
        raise ReductionError("divisibility facts for k = 4^h do not hold")
    check_packing(out.family, out.f0)
    if len(out.f0) != U // 3 - 1:
        raise ReductionError(f"|f0| = {len(out.f0)}, expected {U // 3 - 1}")
    if sorted(out.uncovered_by_f0()) != sorted(["x_1", f"l_{2 * k - 1}", f"l_{2 * k}"]):
        raise ReductionError(f"unexpected uncovered elements {out.uncovered_by_f0()}")


def _complete_clique(out: ReductionOutput, K: Iterable[int]) -> list[int]:
    K = sorted(set(K))
    if len(K) < out.k and out.instance.n > out.original_n:
        K = sorted(set(K) | set(range(out.original_n, out.instance.n)))
    return K


def witness_packing(out: ReductionOutput, K: Iterable[int]) -> Packing:
    """Perfect packing built from a multicolored clique ``K``.

    ``K`` may be a clique of the unpadded instance; padding vertices are added.
    """
    K = _complete_clique(out, K)
    inst = out.instance
    if not inst.is_multicolored_clique(K):
        raise ReductionError(f"{[v + 1 for v in K]} is not a multicolored {inst.k}-clique")
    k, c = inst.k, inst.colors
    inK = set(K)
    chosen = []
    for i in range(1, k):
        if not _odd_level(i):  # (a)
            chosen.append(out.set_index(f"x_{i}", f"x_{2 * i}", f"x_{2 * i + 1}"))
    for v in range(inst.n):
        p = out.vertex_name(v)
        for i in range(1, k):
            if _odd_level(i) != (v in inK):  # (b) even levels for K, (c) odd levels otherwise
                chosen.append(out.set_index(f"{p}_{i}", f"{p}_{2 * i}", f"{p}_{2 * i + 1}"))
        if v in inK:
            chosen.append(out.set_index(f"x_{k + c[v]}", f"{p}'", f"{p}''"))  # (d)
            chosen.append(out.set_index(f"{p}_{k + c[v]}", f"l_{2 * c[v] + 1}",
                                        f"l_{2 * c[v] + 2}"))  # (g)
        else:
            chosen.append(out.set_index(f"{p}_1", f"{p}'", f"{p}''"))  # (e)
    for u, v in itertools.combinations(K, 2):  # (f)
        if c[u] > c[v]:
            u, v = v, u
        pu, pv = out.vertex_name(u), out.vertex_name(v)
        chosen.append(out.set_index(f"{pu}_{k + c[v]}", f"{pv}_{k + c[u]}", f"s_({c[u]},{c[v]})"))
    packing = check_packing(out.family, Packing(tuple(chosen)))
    if 3 * len(packing) != out.family.n_elements:
        raise ReductionError("witness packing is not perfect")
    return packing


def symmetric_difference(a: Packing, b: Packing) -> int:
    return len(set(a.members) ^ set(b.members))


def alpha_bound(k: int) -> int:
    """Upper bound on ``|F1 xor F0|`` for witness packings, from counting groups."""
    return 4 * k * k + 8 * k


def extract_clique(out: ReductionOutput, packing: Packing) -> list[int]:
    """Vertices whose amplifier root set is in a perfect packing.

    Returns padded-instance vertex ids; raises if the packing is not perfect
    or the recovered vertices are not a multicolored clique.
    """
    packing = check_packing(out.family, packing)
    if 3 * len(packing) != out.family.n_elements:
        raise ReductionError(f"packing of size {len(packing)} is not perfect "
                             f"(needs {out.family.n_elements // 3})")
    chosen = set(packing.members)
    K = [v for v in range(out.instance.n) if out.root_set(v) in chosen]
    if not out.instance.is_multicolored_clique(K):
        raise ReductionError("recovered vertices are not a multicolored clique")
    return K


def read_colored_graph(text: str) -> MulticoloredCliqueInstance:
    header = None
    colors: dict[int, int] = {}
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split()
        if not parts or parts[0] == "c":
            continue
        try:
            nums = [int(x) for x in parts[1:]] if parts[0] != "p" else [int(x) for x in parts[2:]]
        except ValueError:
            raise ParseError("non-integer field", lineno) from None
        if parts[0] == "p":
            if header is not None or len(parts) != 5 or parts[1] != "mcc":
                raise ParseError("expected a single 'p mcc <n> <m> <k>' header", lineno)
            header = tuple(nums)
        elif header is None:
            raise ParseError("line before header", lineno)
        elif parts[0] == "v" and len(nums) == 2:
            v, col = nums
            if not 1 <= v <= header[0]:
                raise ParseError(f"vertex {v} outside 1..{header[0]}", lineno)
            if v in colors:
                raise ParseError(f"vertex {v} colored twice", lineno)
            colors[v] = col
        elif parts[0] == "e" and len(nums) == 2:
            u, v = nums
            if not (1 <= u <= header[0] and 1 <= v <= header[0]):
                raise ParseError("edge endpoint out of range", lineno)
            edges.append((u - 1, v - 1))
        else:
            raise ParseError(f"malformed line {raw.strip()!r}", lineno)
    if header is None:
        raise ParseError("missing 'p mcc' header")
    n, m, k = header
    if len(colors) != n:
        raise ParseError(f"{n - len(colors)} vertices have no color")
    if len(edges) != m:
        raise ParseError(f"header announces {m} edges, found {len(edges)}")
    try:
        return MulticoloredCliqueInstance(n, tuple(edges), k, tuple(colors[v] for v in range(1, n + 1)))
    except ReductionError as exc:
        raise ParseError(str(exc)) from None


def write_colored_graph(instance: MulticoloredCliqueInstance) -> str:
    lines = [f"p mcc {instance.n} {len(instance.edges)} {instance.k}"]
    lines += [f"v {v + 1} {c}" for v, c in enumerate(instance.colors)]
    lines += [f"e {u + 1} {v + 1}" for u, v in instance.edges]
    return "\n".join(lines) + "\n"


def write_name_map(out: ReductionOutput) -> str:
    return "".join(f"element {e} {out.names[e]}\n" for e in range(1, len(out.names)))
