"""Plain-text instance format and instance generators.

Format::

    c optional comment lines
    p sp <n_elements> <n_sets> <k>
    s <e1> <e2> ...        (one line per set, 1-based element ids)
"""
from __future__ import annotations

import itertools
import math
import random
from pathlib import Path

from .core import SetFamily, SetPackingError

MAX_RESAMPLES = 10_000


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def read_instance(text: str) -> SetFamily:
    header = None
    sets: list[tuple[int, ...]] = []
    seen: dict[tuple[int, ...], int] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split()
        if not parts or parts[0] == "c":
            continue
        tag = parts[0]
        if tag == "p":
            if header is not None:
                raise ParseError("second header line", lineno)
            if len(parts) != 5 or parts[1] != "sp":
                raise ParseError("expected 'p sp <n_elements> <n_sets> <k>'", lineno)
            try:
                header = tuple(int(x) for x in parts[2:])
            except ValueError:
                raise ParseError("non-integer header field", lineno) from None
            if header[0] < 0 or header[1] < 0 or header[2] < 1:
                raise ParseError("header fields out of range", lineno)
        elif tag == "s":
            if header is None:
                raise ParseError("set line before header", lineno)
            n, _, k = header
            try:
                elems = [int(x) for x in parts[1:]]
            except ValueError:
                raise ParseError("non-integer element id", lineno) from None
            if not elems:
                raise ParseError("empty set", lineno)
            if len(elems) > k:
                raise ParseError(f"set has {len(elems)} elements, more than k={k}", lineno)
            if len(set(elems)) != len(elems):
                raise ParseError("repeated element in set", lineno)
            bad = [e for e in elems if not 1 <= e <= n]
            if bad:
                raise ParseError(f"element id {bad[0]} outside 1..{n}", lineno)
            t = tuple(sorted(elems))
            if t in seen:
                raise ParseError(f"duplicate of the set on line {seen[t]}", lineno)
            seen[t] = lineno
            sets.append(t)
        else:
            raise ParseError(f"unknown line type {tag!r}", lineno)
    if header is None:
        raise ParseError("missing 'p sp' header")
    n, m, k = header
    if len(sets) != m:
        raise ParseError(f"header announces {m} sets, found {len(sets)}")
    try:
        return SetFamily(n, tuple(sets), k)
    except SetPackingError as exc:
        raise ParseError(str(exc)) from None


def write_instance(family: SetFamily, comments: list[str] | None = None) -> str:
    lines = [f"c {c}" for c in comments or []]
    lines.append(f"p sp {family.n_elements} {len(family)} {family.k}")
    lines.extend("s " + " ".join(map(str, s)) for s in family.sets)
    return "\n".join(lines) + "\n"


def load_instance(path: str | Path) -> SetFamily:
    return read_instance(Path(path).read_text())


def save_instance(family: SetFamily, path: str | Path, comments: list[str] | None = None) -> None:
    Path(path).write_text(write_instance(family, comments))


def gen_random(n_elements: int, n_sets: int, k: int, seed: int) -> SetFamily:
    """``n_sets`` distinct uniformly random ``k``-subsets of ``1..n_elements``."""
    if k < 1 or n_elements < k:
        raise ValueError(f"cannot draw {k}-sets from {n_elements} elements")
    capacity = math.comb(n_elements, k)
    if n_sets > capacity:
        raise ValueError(f"only {capacity} distinct {k}-sets exist, asked for {n_sets}")
    rng = random.Random(seed)
    if 2 * n_sets > capacity:
        # dense request: sample from the explicit list instead of rejecting duplicates
        pool = list(itertools.combinations(range(1, n_elements + 1), k))
        sets = rng.sample(pool, n_sets)
    else:
        sets, seen = [], set()
        tries = 0
        while len(sets) < n_sets:
            t = tuple(sorted(rng.sample(range(1, n_elements + 1), k)))
            if t in seen:
                tries += 1
                if tries > MAX_RESAMPLES:
                    raise RuntimeError("too many duplicate draws")
                continue
            seen.add(t)
            sets.append(t)
    return SetFamily(n_elements, tuple(sets), k)


def gen_planted_3dm(m: int, noise: int, seed: int) -> tuple[SetFamily, int]:
    """Tripartite triples with a planted perfect matching, in shuffled order.

    Blocks are ``1..m``, ``m+1..2m`` and ``2m+1..3m``; the planted triples are
    ``(i, m+i, 2m+i)``.  Returns the family and ``m``, which is its optimum.
    """
    if m < 1 or noise < 0:
        raise ValueError("need m >= 1 and noise >= 0")
    if noise > m ** 3 - m:
        raise ValueError(f"at most {m ** 3 - m} noise triples exist for m={m}")
    rng = random.Random(seed)
    planted = [(i, m + i, 2 * m + i) for i in range(1, m + 1)]
    seen = set(planted)
    extra = []
    tries = 0
    if 2 * noise > m ** 3 - m:
        pool = [t for t in itertools.product(range(1, m + 1), range(m + 1, 2 * m + 1),
                                             range(2 * m + 1, 3 * m + 1)) if t not in seen]
        extra = rng.sample(pool, noise)
    while len(extra) < noise:
        t = (rng.randint(1, m), rng.randint(m + 1, 2 * m), rng.randint(2 * m + 1, 3 * m))
        if t in seen:
            tries += 1
            if tries > MAX_RESAMPLES:
                raise RuntimeError("too many duplicate draws")
            continue
        seen.add(t)
        extra.append(t)
    sets = planted + extra
    rng.shuffle(sets)
    return SetFamily(3 * m, tuple(sets), 3), m
