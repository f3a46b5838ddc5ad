"""Command-line interface.

Exit codes: 0 success, 1 usage or input error, 2 verification failure,
3 size or time limit.  Certificates list chosen set indices (1-based, i.e.
the position of the ``s`` line in the instance file), one per line.

``bench`` writes CSV with columns ``instance, mode, size, optimum_or_bound,
ratio, wall_time, seed, status``.  ``optimum_or_bound`` is the exact optimum
when the exact solver finishes inside ``--exact-budget`` and otherwise the
counting bound ``min(#sets, n_elements // smallest set size)``; ``ratio`` is
that value divided by ``size``.
"""
from __future__ import annotations

import argparse
import csv
import logging
import math
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

from . import hardness, treelemma
from .core import Packing, is_packing
from .instances import ParseError, gen_planted_3dm, gen_random, load_instance, save_instance
from .pathdecomp import SizeLimitError
from .solvers import MODES, BudgetExceeded, SolverConfig, exact_max_packing, solve

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_LIMIT = 0, 1, 2, 3
BENCH_COLUMNS = ["instance", "mode", "size", "optimum_or_bound", "ratio", "wall_time", "seed", "status"]
VERIFY_REDUCTION_MAX_SETS = 400

log = logging.getLogger("setpack")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def read_certificate(text: str) -> Packing:
    """1-based set indices, one per line; blank lines and ``c`` comments ignored."""
    idx = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split()
        if not parts or parts[0] == "c":
            continue
        if len(parts) != 1:
            raise ParseError("expected one set index per line", lineno)
        try:
            i = int(parts[0])
        except ValueError:
            raise ParseError("non-integer set index", lineno) from None
        if i < 1:
            raise ParseError("set indices are 1-based", lineno)
        idx.append(i - 1)
    if len(set(idx)) != len(idx):
        raise ParseError("repeated set index")
    return Packing(tuple(sorted(idx)))


def write_certificate(packing: Packing) -> str:
    return "".join(f"{i + 1}\n" for i in packing.members)


def _build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="setpack", description="k-Set Packing solvers, generators and verifiers.")
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve an instance and write a certificate")
    s.add_argument("instance")
    s.add_argument("--mode", choices=MODES, default="pwls")
    s.add_argument("--r", type=int, default=2, help="largest improving set size")
    s.add_argument("--pw", type=int, default=2, help="pathwidth bound for pwls")
    s.add_argument("--trials", type=int, default=None, help="colorings per search (default from --delta)")
    s.add_argument("--delta", type=float, default=0.01, help="per-search failure probability")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--budget", type=float, default=None, help="time budget in seconds")
    s.add_argument("--cert", default=None, help="certificate path (default: <instance>.cert)")

    g = sub.add_parser("gen", help="generate an instance")
    gsub = g.add_subparsers(dest="kind", required=True)
    gr = gsub.add_parser("random", help="distinct uniform k-sets")
    gr.add_argument("n_elements", type=int)
    gr.add_argument("n_sets", type=int)
    gr.add_argument("k", type=int)
    gr.add_argument("--seed", type=int, default=0)
    gr.add_argument("-o", "--output", required=True)
    g3 = gsub.add_parser("3dm", help="planted perfect 3-dimensional matching plus noise")
    g3.add_argument("m", type=int)
    g3.add_argument("noise", type=int)
    g3.add_argument("--seed", type=int, default=0)
    g3.add_argument("-o", "--output", required=True)

    r = sub.add_parser("reduce", help="hardness reduction")
    rsub = r.add_subparsers(dest="kind", required=True)
    rm = rsub.add_parser("mcc", help="multicolored clique to 3-set packing")
    rm.add_argument("graph")
    rm.add_argument("-o", "--output", required=True)
    rm.add_argument("--map", default=None, help="write element names here")

    v = sub.add_parser("verify", help="check certificates")
    vsub = v.add_subparsers(dest="kind", required=True)
    vp = vsub.add_parser("packing")
    vp.add_argument("instance")
    vp.add_argument("certificate")
    vt = vsub.add_parser("cert-tree")
    vt.add_argument("mgraph")
    vt.add_argument("certificate")
    vr = vsub.add_parser("reduction")
    vr.add_argument("graph")

    t = sub.add_parser("tree", help="bounded tree certificate for a labeled multigraph")
    t.add_argument("mgraph")
    t.add_argument("-o", "--output", required=True)

    b = sub.add_parser("bench", help="run modes over a directory of .sp files, CSV to stdout")
    b.add_argument("suite")
    b.add_argument("--modes", nargs="+", choices=MODES, default=["greedy", "swap", "pwls"])
    b.add_argument("--r", type=int, default=2)
    b.add_argument("--pw", type=int, default=2)
    b.add_argument("--trials", type=int, default=None)
    b.add_argument("--delta", type=float, default=0.01)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--budget", type=float, default=None, help="per-run time budget")
    b.add_argument("--exact-budget", type=float, default=10.0)
    return p


def _config(args, mode: Optional[str] = None) -> SolverConfig:
    return SolverConfig(mode=mode or args.mode, r=args.r, pw=args.pw, trials=args.trials,
                        seed=args.seed, failure_prob=args.delta, budget=args.budget)


def _cmd_solve(args) -> int:
    family = load_instance(args.instance)
    result = solve(family, _config(args))
    cert = Path(args.cert) if args.cert else Path(str(args.instance) + ".cert")
    cert.write_text(write_certificate(result.packing))
    print(f"size={result.size},status={result.status},mode={args.mode},seed={args.seed}")
    return EXIT_OK


def _cmd_gen(args) -> int:
    if args.kind == "random":
        family = gen_random(args.n_elements, args.n_sets, args.k, args.seed)
        comments = [f"random n_elements={args.n_elements} n_sets={args.n_sets} k={args.k} seed={args.seed}"]
    else:
        family, planted = gen_planted_3dm(args.m, args.noise, args.seed)
        comments = [f"planted 3dm m={args.m} noise={args.noise} seed={args.seed}", f"optimum {planted}"]
    save_instance(family, args.output, comments)
    print(f"wrote {len(family)} sets to {args.output}")
    return EXIT_OK


def _cmd_reduce(args) -> int:
    inst = hardness.read_colored_graph(Path(args.graph).read_text())
    out = hardness.reduce_mcc(inst)
    save_instance(out.family, args.output,
                  [f"reduction of {Path(args.graph).name}: k={out.k} h={out.h}",
                   f"near-perfect packing size {len(out.f0)}"])
    if args.map:
        Path(args.map).write_text(hardness.write_name_map(out))
    print(f"elements={out.family.n_elements},sets={len(out.family)},f0={len(out.f0)}")
    return EXIT_OK


def _verify_reduction(path: str) -> int:
    inst = hardness.read_colored_graph(Path(path).read_text())
    out = hardness.reduce_mcc(inst)
    perfect = out.family.n_elements // 3
    cliques = hardness.multicolored_cliques(out.instance)
    for K in cliques:
        packing = hardness.witness_packing(out, K)
        if len(packing) != perfect or sorted(hardness.extract_clique(out, packing)) != sorted(K):
            print(f"FAIL: round trip broke for clique {[v + 1 for v in K]}")
            return EXIT_VERIFY
    if len(out.family) > VERIFY_REDUCTION_MAX_SETS:
        print(f"round trip ok for {len(cliques)} cliques; reduction has {len(out.family)} sets, "
              f"too many for the exact check (limit {VERIFY_REDUCTION_MAX_SETS})")
        return EXIT_LIMIT
    best = exact_max_packing(out.family)
    if (len(best) == perfect) != bool(cliques):
        print(f"FAIL: optimum {len(best)} vs perfect {perfect} with {len(cliques)} cliques")
        return EXIT_VERIFY
    if cliques:
        K = hardness.extract_clique(out, best)
        if not out.instance.is_multicolored_clique(K):
            print("FAIL: extracted vertices are not a multicolored clique")
            return EXIT_VERIFY
    print(f"ok: {len(cliques)} cliques, optimum {len(best)}, perfect {perfect}")
    return EXIT_OK


def _cmd_verify(args) -> int:
    if args.kind == "packing":
        family = load_instance(args.instance)
        packing = read_certificate(Path(args.certificate).read_text())
        if any(i >= len(family) for i in packing):
            print(f"FAIL: set index out of range 1..{len(family)}")
            return EXIT_VERIFY
        if not is_packing(family, packing):
            print("FAIL: certificate sets are not pairwise disjoint")
            return EXIT_VERIFY
        print(f"ok: packing of size {len(packing)}")
        return EXIT_OK
    if args.kind == "cert-tree":
        H = treelemma.read_mgraph(Path(args.mgraph).read_text())
        cert = treelemma.read_certificate(Path(args.certificate).read_text())
        if not treelemma.verify_tree_certificate(H, cert):
            print("FAIL: tree certificate rejected")
            return EXIT_VERIFY
        print(f"ok: tree on {len(cert.vertices)} vertices")
        return EXIT_OK
    return _verify_reduction(args.graph)


def _cmd_tree(args) -> int:
    H = treelemma.read_mgraph(Path(args.mgraph).read_text())
    cert = treelemma.find_bounded_tree(H)
    Path(args.output).write_text(treelemma.write_certificate(cert))
    print(f"vertices={len(cert.vertices)},case={cert.case}")
    return EXIT_OK


def _upper_bound(family) -> int:
    if not len(family):
        return 0
    return min(len(family), family.n_elements // min(len(s) for s in family.sets))


def _cmd_bench(args) -> int:
    suite = Path(args.suite)
    files = sorted(suite.glob("*.sp"))
    if not files:
        raise UsageError(f"no .sp files in {suite}")
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(BENCH_COLUMNS)
    for f in files:
        family = load_instance(f)
        try:
            reference = len(exact_max_packing(family, args.exact_budget))
        except BudgetExceeded:
            reference = _upper_bound(family)
        for mode in args.modes:
            start = time.perf_counter()
            result = solve(family, _config(args, mode))
            wall = time.perf_counter() - start
            ratio = reference / result.size if result.size else math.inf
            writer.writerow([f.name, mode, result.size, reference, f"{ratio:.4f}", f"{wall:.4f}",
                             args.seed, result.status])
    return EXIT_OK


COMMANDS = {"solve": _cmd_solve, "gen": _cmd_gen, "reduce": _cmd_reduce, "verify": _cmd_verify,
            "tree": _cmd_tree, "bench": _cmd_bench}


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except SizeLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except (UsageError, OSError, ValueError) as exc:
        # ParseError, SetPackingError and precondition errors are ValueErrors
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
