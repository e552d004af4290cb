"""Command-line entry point wiring the library into reproducible workflows.

Exit codes: 0 success, 1 usage error, 2 data or validation error. Reruns with
the same arguments, input files, and seed produce byte-identical output files
for any --threads value (the TREEID_THREADS environment variable supplies the
default worker count).
"""

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import bench as bench_mod
from . import io as tio
from .core import TreeBuildConfig, validate_tree
from .decode import BeamConfig, beam_search, dot_scorer
from .metrics import evaluate_run
from .mincostflow import CostOverflowError, InfeasibleBoundsError
from .treebuild import InvalidEmbeddingsError, build_tree, node_embeddings


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _default_threads() -> int:
    try:
        return max(1, int(os.environ.get("TREEID_THREADS", "1")))
    except ValueError:
        return 1


def _read_embeddings_any(path):
    """Binary when the magic matches or the head looks binary, TSV otherwise."""
    with open(path, "rb") as f:
        head = f.read(64)
    if head[:4] == tio.MAGIC or b"\x00" in head:
        return tio.read_embeddings(path)
    return tio.read_embeddings_tsv(path)


def _build_parser() -> _Parser:
    p = _Parser(prog="treeid", description="balanced k-ary identifier trees")
    sub = p.add_subparsers(dest="command", required=True)

    def add_threads(sp):
        sp.add_argument("--threads", type=int, default=_default_threads())

    g = sub.add_parser("gen-synth", help="generate a synthetic blob embedding file")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--dim", type=int, required=True)
    g.add_argument("--blobs", type=int, default=64)
    g.add_argument("--spread", type=float, default=1.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--format", choices=("bin", "tsv"), default="bin")
    g.add_argument("--out", required=True)

    b = sub.add_parser("build-tree", help="build an identifier tree from embeddings")
    b.add_argument("--embeddings", required=True)
    b.add_argument("--method", choices=bench_mod.METHODS, default="hybrid")
    b.add_argument("--k", type=int, default=8)
    b.add_argument("--threshold", type=int, default=2000)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--lloyd-iters", type=int, default=100)
    b.add_argument("--lloyd-tol", type=float, default=1e-4)
    b.add_argument("--outer-iters", type=int, default=20)
    add_threads(b)
    b.add_argument("--out", required=True)

    v = sub.add_parser("verify", help="validate a serialized tree")
    v.add_argument("--tree", required=True)

    d = sub.add_parser("decode", help="beam-search retrieval for query vectors")
    d.add_argument("--tree", required=True)
    d.add_argument("--embeddings", required=True)
    d.add_argument("--queries", required=True)
    d.add_argument("--beam", type=int, default=50)
    d.add_argument("--top", type=int, default=20)
    add_threads(d)
    d.add_argument("--out", required=True)

    e = sub.add_parser("eval", help="score a ranking CSV against a truth CSV")
    e.add_argument("--runs", required=True)
    e.add_argument("--truth", required=True)
    e.add_argument("--cutoffs", default="20,50")
    e.add_argument("--out", required=True)

    bn = sub.add_parser("bench", help="construction-time benchmarks")
    bsub = bn.add_subparsers(dest="bench_command", required=True)

    def add_bench_common(sp):
        sp.add_argument("--dim", type=int, default=16)
        sp.add_argument("--blobs", type=int, default=64)
        sp.add_argument("--spread", type=float, default=1.0)
        sp.add_argument("--data-seed", type=int, default=0)
        sp.add_argument("--k", type=int, default=8)
        sp.add_argument("--threshold", type=int, default=2000)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--lloyd-iters", type=int, default=100)
        sp.add_argument("--outer-iters", type=int, default=20)
        add_threads(sp)
        sp.add_argument("--out", required=True)

    bs = bsub.add_parser("scaling", help="build times across sizes")
    bs.add_argument("--sizes", required=True, help="ascending, e.g. 1000,4000")
    bs.add_argument("--methods", default="constrained,greedy,hybrid")
    bs.add_argument("--repeats", type=int, default=3)
    bs.add_argument("--no-warmup", action="store_true")
    add_bench_common(bs)

    bc = bsub.add_parser("compare", help="all methods on one dataset")
    bc.add_argument("--n", type=int, required=True)
    bc.add_argument("--repeats", type=int, default=1)
    bc.add_argument("--warmup", action="store_true")
    add_bench_common(bc)

    return p


def _int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as e:
        raise _UsageError(f"expected a comma-separated integer list, got {text!r}") from e


def _tree_config(args) -> TreeBuildConfig:
    try:
        return TreeBuildConfig(
            k=args.k,
            method=getattr(args, "method", "hybrid"),
            greedy_threshold=args.threshold,
            seed=args.seed,
            lloyd_max_iters=getattr(args, "lloyd_iters", 100),
            lloyd_tol=getattr(args, "lloyd_tol", 1e-4),
            outer_max_iters=getattr(args, "outer_iters", 20),
        )
    except ValueError as e:
        raise _UsageError(str(e)) from e


def _cmd_gen_synth(args) -> int:
    spec = bench_mod.BlobSpec(
        n_items=args.n, dim=args.dim, n_blobs=args.blobs, blob_spread=args.spread, seed=args.seed
    )
    m = bench_mod.gen_blobs(spec)
    if args.format == "bin":
        tio.write_embeddings(m, args.out)
    else:
        tio.write_embeddings_tsv(m, args.out)
    return 0


def _cmd_build_tree(args) -> int:
    cfg = _tree_config(args)
    m = _read_embeddings_any(args.embeddings)
    tree = build_tree(m, cfg, threads=max(1, args.threads))
    tio.write_tree(tree, args.out)
    return 0


def _cmd_verify(args) -> int:
    tree = tio.read_tree(args.tree)
    res = validate_tree(tree)
    if not res.ok:
        for v in res.violations:
            print(v, file=sys.stderr)
        return 2
    print(f"ok: {tree.n_items} items, k={tree.k}, depth={tree.depth}")
    return 0


def _cmd_decode(args) -> int:
    if args.beam < 1 or not 1 <= args.top <= args.beam:
        raise _UsageError("need --beam >= 1 and 1 <= --top <= --beam")
    tree = tio.read_tree(args.tree)
    m = _read_embeddings_any(args.embeddings)
    queries = _read_embeddings_any(args.queries)
    embs = node_embeddings(tree, m)
    scorer = dot_scorer(embs, tree)
    cfg = BeamConfig(beam_width=args.beam, top_n=args.top)
    q = queries.as_array()

    def one(i):
        return beam_search(tree, scorer, q[i], cfg)

    if args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            results = list(pool.map(one, range(queries.n_items)))
    else:
        results = [one(i) for i in range(queries.n_items)]
    tio.write_ranking(results, args.out)
    return 0


def _cmd_eval(args) -> int:
    cutoffs = _int_list(args.cutoffs)
    if not cutoffs:
        raise _UsageError("--cutoffs must name at least one cutoff")
    runs = tio.read_ranking(args.runs)
    truth = tio.read_truth(args.truth)
    users = []
    for q in sorted(runs):
        if q not in truth:
            raise ValueError(f"query {q} has no truth rows")
        users.append((runs[q], truth[q]))
    report = evaluate_run(users, cutoffs=tuple(cutoffs))
    tio.write_eval_report(report, args.out)
    return 0


def _blob_spec(args, n_items: int) -> bench_mod.BlobSpec:
    return bench_mod.BlobSpec(
        n_items=n_items,
        dim=args.dim,
        n_blobs=args.blobs,
        blob_spread=args.spread,
        seed=args.data_seed,
    )


def _cmd_bench_scaling(args) -> int:
    sizes = _int_list(args.sizes)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    cfg = _tree_config(args)
    rows = bench_mod.time_builds(
        sizes,
        methods,
        _blob_spec(args, sizes[0]),
        cfg,
        repeats=args.repeats,
        warmup=not args.no_warmup,
        threads=max(1, args.threads),
    )
    tio.write_bench_rows(rows, args.out)
    return 0


def _cmd_bench_compare(args) -> int:
    cfg = _tree_config(args)
    cmp = bench_mod.compare_methods(
        args.n,
        _blob_spec(args, args.n),
        cfg,
        repeats=args.repeats,
        warmup=args.warmup,
        threads=max(1, args.threads),
    )
    tio.write_bench_rows([cmp.rows[m] for m in bench_mod.METHODS], args.out)
    for m in ("greedy", "hybrid"):
        print(
            f"{m}/constrained: time {cmp.time_ratio(m):.4f}, sse {cmp.sse_ratio(m):.6f}"
        )
    return 0


_COMMANDS = {
    "gen-synth": _cmd_gen_synth,
    "build-tree": _cmd_build_tree,
    "verify": _cmd_verify,
    "decode": _cmd_decode,
    "eval": _cmd_eval,
}


def run(argv) -> int:
    """Parse argv (without the program name) and run one command."""
    parser = _build_parser()
    try:
        try:
            args = parser.parse_args(argv)
        except SystemExit as e:  # argparse --help
            return 0 if e.code in (0, None) else 1
        if args.command == "bench":
            handler = _cmd_bench_scaling if args.bench_command == "scaling" else _cmd_bench_compare
        else:
            handler = _COMMANDS[args.command]
        return handler(args)
    except _UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 1
    except (
        tio.FileFormatError,
        InvalidEmbeddingsError,
        InfeasibleBoundsError,
        CostOverflowError,
        ValueError,
        OSError,
    ) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


def main():
    try:
        sys.exit(run(sys.argv[1:]))
    except SystemExit:
        raise
    except KeyboardInterrupt:
        sys.exit(130)
