"""Command-line front end: generate trees, embed them, verify and benchmark."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .coloring import monotone_coloring
from .embedder import EmbedOptions, EmbeddingResult, embed
from .errors import ParseError, RetryBudgetExhausted, RoundBudgetExceeded, SizeOverflow
from .kary import embed_kary
from .scales import build_scale_table
from .tree import (RootedTree, caterpillar_star, contract_zero_edges, format_tree,
                   kary_tree, parse_tree, path_tree, random_tree)
from .verify import distortion

MAX_VERTICES = 2000
BENCH_HEADER = ["family", "n", "eps", "dim", "expansion", "contraction",
                "distortion", "attempts", "millis", "status"]


def _family_size(family: str, params: list[int]) -> int:
    if family == "path":
        return params[0]
    if family == "kary":
        k, h = params
        return h + 1 if k == 1 else (k ** (h + 1) - 1) // (k - 1)
    if family == "random":
        return params[0]
    if family == "caterpillar-star":
        h = params[0]
        return (2 ** (h + 1) - 1) * (1 + 2 ** h)
    raise ValueError(f"unknown family {family!r}")


def generate(family: str, params: list[int], seed: int = 0,
             max_vertices: int = MAX_VERTICES) -> RootedTree:
    arity = {"path": 1, "kary": 2, "random": 2, "caterpillar-star": 1}
    if family not in arity:
        raise ValueError(f"unknown family {family!r}")
    if len(params) != arity[family]:
        raise ValueError(f"{family} takes {arity[family]} parameter(s)")
    n = _family_size(family, params)
    if n > max_vertices:
        raise SizeOverflow(f"{family} {params} has {n} vertices, cap is {max_vertices}")
    if family == "path":
        return path_tree(params[0])
    if family == "kary":
        return kary_tree(*params)
    if family == "random":
        return random_tree(params[0], np.random.default_rng(seed), max_degree=params[1])
    return caterpillar_star(params[0])


def _read_tree(path: str) -> RootedTree:
    with open(path) as fh:
        return parse_tree(fh.read())


def _write(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _coords_csv(coords: np.ndarray) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for v, row in enumerate(coords):
        w.writerow([v] + [repr(float(x)) for x in row])
    return buf.getvalue()


def _dump(doc: dict) -> str:
    return json.dumps(doc, indent=None, separators=(",", ":")) + "\n"


def _check_eps(eps: float) -> None:
    if not 0 < eps <= 0.5:
        raise SystemExit("error: --eps must lie in (0, 0.5]")


# ---------------------------------------------------------------------- #
# subcommands
# ---------------------------------------------------------------------- #


def cmd_gen(args) -> int:
    t = generate(args.family, args.params, args.seed, args.max_vertices)
    _write(format_tree(t), args.out)
    return 0


def _emit_embedding(res: EmbeddingResult, args) -> None:
    if args.format == "csv":
        _write(_coords_csv(res.coords), args.out)
    else:
        _write(_dump(res.to_document(sparse=args.sparse)), args.out)


def cmd_embed(args) -> int:
    _check_eps(args.eps)
    t = _read_tree(args.tree)
    if args.dump_scales:
        small, _ = contract_zero_edges(t)
        with open(args.dump_scales, "w") as fh:
            fh.write(build_scale_table(small, monotone_coloring(small)).dump())
    opts = EmbedOptions(k=args.k, delta=args.delta, target=args.target, retries=args.retries)
    try:
        res = embed(t, args.eps, seed=args.seed, opts=opts)
    except RetryBudgetExhausted as exc:
        _emit_embedding(exc.best, args)
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _emit_embedding(res, args)
    return 0


def cmd_kary(args) -> int:
    try:
        g, rounds = embed_kary(args.arity, args.height, args.eps, seed=args.seed,
                               max_rounds=args.max_rounds)
    except RoundBudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    coords = g.dense()
    rep = distortion(coords, g.tree)
    target = args.target if args.target is not None else 2.0
    doc = {"eps": args.eps, "delta": None, "k": args.arity, "t": g.t, "m": g.m,
           "dim": g.dim, "seed": args.seed, "attempts": rounds + 1,
           "expansion": rep.expansion, "contraction": rep.contraction,
           "distortion": rep.distortion, "coords": coords.tolist()}
    if args.format == "csv":
        _write(_coords_csv(coords), args.out)
    else:
        _write(_dump(doc), args.out)
    return 0 if rep.distortion <= target else 1


def _load_coords(doc) -> np.ndarray:
    c = doc["coords"] if isinstance(doc, dict) else doc
    if isinstance(c, dict):
        out = np.zeros((c["n"], 1 + max((e[1] for e in c["entries"]), default=0)))
        for v, j, x in c["entries"]:
            out[v, j] = x
        return out
    return np.asarray(c, dtype=float).reshape(len(c), -1)


def cmd_verify(args) -> int:
    with open(args.coords) as fh:
        coords = _load_coords(json.load(fh))
    t = _read_tree(args.tree)
    rep = distortion(coords, t)
    _write(_dump(rep.to_dict()), args.out)
    return 0


def _bench_row(job) -> list:
    family, params, eps, seed, k, delta, retries = job
    start = time.perf_counter()
    row = {"family": family, "eps": eps}
    try:
        t = generate(family, params, seed)
        row["n"] = t.n
        res = embed(t, eps, seed=seed,
                    opts=EmbedOptions(k=k, delta=delta, retries=retries,
                                      use_default_target=False))
        status = "ok"
    except RetryBudgetExhausted as exc:
        res, status = exc.best, "target-missed"
    except Exception as exc:  # reported as a row, not raised
        row.setdefault("n", "")
        return [family, row["n"], eps, "", "", "", "", "", "",
                f"error:{type(exc).__name__}"]
    millis = (time.perf_counter() - start) * 1e3
    r = res.report
    return [family, t.n, eps, res.dim, r.expansion, r.contraction, r.distortion,
            res.attempts, round(millis, 3), status]


def _bench_params(family: str, size: int, arity: int) -> list[int]:
    if family == "kary":
        return [arity, size]
    if family == "random":
        return [size, arity]
    return [size]


def cmd_bench(args) -> int:
    for e in args.eps:
        _check_eps(e)
    jobs = [(args.family, _bench_params(args.family, s, args.arity), e, seed,
             args.k, args.delta, args.retries)
            for s in args.sizes for e in args.eps for seed in args.seeds]
    if args.threads > 1:
        with ProcessPoolExecutor(max_workers=args.threads) as pool:
            rows = list(pool.map(_bench_row, jobs))
    else:
        rows = [_bench_row(j) for j in jobs]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(BENCH_HEADER)
    w.writerows(rows)
    _write(buf.getvalue(), args.out)
    return 0


# ---------------------------------------------------------------------- #


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="treel1", description="Embed tree metrics into l1.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, eps_default=0.5):
        sp.add_argument("--eps", type=float, default=eps_default)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--target", type=float, default=None,
                        help="distortion required for exit status 0")
        sp.add_argument("--out", default=None, help="output path (default stdout)")
        sp.add_argument("--threads", type=int, default=1)

    g = sub.add_parser("gen", help="generate a tree")
    g.add_argument("family", choices=["path", "kary", "random", "caterpillar-star"])
    g.add_argument("params", type=int, nargs="+",
                   help="path N | kary K H | random N MAXDEG | caterpillar-star H")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", default=None)
    g.add_argument("--format", choices=["tsv-tree"], default="tsv-tree")
    g.add_argument("--max-vertices", type=int, default=MAX_VERTICES)
    g.set_defaults(func=cmd_gen)

    e = sub.add_parser("embed", help="embed a tree file")
    e.add_argument("tree")
    common(e)
    e.add_argument("--delta", type=float, default=None)
    e.add_argument("--k", type=int, default=None, help="number of folded trees")
    e.add_argument("--retries", type=int, default=1)
    e.add_argument("--format", choices=["json", "csv"], default="json")
    e.add_argument("--sparse", action="store_true", help="coords as triplets")
    e.add_argument("--dump-scales", default=None, metavar="PATH")
    e.set_defaults(func=cmd_embed)

    k = sub.add_parser("kary", help="embed a complete k-ary tree by label resampling")
    k.add_argument("--k", dest="arity", type=int, default=2, help="branching factor")
    k.add_argument("--h", dest="height", type=int, default=6, help="height")
    common(k, eps_default=1 / 28)
    k.add_argument("--max-rounds", type=int, default=None)
    k.add_argument("--format", choices=["json", "csv"], default="json")
    k.set_defaults(func=cmd_kary)

    v = sub.add_parser("verify", help="distortion of a coordinate file against a tree")
    v.add_argument("coords")
    v.add_argument("tree")
    v.add_argument("--out", default=None)
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="CSV sweep over sizes, eps and seeds")
    b.add_argument("family", choices=["path", "kary", "random", "caterpillar-star"])
    b.add_argument("--sizes", type=int, nargs="+", required=True,
                   help="heights for kary/caterpillar-star, vertex counts otherwise")
    b.add_argument("--arity", type=int, default=2,
                   help="kary branching factor, or random max degree")
    b.add_argument("--eps", type=float, nargs="+", default=[0.5])
    b.add_argument("--seeds", type=int, nargs="+", default=[0])
    b.add_argument("--delta", type=float, default=None)
    b.add_argument("--k", type=int, default=None)
    b.add_argument("--retries", type=int, default=1)
    b.add_argument("--threads", type=int, default=1)
    b.add_argument("--out", default=None)
    b.set_defaults(func=cmd_bench)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "retries", 1) < 1:
        print("error: --retries must be at least 1", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (ParseError, SizeOverflow, ValueError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
