"""Command-line driver: build, query, eval, bench, inspect.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
Diagnostics go to stderr; data output goes to stdout or ``--out``.
The environment variable ``HYPERRAG_SEED`` fixes every stochastic
choice (currently only noise-document generation).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .bm25 import DEFAULT_B, DEFAULT_K1
from .corpus import load_corpus, load_queries
from .embedding import (
    DEFAULT_EMBED_DIM,
    DEFAULT_TAU,
    PrecomputedVectorEncoder,
    TrigramEncoder,
    load_precomputed_vectors,
)
from .errors import HyperRagError
from .evaluation import bench_latency, eval_recall, write_bench_csv
from .hypercube import CellAddress, build_index, cell_documents, load_index, lookup, save_index
from .labeling import (
    CANONICAL_DIMENSIONS,
    extract_all,
    load_gazetteer,
    load_precomputed_labels,
)
from .retrieval import DEFAULT_K, ExternalDecompositions, format_result, result_to_dict, retrieve

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3


class _Parser(argparse.ArgumentParser):
    """argparse maps usage errors to exit code 2 by default; we want 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _add_encoder_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--encoder",
        default="trigram",
        help="'trigram' or 'file:<vectors.jsonl>' (default: trigram)",
    )
    parser.add_argument("--embed-dim", type=int, default=DEFAULT_EMBED_DIM)
    parser.add_argument("--tau", type=float, default=DEFAULT_TAU)


def _make_encoder(args, ix=None):
    if args.tau is not None and not 0.0 <= args.tau <= 1.0:
        raise _usage(f"--tau must lie in [0, 1], got {args.tau}")
    if args.embed_dim < 1:
        raise _usage(f"--embed-dim must be >= 1, got {args.embed_dim}")
    if args.encoder == "trigram":
        return TrigramEncoder(dim=args.embed_dim)
    if args.encoder.startswith("file:"):
        path = args.encoder[len("file:") :]
        expected: set[str] = set()
        if ix is not None:
            for keys in ix.vocab.values():
                expected.update(keys)
        vectors = load_precomputed_vectors(path, expected, dim=args.embed_dim)
        return PrecomputedVectorEncoder(vectors, dim=args.embed_dim)
    raise _usage(f"unknown encoder {args.encoder!r}")


def _usage(message: str) -> SystemExit:
    print(f"hyperrag: error: {message}", file=sys.stderr)
    return SystemExit(EXIT_USAGE)


def _check_k(k: int) -> None:
    if k < 1:
        raise _usage(f"--k must be >= 1, got {k}")


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _cmd_build(args) -> int:
    corpus = load_corpus(args.corpus)
    extensions = tuple(args.dimensions or ())
    labels = {}
    if args.gazetteer:
        gazetteer = load_gazetteer(args.gazetteer, extensions)
        labels = extract_all(corpus, gazetteer)
    for labels_path in args.labels or ():
        load_precomputed_labels(labels_path, corpus, extensions, into=labels)
    if not args.gazetteer and not args.labels:
        raise _usage("build needs --gazetteer and/or --labels")
    dimensions = CANONICAL_DIMENSIONS + extensions if extensions else None
    encoder = _make_encoder(args)
    ix = build_index(corpus, labels, dimensions=dimensions, encoder=encoder)
    save_index(ix, args.out)
    print(
        f"indexed {ix.doc_count} documents, {ix.label_key_count()} label keys "
        f"across {len(ix.dimensions)} dimensions -> {args.out}",
        file=sys.stderr,
    )
    return EXIT_OK


def _cmd_query(args) -> int:
    _check_k(args.k)
    ix = load_index(args.index)
    encoder = _make_encoder(args, ix)
    external = None
    if args.decomposition:
        table = ExternalDecompositions.load(args.decomposition)
        external = table.for_query("", args.query)
    result = retrieve(args.query, ix, encoder, tau=args.tau, k=args.k, external=external)
    if args.json:
        _emit(json.dumps(result_to_dict(result), sort_keys=True, ensure_ascii=False), args.out)
    else:
        _emit(format_result(result, explain=args.explain), args.out)
    return EXIT_OK


def _cmd_eval(args) -> int:
    _check_k(args.k)
    ix = load_index(args.index)
    encoder = _make_encoder(args, ix)
    queries = load_queries(args.queries)
    report = eval_recall(ix, encoder, queries, k=args.k, tau=args.tau)
    _emit(json.dumps(report.to_dict(), indent=2, sort_keys=True, ensure_ascii=False), args.out)
    recalls = " ".join(f"recall@{k}={v:.3f}" for k, v in sorted(report.recall_at.items()))
    print(f"{len(report.rows)} queries: {recalls} mrr={report.mrr:.3f}", file=sys.stderr)
    return EXIT_OK


def _cmd_bench(args) -> int:
    _check_k(args.k)
    if args.reps < 1:
        raise _usage(f"--reps must be >= 1, got {args.reps}")
    if args.noise < 0:
        raise _usage(f"--noise must be >= 0, got {args.noise}")
    if not 0.0 <= args.b <= 1.0:
        raise _usage(f"--b must lie in [0, 1], got {args.b}")
    try:
        fractions = [float(f) for f in args.fractions.split(",") if f]
    except ValueError:
        raise _usage(f"bad --fractions value {args.fractions!r}")
    if not fractions or any(not 0.0 < f <= 1.0 for f in fractions):
        raise _usage(f"fractions must lie in (0, 1]: {args.fractions!r}")
    corpus = load_corpus(args.corpus)
    gazetteer = load_gazetteer(args.gazetteer)
    queries = load_queries(args.queries)
    engines = ["hypercube"]
    if args.baseline == "bm25":
        engines.append("bm25")
    seed = int(os.environ.get("HYPERRAG_SEED", args.seed))
    encoder = _make_encoder(args)
    rows = bench_latency(
        corpus,
        gazetteer,
        queries,
        engines=engines,
        fractions=fractions,
        noise=args.noise,
        repetitions=args.reps,
        tau=args.tau,
        k=args.k,
        encoder=encoder,
        seed=seed,
        parallel=args.parallel,
        k1=args.k1,
        b=args.b,
    )
    if args.out:
        write_bench_csv(rows, args.out)
        print(f"wrote {len(rows)} rows -> {args.out}", file=sys.stderr)
    else:
        print("engine,fraction,noise,mean_us,median_us,p95_us")
        for row in rows:
            print(
                f"{row.engine},{row.fraction},{row.noise},"
                f"{row.mean_us:.3f},{row.median_us:.3f},{row.p95_us:.3f}"
            )
    return EXIT_OK


def _cmd_inspect(args) -> int:
    ix = load_index(args.index)
    if args.label and args.dim:
        postings = lookup(ix, args.dim, args.label)
        if args.json:
            payload = [{"doc_id": p.doc_id, "count": p.count} for p in postings]
            _emit(json.dumps(payload, sort_keys=True), args.out)
        else:
            _emit("\n".join(f"{p.doc_id}\t{p.count}" for p in postings) if postings else "(empty)", args.out)
        return EXIT_OK
    if args.cell:
        coords = {}
        for part in args.cell.split(","):
            if "=" not in part:
                raise _usage(f"bad --cell coordinate {part!r}; expected DIM=label")
            dim, key = part.split("=", 1)
            coords[dim] = key
        docs = cell_documents(ix, CellAddress(coords))
        _emit(json.dumps(docs) if args.json else "\n".join(docs) if docs else "(empty)", args.out)
        return EXIT_OK
    # Default: per-dimension vocabulary summary.
    lines = [f"documents: {ix.doc_count}"]
    for dim in ix.dimensions:
        keys = sorted(ix.vocab.get(dim, ()))
        lines.append(f"{dim}: {len(keys)} labels")
        if args.dim == dim or args.verbose:
            for key in keys:
                postings = ix.inverted[dim][key]
                lines.append(f"  {key}: {', '.join(f'{p.doc_id}:{p.count}' for p in postings)}")
    _emit("\n".join(lines), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hyperrag", description=__doc__)
    parser.add_argument("--version", action="version", version=f"hyperrag {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_build = sub.add_parser("build", help="index a corpus")
    p_build.add_argument("--corpus", required=True)
    p_build.add_argument("--labels", action="append", help="precomputed labels file (repeatable)")
    p_build.add_argument("--gazetteer")
    p_build.add_argument("--dimensions", nargs="*", help="extension dimension names (upper-case)")
    p_build.add_argument("--out", required=True)
    _add_encoder_flags(p_build)
    p_build.set_defaults(func=_cmd_build)

    p_query = sub.add_parser("query", help="run one query against an index")
    p_query.add_argument("--index", required=True)
    p_query.add_argument("--query", required=True)
    p_query.add_argument("--k", type=int, default=DEFAULT_K)
    p_query.add_argument("--decomposition", help="external decomposition file")
    p_query.add_argument("--explain", action="store_true")
    p_query.add_argument("--json", action="store_true")
    p_query.add_argument("--out")
    _add_encoder_flags(p_query)
    p_query.set_defaults(func=_cmd_query)

    p_eval = sub.add_parser("eval", help="recall/MRR against gold doc ids")
    p_eval.add_argument("--index", required=True)
    p_eval.add_argument("--queries", required=True)
    p_eval.add_argument("--k", type=int, default=DEFAULT_K)
    p_eval.add_argument("--out")
    _add_encoder_flags(p_eval)
    p_eval.set_defaults(func=_cmd_eval)

    p_bench = sub.add_parser("bench", help="latency vs corpus size")
    p_bench.add_argument("--corpus", required=True)
    p_bench.add_argument("--gazetteer", required=True)
    p_bench.add_argument("--queries", required=True)
    p_bench.add_argument("--fractions", default="0.125,0.25,0.5,1")
    p_bench.add_argument("--noise", type=int, default=0)
    p_bench.add_argument("--reps", type=int, default=5)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--k", type=int, default=DEFAULT_K)
    p_bench.add_argument("--k1", type=float, default=DEFAULT_K1)
    p_bench.add_argument("--b", type=float, default=DEFAULT_B)
    p_bench.add_argument("--baseline", choices=["bm25", "none"], default="bm25")
    p_bench.add_argument("--parallel", action="store_true", help="throughput mode (thread pool)")
    p_bench.add_argument("--out")
    _add_encoder_flags(p_bench)
    p_bench.set_defaults(func=_cmd_bench)

    p_inspect = sub.add_parser("inspect", help="peek inside an index")
    p_inspect.add_argument("--index", required=True)
    p_inspect.add_argument("--dim")
    p_inspect.add_argument("--label")
    p_inspect.add_argument("--cell", help="comma-separated DIM=label coordinates")
    p_inspect.add_argument("--verbose", action="store_true")
    p_inspect.add_argument("--json", action="store_true")
    p_inspect.add_argument("--out")
    p_inspect.set_defaults(func=_cmd_inspect)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else EXIT_USAGE
        return code
    except HyperRagError as exc:
        print(f"hyperrag: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # pragma: no cover - defensive
        print(f"hyperrag: internal error: {exc.__class__.__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
