"""Command-line pipeline: preprocess, train, merge, export, query, analogy,
evaluate, sweep, oracle-compare.

Every subcommand is deterministic given its flags; all randomness flows
from --seed (default: the HASH2VEC_SEED environment variable, else 1).
Exit codes: 1 usage error, 2 I/O error, 3 domain error, with a one-line
diagnostic on stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import queue
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Iterator

import numpy as np

from . import corpus, evaluation, oracle, query
from .embedder import EmbeddingTable, TrainParams, merge, read_table, train, write_table
from .errors import (
    CorpusDecodeError,
    DatasetError,
    Hash2VecError,
    TableParseError,
)
from .hashing import HasherSpec, WeightSpec

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_DOMAIN = 3

log = logging.getLogger("hash2vec")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_corpus_opts(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--stoplist", metavar="PATH", help="file with one token per line to remove")
    sp.add_argument("--percentile", type=float, metavar="P",
                    help="keep only the bottom P of frequency mass, removing the most frequent tokens above it")
    sp.add_argument("--phrases", action="store_true",
                    help="join high-scoring adjacent pairs into single tokens (loads the corpus into memory)")
    sp.add_argument("--phrase-threshold", type=float, default=1e-4, metavar="T")
    sp.add_argument("--phrase-discount", type=float, default=5.0, metavar="D")
    sp.add_argument("--phrase-passes", type=int, default=1, metavar="N")
    sp.add_argument("--sample-prob", type=float, metavar="P",
                    help="keep each sentence independently with probability P")


def _add_hash_opts(sp: argparse.ArgumentParser, require_nk: bool = True) -> None:
    sp.add_argument("--n", type=int, required=require_nk, help="embedding dimension")
    sp.add_argument("--k", type=int, required=True, help="context window size")
    sp.add_argument("--weight", choices=["constant", "gaussian"], default="gaussian")
    sp.add_argument("--sigma", type=float, help="gaussian width (default: k/2)")
    sp.add_argument("--seed", type=int, help="bucket hash seed (default: $HASH2VEC_SEED or 1)")
    sp.add_argument("--sign-seed", type=int, help="sign hash seed (default: seed + 1)")


def _build_parser() -> _Parser:
    parser = _Parser(prog="hash2vec", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--verbose", action="store_true", help="log progress to stderr")
    parser.add_argument("--config", metavar="PATH",
                        help="key=value file supplying flag defaults; explicit flags win")
    subparsers = parser.add_subparsers(dest="command", required=True)

    class _Sub:
        # accepts --verbose after the subcommand as well as before it
        def add_parser(self, *a, **kw):
            sp = subparsers.add_parser(*a, **kw)
            sp.add_argument("--verbose", action="store_true",
                            default=argparse.SUPPRESS, help=argparse.SUPPRESS)
            return sp

    sub = _Sub()

    sp = sub.add_parser("preprocess", help="clean a corpus and write one sentence per line")
    sp.add_argument("--input", required=True)
    sp.add_argument("--output", required=True)
    sp.add_argument("--seed", type=int)
    _add_corpus_opts(sp)

    sp = sub.add_parser("train", help="train an embedding table over a corpus")
    sp.add_argument("--input", required=True)
    sp.add_argument("--output", required=True, help="embedding file to write")
    sp.add_argument("--shards", type=int, default=1,
                    help="train N sentence-level shards in parallel and merge (same output as 1)")
    _add_hash_opts(sp)
    _add_corpus_opts(sp)

    sp = sub.add_parser("merge", help="sum embedding tables trained with identical parameters")
    sp.add_argument("inputs", nargs="+", metavar="TABLE")
    sp.add_argument("--output", required=True)

    sp = sub.add_parser("export", help="re-emit a table as headerless TSV for external tools")
    sp.add_argument("--input", required=True)
    sp.add_argument("--output", required=True)
    sp.add_argument("--limit", type=int, help="emit only the first N words (lexicographic)")

    sp = sub.add_parser("query", help="nearest neighbors of a word, as JSON lines")
    sp.add_argument("--table", required=True)
    sp.add_argument("--word", required=True)
    sp.add_argument("--topk", type=int, default=5)

    sp = sub.add_parser("analogy", help="rank words by similarity to x + y - z, as JSON lines")
    sp.add_argument("--table", required=True)
    sp.add_argument("--x", required=True)
    sp.add_argument("--y", required=True)
    sp.add_argument("--z", required=True)
    sp.add_argument("--topk", type=int, default=5)
    sp.add_argument("--raw-dot", action="store_true", help="use unnormalized dot products")

    sp = sub.add_parser("evaluate", help="Spearman score of a table against a similarity dataset")
    sp.add_argument("--table", required=True)
    sp.add_argument("--dataset", required=True)

    sp = sub.add_parser("sweep", help="train/evaluate across dimensions; write a CSV curve")
    sp.add_argument("--input", required=True)
    sp.add_argument("--dataset", required=True)
    sp.add_argument("--output", required=True)
    sp.add_argument("--dims", required=True, help="comma-separated ascending dimensions")
    _add_hash_opts(sp, require_nk=False)
    _add_corpus_opts(sp)

    sp = sub.add_parser("oracle-compare",
                        help="distortion of hashed tables against the exact co-occurrence matrix")
    sp.add_argument("--input", required=True)
    sp.add_argument("--output", required=True, help="summary CSV, one row per dimension")
    sp.add_argument("--n", type=int, action="append", required=True,
                    help="dimension to test (repeatable)")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--weight", choices=["constant", "gaussian"], default="gaussian")
    sp.add_argument("--sigma", type=float)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--sign-seed", type=int)
    sp.add_argument("--pairs", type=int, default=200, help="word pairs to sample")
    sp.add_argument("--vocab-cap", type=int, default=oracle.DEFAULT_VOCAB_CAP)
    sp.add_argument("--detail-dir", help="also write per-pair CSVs here, one per dimension")
    _add_corpus_opts(sp)

    return parser


def _resolve_seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    return int(os.environ.get("HASH2VEC_SEED", "1"))


def _expand_config(argv: list[str]) -> list[str]:
    """Splice `--config FILE` key=value pairs in as flags ahead of the
    user's own, so explicit flags override the file."""
    if "--config" not in argv:
        return argv
    at = argv.index("--config")
    if at + 1 >= len(argv):
        return argv  # argparse reports the missing value
    path = argv[at + 1]
    rest = argv[:at] + argv[at + 2 :]
    injected: list[str] = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}: expected key=value, got {line!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            flag = "--" + key.replace("_", "-")
            if value.lower() == "true":
                injected.append(flag)
            elif value.lower() != "false":
                injected.extend([flag, value])
    # flags from the file go right after the subcommand so later
    # (explicit) occurrences win
    for i, token in enumerate(rest):
        if not token.startswith("-"):
            return rest[: i + 1] + injected + rest[i + 1 :]
    return rest + injected


def _load_stoplist(path: str) -> frozenset[str]:
    with open(path, "r", encoding="utf-8") as f:
        return frozenset(line.strip().lower() for line in f if line.strip())


def _stream_factory(args, seed: int) -> Callable[[], Iterable[list[str]]]:
    """Compose the preprocessing pipeline as a factory of fresh iterators.

    Without --phrases every stage streams; a counting pass runs first only
    when --percentile is set.  --phrases materializes the corpus because
    joining needs whole-stream bigram counts per pass.
    """
    path = args.input
    stoplist = _load_stoplist(args.stoplist) if args.stoplist else frozenset()
    filter_cfg = corpus.FilterConfig(stoplist=stoplist, percentile=args.percentile)
    if args.percentile is not None:
        freqs = corpus.count_frequencies(corpus.iter_corpus(path))
        removed = corpus.removal_set(freqs, filter_cfg)
    else:
        removed = corpus.removal_set(corpus.FrequencyTable(), filter_cfg)
    sampler = (
        corpus.SamplerConfig(keep_probability=args.sample_prob, seed=seed)
        if args.sample_prob is not None
        else None
    )

    if args.phrases:
        stream = list(corpus.iter_filtered(corpus.iter_corpus(path), removed))
        cfg = corpus.PhraseConfig(
            threshold=args.phrase_threshold,
            discount=args.phrase_discount,
            passes=args.phrase_passes,
        )
        stream = corpus.join_phrases(stream, corpus.count_frequencies(stream), cfg)
        if sampler is not None:
            stream = corpus.sample_sentences(stream, sampler)
        return lambda: iter(stream)

    def factory() -> Iterator[list[str]]:
        it = corpus.iter_filtered(corpus.iter_corpus(path), removed)
        return corpus.iter_sampled(it, sampler) if sampler is not None else it

    return factory


def _train_params(args, seed: int) -> TrainParams:
    return TrainParams.create(
        n=args.n,
        k=args.k,
        seed=seed,
        sign_seed=args.sign_seed,
        weight_kind=args.weight,
        sigma=args.sigma,
    )


def _train_sharded(stream: Iterable[list[str]], params: TrainParams, shards: int) -> EmbeddingTable:
    """Round-robin sentences onto shard queues, train concurrently, merge.

    Each shard sees a sentence-boundary split, so the merged table is
    bit-identical to a single pass.  An empty shard contributes the
    additive identity.
    """
    queues: list[queue.Queue] = [queue.Queue(maxsize=4096) for _ in range(shards)]

    def worker(q: queue.Queue) -> EmbeddingTable:
        try:
            return train(iter(q.get, None), params)
        except Hash2VecError:
            return EmbeddingTable(params, [], np.zeros((0, params.n)))

    with ThreadPoolExecutor(max_workers=shards) as pool:
        futures = [pool.submit(worker, q) for q in queues]
        for i, sentence in enumerate(stream):
            queues[i % shards].put(sentence)
        for q in queues:
            q.put(None)
        tables = [f.result() for f in futures]
    return merge(tables)


def _cmd_preprocess(args) -> int:
    seed = _resolve_seed(args)
    factory = _stream_factory(args, seed)
    with open(args.output, "w", encoding="utf-8") as f:
        for sentence in factory():
            f.write(" ".join(sentence) + "\n")
    return EXIT_OK


def _cmd_train(args) -> int:
    seed = _resolve_seed(args)
    if args.shards < 1:
        raise ValueError(f"--shards must be >= 1, got {args.shards}")
    params = _train_params(args, seed)
    log.info("training with %s", params)
    factory = _stream_factory(args, seed)
    if args.shards == 1:
        table = train(factory(), params)
    else:
        table = _train_sharded(factory(), params, args.shards)
    write_table(table, args.output)
    log.info("trained %d words over %d tokens", len(table), table.token_count)
    return EXIT_OK


def _cmd_merge(args) -> int:
    tables = [read_table(path) for path in args.inputs]
    write_table(merge(tables), args.output)
    return EXIT_OK


def _cmd_export(args) -> int:
    table = read_table(args.input)
    words = sorted(table.words)
    if args.limit is not None:
        words = words[: args.limit]
    with open(args.output, "w", encoding="utf-8") as f:
        for word in words:
            row = table.vector(word)
            f.write(word + "\t" + "\t".join(f"{x:.17e}" for x in row) + "\n")
    return EXIT_OK


def _print_neighbors(neighbors) -> None:
    for rank, nb in enumerate(neighbors, start=1):
        print(json.dumps({"word": nb.word, "score": nb.score, "rank": rank}))


def _cmd_query(args) -> int:
    table = read_table(args.table)
    _print_neighbors(query.nearest(table, args.word.lower(), args.topk))
    return EXIT_OK


def _cmd_analogy(args) -> int:
    table = read_table(args.table)
    neighbors = query.analogy(
        table, args.x.lower(), args.y.lower(), args.z.lower(), args.topk, raw_dot=args.raw_dot
    )
    _print_neighbors(neighbors)
    return EXIT_OK


def _cmd_evaluate(args) -> int:
    table = read_table(args.table)
    dataset = evaluation.load_dataset(args.dataset)
    report = evaluation.evaluate(table, dataset)
    print(f"spearman_rho={report.spearman_rho!r}")
    print(f"covered={report.covered}")
    print(f"skipped={report.skipped}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    seed = _resolve_seed(args)
    dims = [int(x) for x in args.dims.split(",") if x]
    if not dims:
        raise ValueError("--dims must list at least one dimension")
    args.n = dims[0]
    params = _train_params(args, seed)
    dataset = evaluation.load_dataset(args.dataset)
    stream = list(_stream_factory(args, seed)())
    points = evaluation.sweep_dimensions(stream, params, dims, dataset)
    evaluation.write_sweep_csv(points, args.output)
    for p in points:
        log.info("n=%d rho=%.4f oracle=%.4f", p.n, p.rho, p.rho_oracle)
    return EXIT_OK


def _cmd_oracle_compare(args) -> int:
    seed = _resolve_seed(args)
    sign_seed = args.sign_seed if args.sign_seed is not None else seed + 1
    factory = _stream_factory(args, seed)
    sigma = args.sigma
    if args.weight == "gaussian" and sigma is None:
        sigma = args.k / 2.0
    weight = WeightSpec(kind=args.weight, sigma=sigma if args.weight == "gaussian" else None)
    matrix = oracle.build_cooccurrence(factory(), args.k, weight, vocab_cap=args.vocab_cap)
    rng = random.Random(seed)
    vocab = matrix.words
    if len(vocab) < 2:
        raise Hash2VecError("corpus vocabulary too small to sample pairs")
    pairs = [tuple(rng.sample(vocab, 2)) for _ in range(args.pairs)]

    with open(args.output, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(
            ["n", "median_rel_err", "p90_rel_err", "spearman_inner", "spearman_cosine",
             "evaluated", "skipped"]
        )
        for n in args.n:
            hasher = HasherSpec(dimension=n, seed=seed, sign_seed=sign_seed)
            table = oracle.project(matrix, hasher)
            report = oracle.distortion(matrix, table, pairs)
            writer.writerow(
                [n, repr(report.median_rel_err), repr(report.p90_rel_err),
                 repr(report.spearman_inner), repr(report.spearman_cosine),
                 len(report.pairs), report.skipped]
            )
            if args.detail_dir:
                os.makedirs(args.detail_dir, exist_ok=True)
                oracle.write_distortion_csv(
                    report, os.path.join(args.detail_dir, f"distortion_{n}.csv")
                )
    return EXIT_OK


_COMMANDS = {
    "preprocess": _cmd_preprocess,
    "train": _cmd_train,
    "merge": _cmd_merge,
    "export": _cmd_export,
    "query": _cmd_query,
    "analogy": _cmd_analogy,
    "evaluate": _cmd_evaluate,
    "sweep": _cmd_sweep,
    "oracle-compare": _cmd_oracle_compare,
}

_IO_ERRORS = (OSError, UnicodeDecodeError, CorpusDecodeError, TableParseError, DatasetError)


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    raw = list(sys.argv[1:] if argv is None else argv)
    try:
        raw = _expand_config(raw)
    except OSError as e:
        print(f"hash2vec: error: {e}", file=sys.stderr)
        return EXIT_IO
    except ValueError as e:
        print(f"hash2vec: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    try:
        args = parser.parse_args(raw)
    except SystemExit as e:
        return int(e.code or 0)
    logging.basicConfig(
        level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
        format="hash2vec: %(message)s",
        stream=sys.stderr,
    )
    try:
        return _COMMANDS[args.command](args)
    except _IO_ERRORS as e:
        print(f"hash2vec: error: {e}", file=sys.stderr)
        return EXIT_IO
    except Hash2VecError as e:
        print(f"hash2vec: error: {e}", file=sys.stderr)
        return EXIT_DOMAIN
    except ValueError as e:
        print(f"hash2vec: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
