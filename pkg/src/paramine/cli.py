"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 data error (unreadable or malformed
input, failed checkpoint).
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import os
import sys
from pathlib import Path

from .corpus import BilingualDictionary, load_dictionary, load_parallel, write_parallel
from .decoder import gloss_tokens
from .lexicon import estimate, load_lexicon, write_lexicon
from .metrics import bleu, load_test_set, nist
from .transduce import (
    CheckpointError,
    ConfigError,
    Inputs,
    Transducer,
    evaluate,
    format_mining_tsv,
    format_report_tsv,
    load_config,
    mine_once,
    render_report,
)

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2

REPORT_FILE = "report.tsv"
MINING_FILE = "mining.tsv"

log = logging.getLogger("paramine")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive(value: str) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {n}")
    return n


def _default_jobs() -> int:
    return len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1)


def _optional_dictionary(path) -> BilingualDictionary:
    return load_dictionary(path) if path else BilingualDictionary()


def _overrides(config, args):
    changes = {}
    if getattr(args, "top_k", None) is not None:
        changes["top_k_docs"] = args.top_k
    if getattr(args, "nbest", None) is not None:
        changes["nbest"] = args.nbest
    return dataclasses.replace(config, **changes) if changes else config


def cmd_train(args) -> int:
    if args.em_iters < 1:
        raise UsageError("--em-iters must be >= 1")
    corpus = load_parallel(args.seed)
    lex = estimate(corpus, _optional_dictionary(args.dictionary), args.em_iters)
    write_lexicon(lex, args.out)
    log.info("trained on %d pairs, log-likelihood %.4f", len(corpus), lex.final_log_likelihood)
    return EXIT_OK


def cmd_gloss(args) -> int:
    lex = load_lexicon(args.lexicon)
    dictionary = _optional_dictionary(args.dictionary)
    for line in sys.stdin:
        tokens = line.split()
        out, _ = gloss_tokens(lex, dictionary, tokens)
        sys.stdout.write(" ".join(out) + "\n")
    return EXIT_OK


def cmd_mine(args) -> int:
    config = _overrides(load_config(args.config), args)
    lex = load_lexicon(args.lexicon)
    inputs = Inputs.load(config)
    candidates, mined = mine_once(lex, inputs, config, args.iteration, args.jobs)
    write_parallel(mined, args.out)
    scores_path = args.scores or f"{args.out}.scores.tsv"
    with open(scores_path, "w", encoding="utf-8", newline="\n") as fh:
        counts = [f"C{k}" for k in range(1, config.weights.max_n + 1)]
        fh.write("\t".join(["source_id", "target_id", "score", *counts, "C_number", "C_propn", "length"]) + "\n")
        for c in candidates:
            b = c.breakdown
            row = [
                f"{c.source.doc_id}:{c.source.index}",
                f"{c.target.doc_id}:{c.target.index}",
                repr(b.score),
                *map(str, b.ngram_counts),
                str(b.number_matches),
                str(b.propn_matches),
                str(b.length_factor),
            ]
            fh.write("\t".join(row) + "\n")
    log.info("%d candidates, %d pairs selected", len(candidates), len(mined))
    return EXIT_OK


def cmd_loop(args) -> int:
    config = _overrides(load_config(args.config), args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.resume:
        driver = Transducer.resume(config, out, jobs=args.jobs)
    else:
        driver = Transducer(config, jobs=args.jobs)
    while not driver.done:
        driver.run(checkpoint_dir=out, stop_after=driver.state.next_iteration)
        write_parallel(driver.state.mined, out / f"mined_{driver.state.next_iteration - 1}.jsonl")
    reports = driver.state.reports
    (out / REPORT_FILE).write_text(format_report_tsv(reports), encoding="utf-8")
    (out / MINING_FILE).write_text(format_mining_tsv(reports), encoding="utf-8")
    return EXIT_OK


def cmd_eval(args) -> int:
    test_set = load_test_set(args.test_set)
    if args.hyp:
        with open(args.hyp, encoding="utf-8") as fh:
            hyps = [line.split() for line in fh]
        nist_score, bleu_score = nist(hyps, test_set.references), bleu(hyps, test_set.references)
    else:
        lex = load_lexicon(args.lexicon)
        nist_score, bleu_score = evaluate(lex, _optional_dictionary(args.dictionary), test_set)
    print(f"{test_set.name}\tNIST {nist_score:.4f}\tBLEU {100 * bleu_score:.2f}")
    return EXIT_OK


def cmd_report(args) -> int:
    sys.stdout.write(render_report(Path(args.report).read_text(encoding="utf-8")))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="paramine", description="Mine parallel sentences from comparable corpora.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("train", help="estimate a lexicon from a parallel corpus")
    p.add_argument("--seed", required=True)
    p.add_argument("--dictionary")
    p.add_argument("--em-iters", type=int, default=10)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("gloss", help="gloss-translate stdin line by line")
    p.add_argument("--lexicon", required=True)
    p.add_argument("--dictionary")
    p.set_defaults(func=cmd_gloss)

    for name, func, helptext in (
        ("mine", cmd_mine, "one mining pass with a fixed lexicon"),
        ("loop", cmd_loop, "the full iterative mining loop"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", required=True)
        p.add_argument("--out", required=True)
        p.add_argument("--jobs", type=_positive, default=_default_jobs())
        p.add_argument("--top-k", type=_positive)
        p.add_argument("--nbest", type=_positive)
        p.set_defaults(func=func)
        if name == "mine":
            p.add_argument("--lexicon", required=True)
            p.add_argument("--scores", help="candidate score TSV (default: OUT.scores.tsv)")
            p.add_argument("--iteration", type=int, default=0, help="iteration recorded as the pairs' origin")
        else:
            p.add_argument("--resume", action="store_true", help="continue from the checkpoint in OUT")

    p = sub.add_parser("eval", help="NIST and BLEU on a test set")
    p.add_argument("--test-set", required=True)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--lexicon", help="gloss the test set sources with this lexicon")
    src.add_argument("--hyp", help="hypothesis file, one tokenized segment per line")
    p.add_argument("--dictionary")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("report", help="pretty-print a report TSV")
    p.add_argument("report")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"paramine {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"paramine {args.command}: no such file: {exc.filename}", file=sys.stderr)
        return EXIT_DATA
    except (OSError, ValueError, ConfigError, CheckpointError) as exc:
        print(f"paramine {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
