"""Command-line surface: dataset preparation and evaluation commands."""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Callable, Iterable, Sequence

from graphlin import rdf
from graphlin.metrics import bleu as bleu_mod
from graphlin.metrics import regression as regression_mod
from graphlin.metrics.smatch import TooLarge, scored_triple_count, smatch, smatch_exact
from graphlin.corruption import MaskStrategy, Target, mask
from graphlin.graph import GraphError, edge_count, reentrancy_count
from graphlin.penman import PenmanError, serialize, simplify
from graphlin.relinearize import Strategy, linearize
from graphlin.seeding import DEFAULT_SEED, derive_rng
from graphlin.stream import (
    SCAFFOLD_TASKS,
    MixtureConfig,
    ParsedExample,
    TaskKind,
    TrainingExample,
    adversarial_stream,
    load_corpus,
    mixture_batches,
    scaffold_stream,
    subset_examples,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_INTERNAL = 3

_CORRUPT_TASKS = {
    "all": TaskKind.MASK_ALL,
    "components": TaskKind.MASK_COMPONENTS,
    "nodes": TaskKind.MASK_NODES,
    "sentence": TaskKind.SENTENCE_MLM,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


class InputError(Exception):
    """Unreadable or unparseable input; maps to exit code 2."""


def _default_seed() -> int:
    env = os.environ.get("GRAPHLIN_SEED")
    return int(env) if env else DEFAULT_SEED


def _dump_json(payload: dict, path: str | None = None) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2)
    if path:
        Path(path).write_text(text + "\n", encoding="utf-8")
    print(text)


def _write_jsonl(path: str, records: Iterable[dict]) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record, sort_keys=True))
            handle.write("\n")
            count += 1
    return count


def _write_manifest(output: str, command: str, config: dict, stats: dict) -> None:
    manifest = {"command": command, "config": config, "stats": stats}
    Path(output + ".manifest.json").write_text(
        json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )


def _load(args) -> list[ParsedExample]:
    try:
        examples, failures = load_corpus(
            args.corpus, strict=args.strict, allow_cycles=args.allow_cycles
        )
    except OSError as exc:
        raise InputError(str(exc)) from exc
    except (PenmanError, GraphError) as exc:
        raise InputError(f"{args.corpus}: {exc}") from exc
    args._parse_failures = len(failures)
    return examples


def _parallel_map(fn: Callable, items: Sequence, jobs: int) -> list:
    if jobs <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items, chunksize=16))


# Workers are module-level so --jobs > 1 can pickle them.
_WORKER_STATE: dict = {}


def _init_worker(state: dict) -> None:
    _WORKER_STATE.update(state)


def _relinearize_one(example: ParsedExample) -> dict:
    seed, epoch = _WORKER_STATE["seed"], _WORKER_STATE["epoch"]
    strategy = Strategy(_WORKER_STATE["strategy"])
    rng = derive_rng(seed, example.id, epoch, "linearize")
    tokens = linearize(example.graph, example.canonical, strategy, rng)
    return {"id": example.id, "tokens": " ".join(tokens)}


def _corrupt_one(example: ParsedExample) -> tuple[dict, int, int]:
    seed, epoch = _WORKER_STATE["seed"], _WORKER_STATE["epoch"]
    rate = _WORKER_STATE["rate"]
    task = TaskKind(_WORKER_STATE["task"])
    lin = Strategy(_WORKER_STATE["linearization"])
    if task is TaskKind.SENTENCE_MLM:
        tokens = example.sentence_tokens()
        target_class = Target.SENTENCE_TOKENS
    else:
        rng_lin = derive_rng(seed, example.id, epoch, "linearize")
        tokens = linearize(example.graph, example.canonical, lin, rng_lin)
        target_class = {
            TaskKind.MASK_ALL: Target.ALL_GRAPH_TOKENS,
            TaskKind.MASK_COMPONENTS: Target.COMPONENTS_ONLY,
            TaskKind.MASK_NODES: Target.NODES_ONLY,
        }[task]
    rng = derive_rng(seed, example.id, epoch, "mask")
    pair = mask(tokens, MaskStrategy(target_class, rate), rng)
    masked = sum(1 for a, b in zip(pair.input, pair.target) if a != b)
    record = TrainingExample(example.id, task, pair.input, pair.target).to_record()
    return record, masked, len(pair.target)


def _pairs_one(example: ParsedExample) -> dict:
    seed, epoch = _WORKER_STATE["seed"], _WORKER_STATE["epoch"]
    strategy = Strategy(_WORKER_STATE["strategy"])
    rng = derive_rng(seed, example.id, epoch, "generate")
    tokens = linearize(example.graph, example.canonical, strategy, rng)
    return TrainingExample(
        example.id, TaskKind.GENERATE_TEXT, tuple(tokens), tuple(example.sentence_tokens())
    ).to_record()


def _run_with_state(fn: Callable, examples: list, state: dict, jobs: int) -> list:
    _init_worker(state)
    if jobs <= 1:
        return [fn(example) for example in examples]
    with ProcessPoolExecutor(max_workers=jobs, initializer=_init_worker, initargs=(state,)) as pool:
        return list(pool.map(fn, examples, chunksize=16))


def cmd_stats(args) -> int:
    if args.format == "amr":
        examples = _load(args)
        report: dict = {"examples": len(examples), "parse_failures": args._parse_failures}
        if examples:
            edges = [edge_count(e.graph) for e in examples]
            words = [len(e.sentence_tokens()) for e in examples]
            reent = [reentrancy_count(e.canonical) for e in examples]
            report.update(
                {
                    "avg_edges": sum(edges) / len(edges),
                    "avg_target_words": sum(words) / len(words),
                    "reentrancies": {
                        "mean": sum(reent) / len(reent),
                        "max": max(reent),
                        "total": sum(reent),
                    },
                }
            )
        if args.per_example:
            _write_jsonl(
                args.per_example,
                (
                    {
                        "id": e.id,
                        "edges": edge_count(e.graph),
                        "reentrancies": reentrancy_count(e.canonical),
                        "target_words": len(e.sentence_tokens()),
                        "snt": e.snt,
                    }
                    for e in examples
                ),
            )
    else:
        entries = _read_rdf(args.corpus, args.format)
        report = {"examples": len(entries), "parse_failures": 0}
        if entries:
            report["avg_edges"] = sum(len(e.triples) for e in entries) / len(entries)
            report["avg_target_words"] = sum(
                len(e.references[0].split()) for e in entries
            ) / len(entries)
        if args.per_example:
            _write_jsonl(
                args.per_example,
                (
                    {"id": str(i), "edges": len(e.triples), "category": e.category}
                    for i, e in enumerate(entries)
                ),
            )
    _dump_json(report)
    return EXIT_OK


def _read_rdf(path: str, fmt: str) -> list:
    try:
        if fmt == "webnlg-xml":
            return rdf.read_webnlg_xml(path)
        return rdf.read_rdf_jsonl(path)
    except (OSError, rdf.RdfFormatError) as exc:
        raise InputError(str(exc)) from exc


def cmd_relinearize(args) -> int:
    examples = _load(args)
    state = {"seed": args.seed, "epoch": args.epoch, "strategy": args.strategy}
    records = _run_with_state(_relinearize_one, examples, state, args.jobs)
    count = _write_jsonl(args.output, records)
    stats = {"examples": count, "parse_failures": args._parse_failures}
    _write_manifest(args.output, "relinearize", _config_dict(args), stats)
    _dump_json({"output": args.output, **stats})
    return EXIT_OK


def cmd_corrupt(args) -> int:
    examples = _load(args)
    if args.strategy == "sentence":
        examples = [e for e in examples if e.snt.strip()]
    state = {
        "seed": args.seed,
        "epoch": args.epoch,
        "rate": args.rate,
        "task": _CORRUPT_TASKS[args.strategy].value,
        "linearization": args.linearization,
    }
    results = _run_with_state(_corrupt_one, examples, state, args.jobs)
    records = [r for r, _, _ in results]
    masked = sum(m for _, m, _ in results)
    total = sum(t for _, _, t in results)
    count = _write_jsonl(args.output, records)
    stats = {
        "examples": count,
        "parse_failures": args._parse_failures,
        "masked_tokens": masked,
        "total_tokens": total,
        "realized_rate": masked / total if total else 0.0,
    }
    _write_manifest(args.output, "corrupt", _config_dict(args), stats)
    _dump_json({"output": args.output, **stats})
    return EXIT_OK


def cmd_pairs(args) -> int:
    examples = _load(args)
    state = {"seed": args.seed, "epoch": args.epoch, "strategy": args.strategy}
    records = _run_with_state(_pairs_one, examples, state, args.jobs)
    count = _write_jsonl(args.output, records)
    stats = {"examples": count, "parse_failures": args._parse_failures}
    _write_manifest(args.output, "pairs", _config_dict(args), stats)
    _dump_json({"output": args.output, **stats})
    return EXIT_OK


def cmd_stream(args) -> int:
    examples = _load(args)
    examples = subset_examples(examples, args.subset, args.seed)
    strategy = Strategy(args.strategy)
    scaffolds = tuple(TaskKind(name) for name in args.scaffold or ())
    if args.q > 0 and not scaffolds:
        print("graphlin: error: --q > 0 requires at least one --scaffold", file=sys.stderr)
        return EXIT_USAGE
    config = MixtureConfig(
        scaffold_probability=args.q,
        enabled_scaffolds=scaffolds,
        batch_size=args.batch_size,
        seed=args.seed,
    )
    records: list[dict] = []
    task_counts: dict[str, int] = {}
    scaffold_batches = 0
    total_batches = 0
    for epoch in range(1, args.epochs + 1):
        streams = {TaskKind.GENERATE_TEXT: list(adversarial_stream(examples, strategy, epoch, args.seed))}
        for task in scaffolds:
            streams[task] = list(scaffold_stream(examples, task, epoch, args.seed, rate=args.rate))
        rng = derive_rng(args.seed, "mixture", epoch)
        for batch in mixture_batches(streams, config, rng):
            total_batches += 1
            if batch[0].task is not TaskKind.GENERATE_TEXT:
                scaffold_batches += 1
            for example in batch:
                task_counts[example.task.value] = task_counts.get(example.task.value, 0) + 1
                records.append(example.to_record())
    count = _write_jsonl(args.output, records)
    stats = {
        "examples": count,
        "parse_failures": args._parse_failures,
        "batches": total_batches,
        "batch_size": args.batch_size,
        "scaffold_fraction": scaffold_batches / total_batches if total_batches else 0.0,
        "task_counts": task_counts,
        "epochs": args.epochs,
    }
    _write_manifest(args.output, "stream", _config_dict(args), stats)
    _dump_json({"output": args.output, **stats})
    return EXIT_OK


def _read_lines(path: str) -> list[str]:
    try:
        return Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise InputError(str(exc)) from exc


def cmd_eval_bleu(args) -> int:
    hyps = _read_lines(args.hyp)
    ref_files = [_read_lines(p) for p in args.ref.split(",")]
    for lines in ref_files:
        if len(lines) != len(hyps):
            raise InputError("reference file length does not match hypothesis file")
    references = [[lines[i] for lines in ref_files] for i in range(len(hyps))]
    try:
        if args.sentence_level:
            scores = [bleu_mod.sentence_bleu(h, r) for h, r in zip(hyps, references)]
            report = {"scores": scores, "signature": "bleu|n:4|tok:13a|case:mixed|smooth:add-1(all-orders)"}
        else:
            report = bleu_mod.corpus_bleu(hyps, references).to_dict()
    except (bleu_mod.Empty, bleu_mod.LengthMismatch) as exc:
        raise InputError(str(exc)) from exc
    _dump_json(report, args.output)
    return EXIT_OK


def cmd_eval_smatch(args) -> int:
    gold_args = argparse.Namespace(corpus=args.gold, strict=args.strict, allow_cycles=args.allow_cycles)
    pred_args = argparse.Namespace(corpus=args.pred, strict=args.strict, allow_cycles=args.allow_cycles)
    gold = _load(gold_args)
    pred = _load(pred_args)
    if len(gold) != len(pred):
        raise InputError(f"{len(gold)} gold graphs vs {len(pred)} predictions")
    pairs = []
    matched_total = 0
    pred_total = 0
    gold_total = 0
    for i, (g_entry, p_entry) in enumerate(zip(gold, pred)):
        if args.exact:
            result = smatch_exact(p_entry.graph, g_entry.graph)
        else:
            rng = derive_rng(args.seed, g_entry.id, i, "smatch")
            result = smatch(p_entry.graph, g_entry.graph, restarts=args.restarts, rng=rng)
        size_pred = scored_triple_count(p_entry.graph)
        size_gold = scored_triple_count(g_entry.graph)
        matched_total += round(result.precision * size_pred)
        pred_total += size_pred
        gold_total += size_gold
        pairs.append({"id": g_entry.id, **{k: v for k, v in result.to_dict().items() if k != "mapping"}})
    precision = matched_total / pred_total if pred_total else 0.0
    recall = matched_total / gold_total if gold_total else 0.0
    f_score = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    report = {
        "pairs": pairs,
        "precision": precision,
        "recall": recall,
        "f_score": f_score,
        "mode": "exact" if args.exact else f"hill-climb(restarts={args.restarts})",
    }
    _dump_json(report, args.output)
    return EXIT_OK


def cmd_eval_regress(args) -> int:
    rows = []
    for line_no, line in enumerate(_read_lines(args.rows), start=1):
        if not line.strip():
            continue
        try:
            rows.append(regression_mod.validate_row(json.loads(line)))
        except (json.JSONDecodeError, regression_mod.MissingField, ValueError) as exc:
            raise InputError(f"{args.rows}:{line_no}: {exc}") from exc
    kept = rows if args.no_filter else regression_mod.filter_outliers(rows)
    X, y = regression_mod.design_matrix(kept)
    try:
        if args.select_bic:
            result = regression_mod.best_subset_bic(X, y, regression_mod.COVARIATE_NAMES)
        else:
            result = regression_mod.ols_fit(X, y, regression_mod.COVARIATE_NAMES)
    except (regression_mod.RankDeficient, regression_mod.TooFewRows) as exc:
        raise InputError(str(exc)) from exc
    report = {
        "rows_read": len(rows),
        "rows_used": len(kept),
        "outliers_dropped": len(rows) - len(kept),
        "selected": args.select_bic,
        **result.to_dict(),
    }
    _dump_json(report, args.output)
    return EXIT_OK


def _config_dict(args) -> dict:
    skip = {"func", "_parse_failures"}
    return {
        k: v for k, v in sorted(vars(args).items())
        if k not in skip and not k.startswith("_") and not callable(v)
    }


def _add_corpus_flags(parser) -> None:
    parser.add_argument("corpus", help="AMR corpus file")
    parser.add_argument("--strict", action="store_true", help="abort on the first malformed entry")
    parser.add_argument("--allow-cycles", action="store_true", help="downgrade directed cycles to a warning")


def _add_common_flags(parser) -> None:
    parser.add_argument("--seed", type=int, default=_default_seed(),
                        help="base seed (default 42; GRAPHLIN_SEED overrides)")
    parser.add_argument("--jobs", type=int, default=1, help="example-level parallelism")
    parser.add_argument("--epoch", type=int, default=1, help="epoch index keying per-example generators")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="graphlin", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", help="corpus statistics report", parents=[])
    _add_corpus_flags(p)
    p.add_argument("--format", choices=["amr", "webnlg-xml", "webnlg-jsonl"], default="amr")
    p.add_argument("--per-example", metavar="FILE", help="also write per-example structure rows (JSONL)")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("relinearize", help="emit relinearized token sequences")
    _add_corpus_flags(p)
    _add_common_flags(p)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--strategy", choices=[s.value for s in Strategy], default="reconfigured")
    p.set_defaults(func=cmd_relinearize)

    p = sub.add_parser("corrupt", help="emit masked denoising pairs")
    _add_corpus_flags(p)
    _add_common_flags(p)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--strategy", choices=sorted(_CORRUPT_TASKS), default="all",
                   help="token class to mask")
    p.add_argument("--rate", type=float, default=0.15, help="global mask rate")
    p.add_argument("--linearization", choices=[s.value for s in Strategy], default="canonical")
    p.set_defaults(func=cmd_corrupt)

    p = sub.add_parser("pairs", help="emit graph-to-text generation pairs")
    _add_corpus_flags(p)
    _add_common_flags(p)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--strategy", choices=[s.value for s in Strategy], default="canonical")
    p.set_defaults(func=cmd_pairs)

    p = sub.add_parser("stream", help="emit a batched multi-task training stream")
    _add_corpus_flags(p)
    _add_common_flags(p)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--strategy", choices=[s.value for s in Strategy], default="canonical",
                   help="linearization for generation batches")
    p.add_argument("--scaffold", action="append", choices=[t.value for t in SCAFFOLD_TASKS],
                   help="enable a scaffold task (repeatable)")
    p.add_argument("--q", type=float, default=0.5, help="per-batch scaffold probability")
    p.add_argument("--rate", type=float, default=0.15, help="mask rate for masking scaffolds")
    p.add_argument("--epochs", type=int, default=1)
    p.add_argument("--subset", type=int, default=None, help="seeded-subset size for low-resource runs")
    p.add_argument("--batch-size", type=int, default=6)
    p.set_defaults(func=cmd_stream)

    p = sub.add_parser("eval", help="evaluation reports")
    eval_sub = p.add_subparsers(dest="metric", required=True)

    b = eval_sub.add_parser("bleu", help="corpus (or per-sentence) BLEU")
    b.add_argument("--hyp", required=True)
    b.add_argument("--ref", required=True, help="reference file, or comma-separated files")
    b.add_argument("--sentence-level", action="store_true",
                   help="emit smoothed per-sentence scores instead of corpus BLEU")
    b.add_argument("-o", "--output")
    b.set_defaults(func=cmd_eval_bleu)

    s = eval_sub.add_parser("smatch", help="graph overlap between two corpora")
    s.add_argument("--gold", required=True)
    s.add_argument("--pred", required=True)
    s.add_argument("--exact", action="store_true", help="exhaustive mapping search")
    s.add_argument("--restarts", type=int, default=4)
    s.add_argument("--seed", type=int, default=_default_seed())
    s.add_argument("--strict", action="store_true")
    s.add_argument("--allow-cycles", action="store_true")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_eval_smatch)

    r = eval_sub.add_parser("regress", help="fidelity regression on analysis rows")
    r.add_argument("--rows", required=True, help="JSONL analysis rows")
    r.add_argument("--select-bic", action="store_true", help="exhaustive BIC subset selection")
    r.add_argument("--no-filter", action="store_true", help="skip the outlier filter")
    r.add_argument("-o", "--output")
    r.set_defaults(func=cmd_eval_regress)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"graphlin: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (PenmanError, TooLarge) as exc:
        print(f"graphlin: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # invariant violations and bugs
        print(f"graphlin: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
