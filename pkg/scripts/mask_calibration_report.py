#!/usr/bin/env python3
"""Measure realized mask rates per strategy on a corpus (calibration check)."""

from __future__ import annotations

import argparse
import json
from pathlib import Path

from graphlin.corruption import MaskStrategy, Target, mask
from graphlin.penman import serialize, simplify
from graphlin.seeding import derive_rng
from graphlin.stream import load_corpus

ROOT = Path(__file__).resolve().parent.parent


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("corpus", nargs="?", default=ROOT / "data" / "sample" / "sample_corpus.amr")
    parser.add_argument("--rate", type=float, default=0.15)
    parser.add_argument("--min-tokens", type=int, default=100_000)
    parser.add_argument("--seed", type=int, default=4)
    args = parser.parse_args()

    examples, failures = load_corpus(args.corpus)
    sequences = [simplify(serialize(e.canonical)) for e in examples]
    sentences = [e.sentence_tokens() for e in examples if e.snt]
    report = {"corpus": str(args.corpus), "examples": len(examples), "parse_failures": len(failures)}

    for target, seqs in (
        (Target.ALL_GRAPH_TOKENS, sequences),
        (Target.COMPONENTS_ONLY, sequences),
        (Target.NODES_ONLY, sequences),
        (Target.SENTENCE_TOKENS, sentences),
    ):
        masked = total = 0
        epoch = 0
        while total < args.min_tokens:
            epoch += 1
            for i, seq in enumerate(seqs):
                pair = mask(seq, MaskStrategy(target, args.rate), derive_rng(args.seed, target.value, epoch, i))
                masked += sum(1 for a, b in zip(pair.input, pair.target) if a != b)
                total += len(seq)
        report[target.value] = {
            "tokens": total,
            "masked": masked,
            "realized_rate": round(masked / total, 5),
            "epochs": epoch,
        }

    print(json.dumps(report, indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
