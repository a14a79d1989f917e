#!/usr/bin/env python3
"""Regenerate the bundled sample data under data/sample/ (fully seeded)."""

from __future__ import annotations

import argparse
import json
import math
import random
from pathlib import Path

import numpy as np

from graphlin.penman import format_entry, join_tokens, serialize
from graphlin.synth import canonical_tree, random_graph, sentence_for

ROOT = Path(__file__).resolve().parent.parent
SAMPLE_DIR = ROOT / "data" / "sample"

CORPUS_SEED = 20177
CORPUS_SIZE = 200

RDF_SEED = 311
RDF_SIZE = 50

REGRESS_SEED = 914
REGRESS_ROWS = 500

_RDF_SUBJECTS = ("Ned", "Alan_Shepard", "Rio_Grande", "Aarhus_Airport", "Buzz_Aldrin", "Elliot_See")
_RDF_PREDICATES = ("fatherOf", "birthPlace", "cityServed", "almaMater", "operatingOrganisation", "runwayLength")
_RDF_OBJECTS = ("Rod", "Todd", "New_Jersey", "Aarhus", "MIT", "Texas", "2702.0")


def write_amr_corpus(path: Path) -> None:
    rng = random.Random(CORPUS_SEED)
    blocks = []
    for i in range(1, CORPUS_SIZE + 1):
        graph = random_graph(rng, min_vars=1, max_vars=10)
        tree = canonical_tree(graph, rng)
        snt = sentence_for(tree)
        text = join_tokens(serialize(tree))
        blocks.append(format_entry(f"sample-{i:04d}", snt, text))
    path.write_text("\n".join(blocks), encoding="utf-8")
    print(f"wrote {CORPUS_SIZE} graphs -> {path}")


def write_rdf_sample(path: Path) -> None:
    rng = random.Random(RDF_SEED)
    lines = []
    for _ in range(RDF_SIZE):
        k = rng.randint(1, 4)
        triples = [
            [rng.choice(_RDF_SUBJECTS), rng.choice(_RDF_PREDICATES), rng.choice(_RDF_OBJECTS)]
            for _ in range(k)
        ]
        refs = [" ".join(f"{s} {p} {o}".replace("_", " ").split()) for s, p, o in triples]
        lines.append(json.dumps({"triples": triples, "refs": [" and ".join(refs)], "category": "sample"}))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {RDF_SIZE} RDF entries -> {path}")


def write_regress_fixture(path: Path) -> None:
    """Rows where m_score depends only on log scaffold loss (the documented
    true subset) plus noise; the other covariates are distractors."""
    rng = np.random.default_rng(REGRESS_SEED)
    lines = []
    for i in range(REGRESS_ROWS):
        scaffold_loss = float(rng.lognormal(0.0, 0.5))
        generation_loss = float(rng.lognormal(0.2, 0.5))
        bleu = float(rng.uniform(0, 100))
        edges = int(rng.integers(1, 25))
        reentrancies = int(rng.integers(0, 6))
        target_words = int(rng.integers(4, 40))
        m_score = 0.75 - 0.20 * math.log(scaffold_loss) + float(rng.normal(0, 0.05))
        lines.append(
            json.dumps(
                {
                    "id": f"row-{i:04d}",
                    "m_score": m_score,
                    "scaffold_loss": scaffold_loss,
                    "generation_loss": generation_loss,
                    "bleu": bleu,
                    "edges": edges,
                    "reentrancies": reentrancies,
                    "target_words": target_words,
                },
                sort_keys=True,
            )
        )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {REGRESS_ROWS} regression rows -> {path}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", type=Path, default=SAMPLE_DIR)
    args = parser.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)
    write_amr_corpus(args.out_dir / "sample_corpus.amr")
    write_rdf_sample(args.out_dir / "webnlg_sample.jsonl")
    write_regress_fixture(args.out_dir / "regress_rows.jsonl")


if __name__ == "__main__":
    main()
