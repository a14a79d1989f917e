"""Greedy decoding plus per-sentence analysis rows for `graphlin eval regress`.

Structural covariates (edges, re-entrancies, target length) come from the
toolkit's `stats --per-example` rows and per-sentence BLEU from
`graphlin eval bleu --sentence-level`; the harness contributes only its own
losses, decodes, and an overlap proxy for the fidelity score.
"""

from __future__ import annotations

import json
import subprocess
import sys
import tempfile
from collections import Counter
from pathlib import Path
from typing import Sequence

import torch

from harness.data import Record, read_records, read_structure_rows
from harness.model import Seq2Seq, sequence_loss
from harness.train import encode_batch, load_checkpoint
from harness.vocab import Codec

GRAPHLIN = [sys.executable, "-m", "graphlin"]


class EvaluationError(Exception):
    """Inputs do not line up (missing ids, schema violations)."""


def _per_sentence_loss(model: Seq2Seq, codec: Codec, record: Record) -> float:
    src, tgt_in, tgt_out = encode_batch([record], codec)
    with torch.no_grad():
        logits = model(src, tgt_in)
        return float(sequence_loss(logits, tgt_out, codec.vocab.pad))


def _decode(model: Seq2Seq, codec: Codec, record: Record, max_len: int) -> list[str]:
    src, _, _ = encode_batch([record], codec)
    ids = model.greedy_decode(src, codec.vocab.bos, codec.vocab.eos, max_len)[0]
    return codec.decode(ids)


def unigram_f1(hypothesis: Sequence[str], reference: Sequence[str]) -> float:
    """Token-overlap F1 in [0, 1]; the harness's stand-in fidelity score."""
    if not hypothesis or not reference:
        return 0.0
    overlap = sum((Counter(hypothesis) & Counter(reference)).values())
    if overlap == 0:
        return 0.0
    precision = overlap / len(hypothesis)
    recall = overlap / len(reference)
    return 2 * precision * recall / (precision + recall)


def sentence_bleu_scores(hypotheses: list[str], references: list[str]) -> list[float]:
    """Per-line smoothed BLEU via the toolkit CLI."""
    with tempfile.TemporaryDirectory() as tmp:
        hyp_path = Path(tmp) / "hyp.txt"
        ref_path = Path(tmp) / "ref.txt"
        hyp_path.write_text("\n".join(hypotheses) + "\n", encoding="utf-8")
        ref_path.write_text("\n".join(references) + "\n", encoding="utf-8")
        result = subprocess.run(
            [*GRAPHLIN, "eval", "bleu", "--hyp", str(hyp_path), "--ref", str(ref_path),
             "--sentence-level"],
            capture_output=True,
            text=True,
        )
    if result.returncode != 0:
        raise EvaluationError(f"graphlin eval bleu failed: {result.stderr.strip()}")
    return json.loads(result.stdout)["scores"]


def evaluate(
    checkpoint_path: str | Path,
    dev_pairs: str | Path,
    dev_reorder: str | Path,
    structure_rows: str | Path,
    out_rows: str | Path,
) -> dict:
    """Write analysis rows (one per dev sentence) in the regress schema.

    ``dev_pairs`` holds GenerateText records, ``dev_reorder`` the reordering
    scaffold records for the same ids (its teacher-forced loss is the
    scaffold loss), and ``structure_rows`` the per-example stats file.
    """
    model, codec, model_config = load_checkpoint(checkpoint_path)
    codec.vocab.check_covers([dev_pairs, dev_reorder])

    pairs = [r for r in read_records(dev_pairs) if r.task == "generate"]
    reorder = {r.id: r for r in read_records(dev_reorder) if r.task.startswith("reorder_")}
    structure = read_structure_rows(structure_rows)
    if not pairs:
        raise EvaluationError("no generation records in the dev stream")
    missing_reorder = [r.id for r in pairs if r.id not in reorder]
    if missing_reorder:
        raise EvaluationError(f"ids without a reordering record: {missing_reorder[:10]}")
    missing_structure = [r.id for r in pairs if r.id not in structure]
    if missing_structure:
        raise EvaluationError(f"ids without structure rows: {missing_structure[:10]}")

    decodes: list[list[str]] = []
    rows: list[dict] = []
    for record in pairs:
        generation_loss = _per_sentence_loss(model, codec, record)
        scaffold_loss = _per_sentence_loss(model, codec, reorder[record.id])
        decoded = _decode(model, codec, record, model_config["max_decode_len"])
        decodes.append(decoded)
        rows.append(
            {
                "id": record.id,
                "m_score": unigram_f1(decoded, record.target),
                "scaffold_loss": generation_loss and scaffold_loss,
                "generation_loss": generation_loss,
                "decoded": " ".join(decoded),
                "edges": structure[record.id]["edges"],
                "reentrancies": structure[record.id]["reentrancies"],
                "target_words": structure[record.id]["target_words"],
                "exact_match": list(decoded) == list(record.target),
            }
        )

    bleu = sentence_bleu_scores(
        [" ".join(d) if d else "<empty>" for d in decodes],
        [" ".join(r.target) for r in pairs],
    )
    for row, score in zip(rows, bleu):
        row["bleu"] = score

    out_rows = Path(out_rows)
    with open(out_rows, "w", encoding="utf-8") as handle:
        for row in rows:
            handle.write(json.dumps(row, sort_keys=True))
            handle.write("\n")

    return {
        "rows": len(rows),
        "exact_match": sum(r["exact_match"] for r in rows) / len(rows),
        "mean_m_score": sum(r["m_score"] for r in rows) / len(rows),
        "mean_generation_loss": sum(r["generation_loss"] for r in rows) / len(rows),
        "mean_scaffold_loss": sum(r["scaffold_loss"] for r in rows) / len(rows),
        "out": str(out_rows),
    }
