"""Training loop over pre-batched multi-task streams."""

from __future__ import annotations

import json
import random
from collections import defaultdict
from pathlib import Path
from typing import Sequence

import torch

from harness.config import HarnessConfig
from harness.data import Record, read_batches
from harness.model import Seq2Seq, sequence_loss
from harness.vocab import Codec, Vocab, build_vocab


def _pad(rows: list[list[int]], pad_id: int) -> torch.Tensor:
    width = max(len(r) for r in rows)
    return torch.tensor([r + [pad_id] * (width - len(r)) for r in rows], dtype=torch.long)


def encode_batch(batch: Sequence[Record], codec: Codec) -> tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
    """(src, tgt_in, tgt_out) tensors with BOS/EOS framing on the target."""
    vocab = codec.vocab
    src = _pad([codec.encode(r.input) for r in batch], vocab.pad)
    tgt = [codec.encode(r.target) for r in batch]
    tgt_in = _pad([[vocab.bos, *t] for t in tgt], vocab.pad)
    tgt_out = _pad([[*t, vocab.eos] for t in tgt], vocab.pad)
    return src, tgt_in, tgt_out


def train(config: HarnessConfig, checkpoint_path: str | Path, log_path: str | Path | None = None) -> dict:
    """Optimize cross-entropy over the stream's batches, as emitted.

    Returns a summary dict; writes the model + vocabulary to
    ``checkpoint_path`` and a per-step JSONL loss log next to it.
    """
    torch.manual_seed(config.seed)
    random.seed(config.seed)

    vocab = build_vocab([config.train_stream, *config.extra_vocab_streams])
    codec = Codec(vocab)
    model = Seq2Seq(len(vocab), config.embedding_dim, config.hidden_dim, vocab.pad)
    optimizer = torch.optim.Adam(model.parameters(), lr=config.learning_rate)

    checkpoint_path = Path(checkpoint_path)
    log_path = Path(log_path) if log_path else checkpoint_path.with_suffix(".log.jsonl")

    step = 0
    task_losses: dict[str, list[float]] = defaultdict(list)
    with open(log_path, "w", encoding="utf-8") as log:
        for sweep in range(1, config.passes + 1):
            for batch in read_batches(config.train_stream):
                src, tgt_in, tgt_out = encode_batch(batch, codec)
                logits = model(src, tgt_in)
                loss = sequence_loss(logits, tgt_out, vocab.pad)
                optimizer.zero_grad()
                loss.backward()
                optimizer.step()
                step += 1
                value = float(loss)
                task = batch[0].task
                task_losses[task].append(value)
                log.write(json.dumps({"step": step, "pass": sweep, "task": task, "loss": value}))
                log.write("\n")
                if config.log_every and step % config.log_every == 0:
                    print(f"step {step:5d}  pass {sweep}  task {task:<28s} loss {value:.4f}")

    summary = {
        "steps": step,
        "passes": config.passes,
        "vocab_size": len(vocab),
        "final_loss_by_task": {
            task: sum(values[-10:]) / len(values[-10:]) for task, values in task_losses.items()
        },
        "log": str(log_path),
    }
    torch.save(
        {
            "model_state": model.state_dict(),
            "vocab_tokens": vocab.tokens,
            "config": {
                "embedding_dim": config.embedding_dim,
                "hidden_dim": config.hidden_dim,
                "max_decode_len": config.max_decode_len,
                "seed": config.seed,
            },
            "summary": summary,
        },
        checkpoint_path,
    )
    return summary


def load_checkpoint(path: str | Path) -> tuple[Seq2Seq, Codec, dict]:
    payload = torch.load(path, map_location="cpu", weights_only=False)
    vocab = Vocab(tuple(payload["vocab_tokens"]))
    model_config = payload["config"]
    model = Seq2Seq(len(vocab), model_config["embedding_dim"], model_config["hidden_dim"], vocab.pad)
    model.load_state_dict(payload["model_state"])
    model.eval()
    return model, Codec(vocab), model_config
