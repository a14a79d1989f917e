"""Run configuration for the toy trainer."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path


@dataclass
class HarnessConfig:
    """Everything a training run needs; sizes are toy-scale by design.

    ``train_stream`` is a batched JSONL stream produced by `graphlin stream`
    (batch boundaries are consecutive groups of ``batch_size`` records, read
    from the stream manifest). ``extra_vocab_streams`` lets dev/eval files
    contribute to the vocabulary so evaluation never sees unknown tokens.
    """

    train_stream: Path
    extra_vocab_streams: tuple[Path, ...] = ()
    passes: int = 1
    learning_rate: float = 1e-3
    seed: int = 0
    embedding_dim: int = 64
    hidden_dim: int = 128
    max_decode_len: int = 80
    log_every: int = 25

    def __post_init__(self):
        self.train_stream = Path(self.train_stream)
        self.extra_vocab_streams = tuple(Path(p) for p in self.extra_vocab_streams)
        if self.passes < 1:
            raise ValueError("passes must be >= 1")
