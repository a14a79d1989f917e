"""Token vocabulary built from stream files."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from harness.data import read_records

PAD, BOS, EOS = "<pad>", "<bos>", "<eos>"


class VocabMismatch(Exception):
    """A stream contains tokens unknown to the checkpoint vocabulary."""


@dataclass(frozen=True)
class Vocab:
    tokens: tuple[str, ...]

    @property
    def pad(self) -> int:
        return 0

    @property
    def bos(self) -> int:
        return 1

    @property
    def eos(self) -> int:
        return 2

    def __len__(self) -> int:
        return len(self.tokens)

    def index(self) -> dict[str, int]:
        return {tok: i for i, tok in enumerate(self.tokens)}

    def check_covers(self, streams: Iterable[str | Path]) -> None:
        """Abort with a diff if any stream token is out of vocabulary."""
        known = set(self.tokens)
        missing: set[str] = set()
        for path in streams:
            for record in read_records(path):
                missing.update(tok for tok in (*record.input, *record.target) if tok not in known)
        if missing:
            shown = ", ".join(sorted(missing)[:20])
            raise VocabMismatch(
                f"{len(missing)} stream tokens missing from the checkpoint vocabulary: {shown}"
            )


def build_vocab(streams: Sequence[str | Path]) -> Vocab:
    seen: set[str] = set()
    for path in streams:
        for record in read_records(path):
            seen.update(record.input)
            seen.update(record.target)
    return Vocab((PAD, BOS, EOS, *sorted(seen)))


class Codec:
    """Token <-> id translation with BOS/EOS framing and padding."""

    def __init__(self, vocab: Vocab):
        self.vocab = vocab
        self._index = vocab.index()

    def encode(self, tokens: Sequence[str]) -> list[int]:
        try:
            return [self._index[tok] for tok in tokens]
        except KeyError as exc:
            raise VocabMismatch(f"token {exc} not in vocabulary") from exc

    def decode(self, ids: Iterable[int]) -> list[str]:
        out = []
        for i in ids:
            if i == self.vocab.eos:
                break
            if i not in (self.vocab.pad, self.vocab.bos):
                out.append(self.vocab.tokens[i])
        return out
