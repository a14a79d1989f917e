"""Denoising corruptions: token masking calibrated to a global rate."""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from graphlin.penman import MASK_TOKEN


class TokenClass(Enum):
    COMPONENT = "component"  # role labels and parentheses
    NODE = "node"            # concepts and constants
    SENTENCE = "sentence"


class Target(Enum):
    ALL_GRAPH_TOKENS = "all"
    COMPONENTS_ONLY = "components"
    NODES_ONLY = "nodes"
    SENTENCE_TOKENS = "sentence"


@dataclass(frozen=True)
class MaskStrategy:
    target_class: Target
    global_rate: float = 0.15
    mask_token: str = MASK_TOKEN

    def __post_init__(self):
        if not 0 < self.global_rate < 1:
            raise ValueError("global_rate must be strictly between 0 and 1")


@dataclass(frozen=True)
class CorruptionPair:
    input: tuple[str, ...]
    target: tuple[str, ...]


class EmptyClass(Exception):
    """The selected target class has no tokens in this sequence."""


def classify_tokens(seq: Sequence[str], sentence: bool = False) -> list[TokenClass]:
    """Label each token of a simplified graph linearization (or a sentence)."""
    if sentence:
        return [TokenClass.SENTENCE] * len(seq)
    return [
        TokenClass.COMPONENT if tok in ("(", ")") or tok.startswith(":") else TokenClass.NODE
        for tok in seq
    ]


def _class_positions(seq: Sequence[str], target: Target) -> list[int]:
    if target is Target.ALL_GRAPH_TOKENS or target is Target.SENTENCE_TOKENS:
        return list(range(len(seq)))
    labels = classify_tokens(seq)
    wanted = TokenClass.COMPONENT if target is Target.COMPONENTS_ONLY else TokenClass.NODE
    return [i for i, label in enumerate(labels) if label is wanted]


def mask_probability(seq_len: int, class_size: int, global_rate: float) -> float:
    """Per-token probability making the expected masked share of ALL tokens
    equal to the global rate (capped at 1 when the class is too small)."""
    return min(1.0, global_rate * seq_len / class_size)


def mask(seq: Sequence[str], strategy: MaskStrategy, rng: random.Random) -> CorruptionPair:
    """Independently replace each in-class token with the mask token.

    The pair keeps its length: one mask token per masked position, target is
    the untouched original.
    """
    if not seq:
        raise EmptyClass("cannot mask an empty sequence")
    positions = _class_positions(seq, strategy.target_class)
    if not positions:
        raise EmptyClass(f"no tokens of class {strategy.target_class.value!r} in sequence")
    p = mask_probability(len(seq), len(positions), strategy.global_rate)
    corrupted = list(seq)
    for i in positions:
        if rng.random() < p:
            corrupted[i] = strategy.mask_token
    return CorruptionPair(tuple(corrupted), tuple(seq))


def sentence_mlm(
    sentence_tokens: Sequence[str],
    rng: random.Random,
    global_rate: float = 0.15,
    mask_token: str = MASK_TOKEN,
) -> CorruptionPair:
    """Surface-sentence masking; token substitution, never span replacement."""
    strategy = MaskStrategy(Target.SENTENCE_TOKENS, global_rate, mask_token)
    return mask(sentence_tokens, strategy, rng)
