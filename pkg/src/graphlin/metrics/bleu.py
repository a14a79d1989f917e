"""Corpus and sentence BLEU with mteval-13a-style tokenization."""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

MAX_ORDER = 4

_13A_RULES = (
    (re.compile(r"([\{-\~\[-\` -\&\(-\+\:-\@\/])"), r" \1 "),  # punctuation
    (re.compile(r"([^0-9])([\.,])"), r"\1 \2 "),               # . , after non-digit
    (re.compile(r"([\.,])([^0-9])"), r" \1 \2"),               # . , before non-digit
    (re.compile(r"([0-9])(-)"), r"\1 \2 "),                    # dash after digit
)


class LengthMismatch(Exception):
    """Hypothesis and reference lists have different lengths."""


class Empty(Exception):
    """No hypotheses to score."""


def tokenize_13a(line: str) -> list[str]:
    """Tokenizer compatible with the WMT mteval-v13a script."""
    norm = line.replace("<skipped>", "").replace("-\n", "").replace("\n", " ")
    if "&" in norm:
        norm = (
            norm.replace("&quot;", '"')
            .replace("&amp;", "&")
            .replace("&lt;", "<")
            .replace("&gt;", ">")
        )
    for pattern, replacement in _13A_RULES:
        norm = pattern.sub(replacement, norm)
    return norm.split()


@dataclass(frozen=True)
class BleuReport:
    score: float
    precisions: tuple[float, float, float, float]
    brevity_penalty: float
    hypothesis_length: int
    reference_length: int
    signature: str

    def to_dict(self) -> dict:
        return {
            "score": self.score,
            "precisions": list(self.precisions),
            "brevity_penalty": self.brevity_penalty,
            "hypothesis_length": self.hypothesis_length,
            "reference_length": self.reference_length,
            "signature": self.signature,
        }


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def _closest_ref_length(hyp_len: int, ref_lens: Sequence[int]) -> int:
    # Ties break toward the shorter reference.
    return min(ref_lens, key=lambda r: (abs(r - hyp_len), r))


def _accumulate(
    hypotheses: Sequence[str], references: Sequence[Sequence[str]]
) -> tuple[list[int], list[int], int, int]:
    if len(hypotheses) == 0:
        raise Empty("no hypotheses")
    if len(hypotheses) != len(references):
        raise LengthMismatch(f"{len(hypotheses)} hypotheses vs {len(references)} reference sets")
    matches = [0] * MAX_ORDER
    totals = [0] * MAX_ORDER
    hyp_len = 0
    ref_len = 0
    for hyp, refs in zip(hypotheses, references):
        if not refs:
            raise LengthMismatch("every hypothesis needs at least one reference")
        hyp_tokens = tokenize_13a(hyp)
        ref_token_lists = [tokenize_13a(r) for r in refs]
        hyp_len += len(hyp_tokens)
        ref_len += _closest_ref_length(len(hyp_tokens), [len(r) for r in ref_token_lists])
        for n in range(1, MAX_ORDER + 1):
            hyp_counts = _ngrams(hyp_tokens, n)
            if not hyp_counts:
                continue
            clipped: Counter = Counter()
            for ref_tokens in ref_token_lists:
                ref_counts = _ngrams(ref_tokens, n)
                for gram, count in ref_counts.items():
                    if count > clipped[gram]:
                        clipped[gram] = count
            matches[n - 1] += sum(min(count, clipped[gram]) for gram, count in hyp_counts.items())
            totals[n - 1] += sum(hyp_counts.values())
    return matches, totals, hyp_len, ref_len


def _score(matches, totals, hyp_len, ref_len, smooth_add: int, signature: str) -> BleuReport:
    precisions = []
    for m, t in zip(matches, totals):
        num = m + smooth_add
        den = t + smooth_add
        precisions.append(num / den if den > 0 else 0.0)
    if hyp_len == 0:
        bp = 0.0
    elif hyp_len > ref_len:
        bp = 1.0
    else:
        bp = math.exp(1.0 - ref_len / hyp_len)
    if any(p == 0.0 for p in precisions):
        score = 0.0
    else:
        score = bp * math.exp(sum(math.log(p) for p in precisions) / MAX_ORDER) * 100.0
    return BleuReport(
        score=score,
        precisions=tuple(precisions),
        brevity_penalty=bp,
        hypothesis_length=hyp_len,
        reference_length=ref_len,
        signature=signature,
    )


def corpus_bleu(hypotheses: Sequence[str], references: Sequence[Sequence[str]]) -> BleuReport:
    """Case-sensitive 4-gram BLEU, 13a tokenization, no smoothing.

    N-gram counts are clipped against the maximum count over all references;
    the brevity penalty uses the closest reference length per sentence.
    """
    matches, totals, hyp_len, ref_len = _accumulate(hypotheses, references)
    return _score(
        matches, totals, hyp_len, ref_len, smooth_add=0,
        signature="bleu|n:4|tok:13a|case:mixed|smooth:none",
    )


def sentence_bleu(hypothesis: str, references: Sequence[str]) -> float:
    """Single-sentence BLEU with add-one smoothing at every n-gram order.

    Smoothing all orders keeps the score positive even for fully disjoint
    pairs; intended as a regression covariate, not a corpus metric.
    """
    matches, totals, hyp_len, ref_len = _accumulate([hypothesis], [list(references)])
    report = _score(
        matches, totals, hyp_len, ref_len, smooth_add=1,
        signature="bleu|n:4|tok:13a|case:mixed|smooth:add-1(all-orders)",
    )
    return report.score
