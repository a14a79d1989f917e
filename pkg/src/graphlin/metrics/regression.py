"""Pearson correlation, OLS with BIC subset selection, covariate assembly."""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from graphlin.graph import AmrGraph, LinearTree, edge_count, reentrancy_count

log = logging.getLogger(__name__)

# Design columns for the fidelity regression, in report order.
COVARIATE_NAMES = (
    "log_scaffold_loss",
    "log_generation_loss",
    "bleu",
    "edges",
    "reentrancies",
    "target_words",
)

ROW_FIELDS = (
    "id",
    "m_score",
    "scaffold_loss",
    "generation_loss",
    "bleu",
    "edges",
    "reentrancies",
    "target_words",
)


class DegenerateVariance(Exception):
    """An input series has zero variance."""


class RankDeficient(Exception):
    """The design matrix does not have full column rank."""


class TooFewRows(Exception):
    """Not enough observations for the number of covariates."""


class MissingField(Exception):
    """A covariate record lacks a required field."""


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    """Product-moment correlation; requires length >= 3 and nonzero variances."""
    if len(x) != len(y):
        raise ValueError("series must have equal length")
    if len(x) < 3:
        raise ValueError("need at least 3 points")
    ax = np.asarray(x, dtype=float)
    ay = np.asarray(y, dtype=float)
    dx = ax - ax.mean()
    dy = ay - ay.mean()
    vx = float(dx @ dx)
    vy = float(dy @ dy)
    if vx == 0.0 or vy == 0.0:
        raise DegenerateVariance("zero variance in input series")
    return float((dx @ dy) / math.sqrt(vx * vy))


@dataclass(frozen=True)
class RegressionResult:
    covariates: tuple[str, ...]
    coefficients: dict[str, float]   # keyed by covariate name, plus "intercept"
    standard_errors: dict[str, float]
    bic: float
    adjusted_r2: float
    n: int

    def to_dict(self) -> dict:
        return {
            "covariates": list(self.covariates),
            "coefficients": {k: self.coefficients[k] for k in sorted(self.coefficients)},
            "standard_errors": {k: self.standard_errors[k] for k in sorted(self.standard_errors)},
            "bic": self.bic,
            "adjusted_r2": self.adjusted_r2,
            "n": self.n,
        }


def ols_fit(
    X: np.ndarray, y: Sequence[float], names: Optional[Sequence[str]] = None
) -> RegressionResult:
    """Least squares with intercept via the normal equations.

    BIC uses the Gaussian-likelihood form n*ln(RSS/n) + k*ln(n) with
    k = p + 2 (coefficients, intercept, noise variance); constants shared by
    every candidate model are omitted since they cancel in comparisons.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    y = np.asarray(y, dtype=float)
    n, p = X.shape
    if names is None:
        names = tuple(f"x{i}" for i in range(p))
    names = tuple(names)
    if len(names) != p:
        raise ValueError("one name per column required")
    if n <= p + 1:
        raise TooFewRows(f"n={n} rows cannot support {p} covariates plus intercept")
    design = np.hstack([np.ones((n, 1)), X])
    if np.linalg.matrix_rank(design) < p + 1:
        raise RankDeficient("design matrix is rank deficient")

    gram = design.T @ design
    beta = np.linalg.solve(gram, design.T @ y)
    residuals = y - design @ beta
    rss = float(residuals @ residuals)

    sigma2 = rss / (n - p - 1)
    covariance = sigma2 * np.linalg.inv(gram)
    errors = np.sqrt(np.clip(np.diag(covariance), 0.0, None))

    tss = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - rss / tss if tss > 0 else 1.0
    adjusted = 1.0 - (1.0 - r2) * (n - 1) / (n - p - 1)
    k = p + 2
    bic = n * math.log(rss / n) + k * math.log(n) if rss > 0 else float("-inf")

    labels = ("intercept",) + names
    return RegressionResult(
        covariates=names,
        coefficients={label: float(b) for label, b in zip(labels, beta)},
        standard_errors={label: float(e) for label, e in zip(labels, errors)},
        bic=bic,
        adjusted_r2=adjusted,
        n=n,
    )


def _intercept_only(y: np.ndarray) -> RegressionResult:
    n = len(y)
    mean = float(y.mean())
    rss = float(np.sum((y - mean) ** 2))
    bic = n * math.log(rss / n) + 2 * math.log(n) if rss > 0 else float("-inf")
    se = math.sqrt(rss / (n - 1) / n) if n > 1 else 0.0
    return RegressionResult(
        covariates=(),
        coefficients={"intercept": mean},
        standard_errors={"intercept": se},
        bic=bic,
        adjusted_r2=0.0,
        n=n,
    )


def best_subset_bic(
    X: np.ndarray, y: Sequence[float], names: Sequence[str]
) -> RegressionResult:
    """Exhaustive subset search minimizing BIC; ties favor fewer covariates.

    Rank-deficient subsets are skipped with a log message. At most 20
    candidate covariates (2^p subsets).
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    names = tuple(names)
    p = X.shape[1] if X.ndim == 2 else (0 if X.size == 0 else 1)
    if p > 20:
        raise ValueError("exhaustive search limited to 20 candidates")
    best = _intercept_only(y)
    for size in range(1, p + 1):
        for subset in itertools.combinations(range(p), size):
            try:
                result = ols_fit(X[:, subset], y, [names[i] for i in subset])
            except (RankDeficient, TooFewRows) as exc:
                log.warning("skipping subset %s: %s", [names[i] for i in subset], exc)
                continue
            if result.bic < best.bic:
                best = result
    return best


def covariates(
    example_id: str,
    graph: AmrGraph,
    canonical: LinearTree,
    target_sentence: str,
    scaffold_loss: float,
    generation_loss: float,
    bleu: float,
    m_score: float,
) -> dict:
    """Assemble one analysis row; losses must be positive (log domain)."""
    if scaffold_loss <= 0 or generation_loss <= 0:
        raise ValueError("losses must be strictly positive")
    return {
        "id": example_id,
        "m_score": float(m_score),
        "scaffold_loss": float(scaffold_loss),
        "generation_loss": float(generation_loss),
        "bleu": float(bleu),
        "edges": edge_count(graph),
        "reentrancies": reentrancy_count(canonical),
        "target_words": len(target_sentence.split()),
    }


def validate_row(record: Mapping) -> dict:
    """Check one JSONL analysis record against the required schema."""
    missing = [f for f in ROW_FIELDS if f not in record]
    if missing:
        raise MissingField(f"record missing fields: {missing}")
    row = {f: record[f] for f in ROW_FIELDS}
    if row["scaffold_loss"] <= 0 or row["generation_loss"] <= 0:
        raise ValueError(f"row {row['id']!r}: losses must be strictly positive")
    return row


def filter_outliers(rows: Sequence[Mapping], fraction: float = 0.005) -> list[Mapping]:
    """Drop the bottom `fraction` of target lengths and m-scores and the top
    `fraction` of each loss column (ceil count per criterion)."""
    n = len(rows)
    if n == 0:
        return []
    k = math.ceil(fraction * n)
    drop: set[int] = set()

    def extremes(key: str, lowest: bool) -> list[int]:
        order = sorted(range(n), key=lambda i: (rows[i][key], i))
        return order[:k] if lowest else order[-k:]

    drop.update(extremes("target_words", lowest=True))
    drop.update(extremes("m_score", lowest=True))
    drop.update(extremes("scaffold_loss", lowest=False))
    drop.update(extremes("generation_loss", lowest=False))
    return [row for i, row in enumerate(rows) if i not in drop]


def design_matrix(rows: Sequence[Mapping]) -> tuple[np.ndarray, np.ndarray]:
    """Design columns (COVARIATE_NAMES order) and the m-score response."""
    X = np.array(
        [
            [
                math.log(row["scaffold_loss"]),
                math.log(row["generation_loss"]),
                row["bleu"] / 100.0,
                row["edges"],
                row["reentrancies"],
                row["target_words"],
            ]
            for row in rows
        ],
        dtype=float,
    )
    y = np.array([row["m_score"] for row in rows], dtype=float)
    return X, y
