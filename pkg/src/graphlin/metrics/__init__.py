"""Evaluation and analysis: BLEU, graph overlap, correlation, regression."""

from graphlin.metrics.bleu import BleuReport, corpus_bleu, sentence_bleu, tokenize_13a
from graphlin.metrics.regression import (
    COVARIATE_NAMES,
    RegressionResult,
    best_subset_bic,
    covariates,
    design_matrix,
    filter_outliers,
    ols_fit,
    pearson,
    validate_row,
)
from graphlin.metrics.smatch import SmatchResult, smatch, smatch_exact

__all__ = [
    "BleuReport",
    "COVARIATE_NAMES",
    "RegressionResult",
    "SmatchResult",
    "best_subset_bic",
    "corpus_bleu",
    "covariates",
    "design_matrix",
    "filter_outliers",
    "ols_fit",
    "pearson",
    "sentence_bleu",
    "smatch",
    "smatch_exact",
    "tokenize_13a",
    "validate_row",
]
