"""Categorical Naive Bayes with add-one (Laplace) smoothing."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateModelError
from ..star import Dataset


@dataclass(eq=False)
class NBModel:
    class_priors: np.ndarray        # (2,)
    cond_tables: tuple[np.ndarray, ...]  # per feature, (2, domain_size), rows sum to 1
    domain_sizes: tuple[int, ...]

    def posterior(self, codes: np.ndarray) -> np.ndarray:
        """Normalized P(Y | x) for each row, shape (n, 2)."""
        codes = np.atleast_2d(np.asarray(codes))
        if codes.shape[1] != len(self.cond_tables):
            raise ValueError(
                f"expected {len(self.cond_tables)} feature columns, got {codes.shape[1]}"
            )
        log_post = np.tile(np.log(self.class_priors), (codes.shape[0], 1))
        for f, table in enumerate(self.cond_tables):
            log_post += np.log(table[:, codes[:, f]]).T
        log_post -= log_post.max(axis=1, keepdims=True)
        post = np.exp(log_post)
        return post / post.sum(axis=1, keepdims=True)

    def predict(self, codes: np.ndarray) -> np.ndarray:
        post = self.posterior(codes)
        return (post[:, 1] > post[:, 0]).astype(np.int8)  # tie -> 0


def train_nb(train: Dataset) -> NBModel:
    """Class priors are empirical; each conditional cell gets a pseudocount of 1."""
    labels = train.labels
    n1 = int(labels.sum())
    n0 = len(labels) - n1
    if n0 == 0 or n1 == 0:
        raise DegenerateModelError("both classes are required to train Naive Bayes")
    priors = np.array([n0, n1], dtype=np.float64) / len(labels)
    tables = []
    for f, domain in enumerate(train.domains):
        col = train.codes[:, f]
        size = domain.size
        counts = np.stack([
            np.bincount(col[labels == 0], minlength=size),
            np.bincount(col[labels == 1], minlength=size),
        ]).astype(np.float64)
        counts += 1.0
        tables.append(counts / counts.sum(axis=1, keepdims=True))
    return NBModel(priors, tuple(tables), train.domain_sizes)
