"""One-hot encoding of coded datasets.

Column layout is deterministic: features in dataset order, values in domain
order, one indicator column per (feature, value) pair.  Two datasets built
over the same domains therefore encode into the same column space, which is
what lets a model trained on one split score another.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EncodingError
from .star import Dataset


@dataclass(frozen=True, eq=False)
class EncodedMatrix:
    """Dense one-hot matrix with labels and a (feature, value) -> column map."""

    matrix: np.ndarray
    labels: np.ndarray
    column_index: dict[tuple[str, str], int]
    feature_slices: tuple[slice, ...]

    @property
    def n_rows(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_columns(self) -> int:
        return self.matrix.shape[1]


def one_hot_encode(dataset: Dataset) -> EncodedMatrix:
    """Encode every column of ``dataset`` against its declared domain.

    Raises :class:`EncodingError` on out-of-domain codes; callers must recode
    unknown values (e.g. into Others) first.
    """
    n = dataset.n_rows
    sizes = dataset.domain_sizes
    offsets = np.concatenate(([0], np.cumsum(sizes)))
    total = int(offsets[-1])
    matrix = np.zeros((n, total), dtype=np.float64)
    for f, domain in enumerate(dataset.domains):
        col = dataset.codes[:, f]
        if col.size and (col.min() < 0 or col.max() >= domain.size):
            raise EncodingError(
                f"column {domain.name!r}: code outside domain of size {domain.size}"
            )
        matrix[np.arange(n), offsets[f] + col] = 1.0
    column_index = {
        (domain.name, value): int(offsets[f] + v)
        for f, domain in enumerate(dataset.domains)
        for v, value in enumerate(domain.values)
    }
    slices = tuple(slice(int(offsets[f]), int(offsets[f + 1])) for f in range(len(sizes)))
    return EncodedMatrix(matrix, dataset.labels, column_index, slices)
