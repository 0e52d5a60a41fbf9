"""1-nearest-neighbor under the squared one-hot distance.

For one-hot blocks, two rows contribute 0 to the squared Euclidean distance
on features where they agree and exactly 2 where they differ, so the
distance equals twice the number of mismatching categorical codes and can
be computed on codes directly.  Ties break to the lowest training row index
(``argmin`` keeps the first minimum).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_CHUNK = 256


@dataclass(eq=False)
class OneNNModel:
    train_codes: np.ndarray
    train_labels: np.ndarray

    def predict(self, codes: np.ndarray) -> np.ndarray:
        codes = np.atleast_2d(np.asarray(codes))
        if codes.shape[1] != self.train_codes.shape[1]:
            raise ValueError(
                f"expected {self.train_codes.shape[1]} feature columns, "
                f"got {codes.shape[1]}"
            )
        out = np.empty(codes.shape[0], dtype=np.int8)
        for start in range(0, codes.shape[0], _CHUNK):
            block = codes[start:start + _CHUNK]
            mism = (block[:, None, :] != self.train_codes[None, :, :]).sum(axis=2)
            nearest = mism.argmin(axis=1)
            out[start:start + _CHUNK] = self.train_labels[nearest]
        return out


def train_1nn(train) -> OneNNModel:
    """"Training" just stores the rows; ``train`` is a Dataset."""
    return OneNNModel(train.codes.copy(), train.labels.copy())
