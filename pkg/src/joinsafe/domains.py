"""Categorical domains and the reserved "Others" slot.

Every feature column in the package is a dense integer code vector; a
:class:`CategoricalDomain` maps codes back to value labels.  Foreign-key
domains ingested from files carry a trailing ``"Others"`` slot so that
values never seen before can be recoded into it instead of crashing a
trained model.  Synthetic domains are closed worlds and omit the slot.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

import numpy as np

from .errors import SchemaError

OTHERS_LABEL = "Others"


@dataclass(frozen=True)
class CategoricalDomain:
    """An ordered set of distinct value labels for one categorical feature."""

    name: str
    values: tuple[str, ...]
    has_others: bool = False

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(str(v) for v in self.values))
        if not self.values:
            raise SchemaError(f"domain {self.name!r} must have at least one value")
        if len(set(self.values)) != len(self.values):
            raise SchemaError(f"domain {self.name!r} has duplicate values")
        if self.has_others:
            if self.values.count(OTHERS_LABEL) != 1 or self.values[-1] != OTHERS_LABEL:
                raise SchemaError(
                    f"domain {self.name!r}: {OTHERS_LABEL!r} must appear exactly once, last"
                )

    @property
    def size(self) -> int:
        return len(self.values)

    @property
    def others_code(self) -> int:
        if not self.has_others:
            raise SchemaError(f"domain {self.name!r} has no {OTHERS_LABEL!r} slot")
        return len(self.values) - 1

    @cached_property
    def _index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.values)}

    def code_of(self, label: str) -> int:
        return self._index[label]

    def codes_for(self, labels: Iterable[str]) -> np.ndarray:
        """Codes for known labels; unknown labels map to Others when available."""
        index = self._index
        if self.has_others:
            others = self.others_code
            return np.fromiter(
                (index.get(v, others) for v in labels), dtype=np.int32
            )
        try:
            return np.fromiter((index[v] for v in labels), dtype=np.int32)
        except KeyError as exc:
            raise SchemaError(
                f"value {exc.args[0]!r} not in domain {self.name!r}"
            ) from None

    def with_others(self) -> "CategoricalDomain":
        if self.has_others:
            return self
        if OTHERS_LABEL in self.values:
            raise SchemaError(
                f"domain {self.name!r} already contains the literal {OTHERS_LABEL!r}"
            )
        return CategoricalDomain(self.name, self.values + (OTHERS_LABEL,), True)


def binary_domain(name: str) -> CategoricalDomain:
    return CategoricalDomain(name, ("0", "1"))


def index_domain(name: str, size: int, has_others: bool = False) -> CategoricalDomain:
    """A domain whose labels are just "0".."size-1" (synthetic data)."""
    values = tuple(str(i) for i in range(size))
    if has_others:
        return CategoricalDomain(name, values + (OTHERS_LABEL,), True)
    return CategoricalDomain(name, values)


def recode_to_others(column: np.ndarray, known: CategoricalDomain) -> np.ndarray:
    """Replace every code that is not a valid code of ``known`` by its Others code.

    Total function: codes already in the domain (including the Others code
    itself) pass through unchanged.
    """
    code = known.others_code  # raises if the domain has no Others slot
    col = np.asarray(column)
    return np.where((col >= 0) & (col < known.size), col, code).astype(col.dtype)
