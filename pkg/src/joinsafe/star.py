"""Star-schema data model, key-foreign-key join, feature views, and splits.

A :class:`StarSchema` is one fact table plus ``q`` dimension tables, each
bound by exactly one foreign-key column.  All feature columns are dense
integer codes into :class:`~joinsafe.domains.CategoricalDomain` objects.
Foreign-key codes double as row indices into the bound dimension table, so
materializing the join is a gather.  Everything is immutable after
construction and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .domains import CategoricalDomain
from .errors import ReferentialIntegrityError, SchemaError
from .util import rng_from


def tuple_ratio(fact_rows: int, dim_rows: int) -> float:
    """Training examples per distinct foreign-key value, ``fact_rows / dim_rows``."""
    if dim_rows < 1:
        raise ValueError("dimension table must have at least one row")
    if fact_rows < 0:
        raise ValueError("fact row count cannot be negative")
    return fact_rows / dim_rows


def _as_codes(arr) -> np.ndarray:
    out = np.asarray(arr, dtype=np.int32)
    if out.ndim != 1:
        raise SchemaError("feature columns must be one-dimensional")
    return out


def _check_column(codes: np.ndarray, domain: CategoricalDomain, where: str) -> None:
    if codes.size and (codes.min() < 0 or codes.max() >= domain.size):
        raise SchemaError(f"{where}: code outside domain {domain.name!r} (size {domain.size})")


@dataclass(frozen=True, eq=False)
class FactTable:
    """Labeled examples: target, home features, and foreign-key columns."""

    row_ids: np.ndarray
    target: np.ndarray
    home_features: tuple[np.ndarray, ...]
    home_domains: tuple[CategoricalDomain, ...]
    fk_columns: tuple[np.ndarray, ...]
    fk_domains: tuple[CategoricalDomain, ...]

    def __post_init__(self):
        object.__setattr__(self, "row_ids", np.asarray(self.row_ids, dtype=np.int64))
        object.__setattr__(self, "target", np.asarray(self.target, dtype=np.int8))
        object.__setattr__(self, "home_features", tuple(_as_codes(c) for c in self.home_features))
        object.__setattr__(self, "fk_columns", tuple(_as_codes(c) for c in self.fk_columns))
        object.__setattr__(self, "home_domains", tuple(self.home_domains))
        object.__setattr__(self, "fk_domains", tuple(self.fk_domains))
        n = len(self.row_ids)
        if self.target.shape != (n,):
            raise SchemaError("target length differs from row count")
        if self.target.size and not np.isin(self.target, (0, 1)).all():
            raise SchemaError("target values must be 0 or 1")
        if len(self.home_features) != len(self.home_domains):
            raise SchemaError("home feature columns and domains differ in count")
        if len(self.fk_columns) != len(self.fk_domains):
            raise SchemaError("fk columns and domains differ in count")
        for col, dom in zip(self.home_features, self.home_domains):
            if col.shape != (n,):
                raise SchemaError(f"column {dom.name!r} length differs from row count")
            _check_column(col, dom, "fact table")
        for col, dom in zip(self.fk_columns, self.fk_domains):
            if col.shape != (n,):
                raise SchemaError(f"column {dom.name!r} length differs from row count")
            _check_column(col, dom, "fact table")

    @property
    def n_rows(self) -> int:
        return len(self.row_ids)

    @property
    def d_s(self) -> int:
        return len(self.home_features)

    @property
    def q(self) -> int:
        return len(self.fk_columns)

    def take(self, indices: np.ndarray) -> "FactTable":
        idx = np.asarray(indices)
        return FactTable(
            self.row_ids[idx],
            self.target[idx],
            tuple(c[idx] for c in self.home_features),
            self.home_domains,
            tuple(c[idx] for c in self.fk_columns),
            self.fk_domains,
        )


@dataclass(frozen=True, eq=False)
class DimensionTable:
    """One row per primary-key value, plus the foreign feature columns."""

    rid_domain: CategoricalDomain
    features: tuple[np.ndarray, ...]
    feature_domains: tuple[CategoricalDomain, ...]
    open_domain: bool = False

    def __post_init__(self):
        object.__setattr__(self, "features", tuple(_as_codes(c) for c in self.features))
        object.__setattr__(self, "feature_domains", tuple(self.feature_domains))
        if self.rid_domain.has_others:
            raise SchemaError("a dimension primary key cannot reserve an Others slot")
        if len(self.features) != len(self.feature_domains):
            raise SchemaError("dimension feature columns and domains differ in count")
        n = self.rid_domain.size
        for col, dom in zip(self.features, self.feature_domains):
            if col.shape != (n,):
                raise SchemaError(
                    f"dimension {self.rid_domain.name!r}: column {dom.name!r} "
                    f"length {col.shape[0]} != {n} rows"
                )
            _check_column(col, dom, f"dimension {self.rid_domain.name!r}")

    @property
    def n_rows(self) -> int:
        return self.rid_domain.size

    @property
    def d_r(self) -> int:
        return len(self.features)


@dataclass(frozen=True, eq=False)
class StarSchema:
    """Fact table plus dimensions; ``fk_bindings[j]`` is FK j's dimension index."""

    fact: FactTable
    dims: tuple[DimensionTable, ...]
    fk_bindings: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(self.dims))
        object.__setattr__(self, "fk_bindings", tuple(self.fk_bindings))
        if len(self.fk_bindings) != self.fact.q:
            raise SchemaError("one binding required per foreign-key column")
        if sorted(self.fk_bindings) != list(range(len(self.dims))):
            raise SchemaError("fk bindings must map one FK onto each dimension")
        for j, dim_idx in enumerate(self.fk_bindings):
            dim = self.dims[dim_idx]
            fk_dom = self.fact.fk_domains[j]
            expected = dim.rid_domain.values
            if fk_dom.values[: len(expected)] != expected or fk_dom.size > len(expected) + 1:
                raise SchemaError(
                    f"FK domain {fk_dom.name!r} must list dimension "
                    f"{dim.rid_domain.name!r} keys (optionally plus Others)"
                )
            codes = self.fact.fk_columns[j]
            if codes.size and codes.max() >= dim.n_rows:
                bad = int(codes[codes >= dim.n_rows][0])
                raise ReferentialIntegrityError(
                    f"FK column {fk_dom.name!r}: value {fk_dom.values[bad]!r} "
                    f"has no row in dimension {dim.rid_domain.name!r}"
                )

    @property
    def n_rows(self) -> int:
        return self.fact.n_rows

    @property
    def q(self) -> int:
        return self.fact.q

    def dim_for_fk(self, j: int) -> DimensionTable:
        return self.dims[self.fk_bindings[j]]

    def take(self, indices: np.ndarray) -> "StarSchema":
        """A new star over the selected fact rows; dimensions are shared."""
        return StarSchema(self.fact.take(indices), self.dims, self.fk_bindings)


class ViewMode(Enum):
    JOIN_ALL = "JoinAll"
    NO_JOIN = "NoJoin"
    NO_FK = "NoFK"
    CUSTOM = "Custom"


@dataclass(frozen=True)
class FeatureView:
    """Which feature groups reach the learner.

    JoinAll keeps home features, foreign keys, and foreign features; NoJoin
    drops all foreign features a priori; NoFK drops the foreign keys instead;
    Custom keeps all foreign keys but drops the foreign features of the
    listed dimensions (0-based indices).
    """

    mode: ViewMode
    dropped_dims: frozenset[int] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "dropped_dims", frozenset(self.dropped_dims))
        if self.mode is not ViewMode.CUSTOM and self.dropped_dims:
            raise SchemaError("dropped_dims is only meaningful for Custom views")

    @classmethod
    def parse(cls, name: str) -> "FeatureView":
        for mode in ViewMode:
            if mode.value == name:
                return cls(mode)
        raise SchemaError(f"unknown feature view {name!r}")

    def includes_fk(self) -> bool:
        return self.mode is not ViewMode.NO_FK

    def includes_dim(self, j: int) -> bool:
        if self.mode is ViewMode.NO_JOIN:
            return False
        if self.mode is ViewMode.CUSTOM:
            return j not in self.dropped_dims
        return True


JOIN_ALL = FeatureView(ViewMode.JOIN_ALL)
NO_JOIN = FeatureView(ViewMode.NO_JOIN)
NO_FK = FeatureView(ViewMode.NO_FK)


@dataclass(frozen=True, eq=False)
class Dataset:
    """A flat, learner-ready table: coded feature columns plus binary labels."""

    domains: tuple[CategoricalDomain, ...]
    codes: np.ndarray
    labels: np.ndarray
    row_ids: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "domains", tuple(self.domains))
        codes = np.asarray(self.codes, dtype=np.int32)
        if codes.ndim != 2:
            raise SchemaError("codes must be a 2-d matrix")
        object.__setattr__(self, "codes", codes)
        object.__setattr__(self, "labels", np.asarray(self.labels, dtype=np.int8))
        if codes.shape[1] != len(self.domains):
            raise SchemaError("one domain required per code column")
        if self.labels.shape != (codes.shape[0],):
            raise SchemaError("labels length differs from row count")
        names = [d.name for d in self.domains]
        if len(set(names)) != len(names):
            raise SchemaError("feature names must be unique within a dataset")

    @property
    def n_rows(self) -> int:
        return self.codes.shape[0]

    @property
    def width(self) -> int:
        return self.codes.shape[1]

    @property
    def feature_names(self) -> tuple[str, ...]:
        return tuple(d.name for d in self.domains)

    @property
    def domain_sizes(self) -> tuple[int, ...]:
        return tuple(d.size for d in self.domains)

    def column(self, name: str) -> np.ndarray:
        return self.codes[:, self.feature_names.index(name)]

    def take(self, indices: np.ndarray) -> "Dataset":
        idx = np.asarray(indices)
        ids = None if self.row_ids is None else self.row_ids[idx]
        return Dataset(self.domains, self.codes[idx], self.labels[idx], ids)

    def replace_column(self, name: str, codes: np.ndarray,
                       domain: CategoricalDomain | None = None) -> "Dataset":
        """A copy with one column (and optionally its domain) swapped out."""
        i = self.feature_names.index(name)
        new_codes = self.codes.copy()
        new_codes[:, i] = np.asarray(codes, dtype=np.int32)
        domains = list(self.domains)
        if domain is not None:
            domains[i] = domain
        return Dataset(tuple(domains), new_codes, self.labels, self.row_ids)


def _gather_dim_column(star: StarSchema, j: int, feature_idx: int) -> np.ndarray:
    dim = star.dim_for_fk(j)
    codes = star.fact.fk_columns[j]
    if codes.size and codes.max() >= dim.n_rows:
        bad = int(codes[codes >= dim.n_rows][0])
        fk_dom = star.fact.fk_domains[j]
        raise ReferentialIntegrityError(
            f"FK column {fk_dom.name!r}: value {fk_dom.values[bad]!r} "
            f"has no row in dimension {dim.rid_domain.name!r}"
        )
    return dim.features[feature_idx][codes]


def apply_feature_view(star: StarSchema, view: FeatureView) -> Dataset:
    """Project the star onto the columns selected by ``view``.

    Column order is home features, then foreign keys, then the foreign
    features of each kept dimension.  NoJoin never touches dimension feature
    columns, so it works even when they are absent (``d_r = 0``).
    """
    if view.mode is ViewMode.CUSTOM and not view.dropped_dims <= set(range(star.q)):
        raise SchemaError(
            f"dropped_dims {sorted(view.dropped_dims)} out of range for q={star.q}"
        )
    columns: list[np.ndarray] = list(star.fact.home_features)
    domains: list[CategoricalDomain] = list(star.fact.home_domains)
    if view.includes_fk():
        columns.extend(star.fact.fk_columns)
        domains.extend(star.fact.fk_domains)
    for j in range(star.q):
        if not view.includes_dim(j):
            continue
        dim = star.dim_for_fk(j)
        for f in range(dim.d_r):
            columns.append(_gather_dim_column(star, j, f))
            domains.append(dim.feature_domains[f])
    if columns:
        codes = np.column_stack(columns).astype(np.int32)
    else:
        codes = np.empty((star.n_rows, 0), dtype=np.int32)
    return Dataset(tuple(domains), codes, star.fact.target, star.fact.row_ids)


def materialize_join(star: StarSchema) -> Dataset:
    """The projected equi-join output: home features, FKs, and all foreign features.

    The join is key-foreign-key and never selective, so the output has
    exactly as many rows as the fact table and each FK functionally
    determines its foreign feature block.
    """
    return apply_feature_view(star, JOIN_ALL)


def three_way_sizes(n: int) -> tuple[int, int, int]:
    train = n // 2
    validation = n // 4
    return train, validation, n - train - validation


def split_three_way(data, seed: int):
    """Disjoint, exhaustive train/validation/test split of any row container.

    ``data`` needs only ``n_rows`` and ``take``; works for :class:`Dataset`,
    :class:`FactTable`, and :class:`StarSchema`.  Sizes are floor(n/2),
    floor(n/4), and the remainder; the permutation depends only on ``seed``.
    """
    n = data.n_rows
    if n < 4:
        raise ValueError(f"need at least 4 rows to split, got {n}")
    perm = rng_from(seed, "three-way-split").permutation(n)
    n_train, n_val, _ = three_way_sizes(n)
    return (
        data.take(perm[:n_train]),
        data.take(perm[n_train:n_train + n_val]),
        data.take(perm[n_train + n_val:]),
    )
