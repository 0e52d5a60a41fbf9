"""Star-schema ingestion from CSV files via a YAML manifest.

Manifest keys::

    fact: fact.csv                  # path, relative to the manifest
    target: rating                  # target column in the fact file
    threshold: 3                    # optional; binarizes an ordinal target
    fks: [user_id, business_id]     # FK columns, one per dimension, in order
    dimensions:
      - file: users.csv
        key: user_id                # primary-key column in the dimension file
        open_domain: false          # optional; FK unusable as a feature
    domains:                        # optional extra value declarations
      gender: [F, M]

All feature columns are treated as categorical strings; domains are the
union of declared values and the values present in the data.  Foreign-key
domains receive a trailing Others slot so deployment-time unknowns can be
recoded instead of crashing.  A fact FK value with no dimension row is a
referential-integrity error (the Others slot is for future data, not a
cover for broken references).

Ordinal targets are binarized as ``label = value >= threshold``; a target
that is not already 0/1 requires a threshold.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np
import yaml

from .domains import CategoricalDomain
from .errors import ConfigError, ReferentialIntegrityError
from .star import DimensionTable, FactTable, StarSchema


def _read_csv(path: Path) -> tuple[list[str], list[list[str]]]:
    if not path.exists():
        raise ConfigError(f"data file not found: {path}")
    with open(path, encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise ConfigError(f"{path} is empty") from None
        rows = [row for row in reader if row]
    for i, row in enumerate(rows):
        if len(row) != len(header):
            raise ConfigError(f"{path}: row {i + 2} has {len(row)} fields, expected {len(header)}")
    return header, rows


def _column(header, rows, name, path) -> list[str]:
    try:
        i = header.index(name)
    except ValueError:
        raise ConfigError(f"{path}: no column named {name!r}") from None
    return [row[i] for row in rows]


def _feature_domain(name: str, values: list[str], declared) -> CategoricalDomain:
    base = [str(v) for v in declared.get(name, [])]
    extra = sorted(set(values) - set(base))
    return CategoricalDomain(name, tuple(base + extra))


def _binarize_target(values: list[str], threshold) -> np.ndarray:
    if threshold is None:
        uniques = set(values)
        if uniques <= {"0", "1"}:
            return np.array([int(v) for v in values], dtype=np.int8)
        raise ConfigError(
            f"target takes values {sorted(uniques)[:6]}; a binarization "
            "threshold is required for non-binary targets"
        )
    try:
        numeric = np.array([float(v) for v in values])
    except ValueError as exc:
        raise ConfigError(f"target value {exc} is not numeric; cannot binarize") from None
    return (numeric >= float(threshold)).astype(np.int8)


def load_star_schema(manifest_path) -> StarSchema:
    """Load, code, and integrity-check a star schema described by a manifest."""
    manifest_path = Path(manifest_path)
    if not manifest_path.exists():
        raise ConfigError(f"manifest not found: {manifest_path}")
    with open(manifest_path, encoding="utf-8") as f:
        manifest = yaml.safe_load(f)
    if not isinstance(manifest, dict):
        raise ConfigError("manifest must be a mapping")
    for key in ("fact", "target", "fks", "dimensions"):
        if key not in manifest:
            raise ConfigError(f"manifest is missing the {key!r} key")
    base = manifest_path.parent
    declared = manifest.get("domains", {}) or {}
    fk_names = list(manifest["fks"])
    dim_specs = list(manifest["dimensions"])
    if len(fk_names) != len(dim_specs):
        raise ConfigError("one dimension entry is required per FK column")

    fact_path = base / manifest["fact"]
    header, rows = _read_csv(fact_path)
    target_name = manifest["target"]
    target = _binarize_target(
        _column(header, rows, target_name, fact_path), manifest.get("threshold")
    )

    dims: list[DimensionTable] = []
    fk_columns: list[np.ndarray] = []
    fk_domains: list[CategoricalDomain] = []
    for fk_name, spec in zip(fk_names, dim_specs):
        dim_path = base / spec["file"]
        d_header, d_rows = _read_csv(dim_path)
        key_col = spec["key"]
        rid_values = _column(d_header, d_rows, key_col, dim_path)
        if len(set(rid_values)) != len(rid_values):
            raise ConfigError(f"{dim_path}: key column {key_col!r} has duplicate values")
        rid_domain = CategoricalDomain(f"{fk_name}", tuple(rid_values))
        features, feature_domains = [], []
        for col_name in d_header:
            if col_name == key_col:
                continue
            values = _column(d_header, d_rows, col_name, dim_path)
            dom = _feature_domain(f"{fk_name}.{col_name}", values, declared)
            features.append(dom.codes_for(values))
            feature_domains.append(dom)
        dims.append(DimensionTable(
            rid_domain=rid_domain,
            features=tuple(features),
            feature_domains=tuple(feature_domains),
            open_domain=bool(spec.get("open_domain", False)),
        ))
        fk_values = _column(header, rows, fk_name, fact_path)
        index = {v: i for i, v in enumerate(rid_values)}
        codes = np.empty(len(fk_values), dtype=np.int32)
        for i, v in enumerate(fk_values):
            if v not in index:
                raise ReferentialIntegrityError(
                    f"{fact_path} row {i + 2}: FK {fk_name!r} value {v!r} "
                    f"has no row in {dim_path.name}"
                )
            codes[i] = index[v]
        fk_columns.append(codes)
        fk_domains.append(rid_domain.with_others())

    home_features, home_domains = [], []
    for col_name in header:
        if col_name == target_name or col_name in fk_names:
            continue
        values = _column(header, rows, col_name, fact_path)
        dom = _feature_domain(col_name, values, declared)
        home_features.append(dom.codes_for(values))
        home_domains.append(dom)

    fact = FactTable(
        row_ids=np.arange(len(rows)),
        target=target,
        home_features=tuple(home_features),
        home_domains=tuple(home_domains),
        fk_columns=tuple(fk_columns),
        fk_domains=tuple(fk_domains),
    )
    return StarSchema(fact, tuple(dims), tuple(range(len(dims))))
