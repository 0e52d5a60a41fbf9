"""Is this join safe to avoid?  Verdicts from tuple ratios alone.

The decision needs only the training row count and each dimension table's
cardinality, never the dimension's contents.  Default thresholds: trees and
neural nets tolerate ratios down to about 3, RBF SVMs about 6, and linear
models about 20; the quadratic-kernel threshold simply inherits the RBF one
and is flagged as such.  A ``not_safe`` verdict is conservative: it flags
risk of extra overfitting, not a guaranteed accuracy loss.  Dimensions whose
foreign key has an open domain can never be used as a feature, so avoiding
the join is judged ``inapplicable`` rather than safe or unsafe.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

from .star import StarSchema, tuple_ratio

SAFE = "safe_to_avoid"
NOT_SAFE = "not_safe"
INAPPLICABLE = "inapplicable"

DEFAULT_THRESHOLDS = {
    "tree": 3.0,
    "ann": 3.0,
    "rbf_svm": 6.0,
    "quadratic_svm": 6.0,
    "linear": 20.0,
}

_FAMILY_ALIASES = {
    "tree_gini": "tree",
    "tree_info_gain": "tree",
    "tree_gain_ratio": "tree",
    "naive_bayes": "linear",
    "logreg": "linear",
    "linear_svm": "linear",
}

_NOTES = {
    "quadratic_svm": "threshold inherited from rbf_svm (unvalidated)",
}


def canonical_family(family: str) -> str:
    return _FAMILY_ALIASES.get(family, family)


@dataclass(frozen=True)
class ThresholdTable:
    """Minimum safe tuple ratio per model family; overridable per entry."""

    thresholds: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_THRESHOLDS))

    def __post_init__(self):
        for family, ratio in self.thresholds.items():
            if ratio <= 0:
                raise ValueError(f"threshold for {family!r} must be positive")

    def lookup(self, family: str) -> float:
        name = canonical_family(family)
        if name not in self.thresholds:
            raise KeyError(f"no tuple-ratio threshold known for family {family!r}")
        return self.thresholds[name]


@dataclass(frozen=True)
class DimVerdict:
    dimension: str
    tuple_ratio: float
    verdict: str
    family: str
    threshold: float
    note: str = ""


@dataclass(frozen=True)
class Recommendation:
    rows: tuple[DimVerdict, ...]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["dimension", "tuple_ratio", "verdict", "family", "threshold", "note"])
        for r in self.rows:
            writer.writerow([
                r.dimension, repr(r.tuple_ratio), r.verdict, r.family,
                repr(r.threshold), r.note,
            ])
        return buf.getvalue()

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(self.to_csv())


def recommend(star: StarSchema, train_rows: int, family: str,
              thresholds: ThresholdTable | None = None) -> Recommendation:
    """Per-dimension verdicts for one model family.

    ``train_rows`` is the training-split row count (the published per-table
    ratios are train rows over dimension cardinality, not total rows).
    """
    table = thresholds or ThresholdTable()
    threshold = table.lookup(family)
    note = _NOTES.get(canonical_family(family), "")
    rows = []
    for dim in star.dims:
        ratio = tuple_ratio(train_rows, dim.n_rows)
        if dim.open_domain:
            verdict = INAPPLICABLE
        elif ratio >= threshold:
            verdict = SAFE
        else:
            verdict = NOT_SAFE
        rows.append(DimVerdict(
            dimension=dim.rid_domain.name,
            tuple_ratio=ratio,
            verdict=verdict,
            family=family,
            threshold=threshold,
            note=note,
        ))
    return Recommendation(tuple(rows))
