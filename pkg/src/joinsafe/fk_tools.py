"""Making huge foreign-key domains practical: compression and smoothing.

Compression shrinks an FK domain of size ``m`` to a user budget ``l`` via a
surjection ``[m] -> [l]``, either by random hashing or by sorting values on
their empirical conditional label entropy and cutting at the largest
adjacent gaps.  Smoothing reassigns FK values that never occurred in the
training split to ones that did, either at random or to the seen value
whose foreign feature row is closest in l0 (mismatch-count) distance.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .star import DimensionTable
from .util import rng_from


def conditional_entropy(labels, fk_codes, domain_size: int | None = None):
    """H(Y | FK) in bits plus the per-value table H(Y | FK = z).

    Values of the domain absent from the data carry zero probability mass
    (so they do not affect the aggregate) and are reported with the
    maximum-uncertainty entropy of 1 bit.
    """
    labels = np.asarray(labels)
    codes = np.asarray(fk_codes)
    if labels.size == 0 or labels.shape != codes.shape:
        raise ValueError("labels and fk codes must be equal-length and non-empty")
    m = int(domain_size) if domain_size is not None else int(codes.max()) + 1
    if codes.min() < 0 or codes.max() >= m:
        raise ValueError("fk code outside the declared domain")
    cnt = np.bincount(codes, minlength=m).astype(np.float64)
    pos = np.bincount(codes[labels == 1], minlength=m).astype(np.float64)
    with np.errstate(invalid="ignore", divide="ignore"):
        p1 = np.where(cnt > 0, pos / np.maximum(cnt, 1.0), 0.0)
    p0 = 1.0 - p1

    def xlog(p):
        return np.where(p > 0, p * np.log2(np.where(p > 0, p, 1.0)), 0.0)

    per_value = -(xlog(p0) + xlog(p1))
    per_value = np.where(cnt > 0, per_value, 1.0)
    weights = cnt / cnt.sum()
    total = float((weights * np.where(cnt > 0, per_value, 0.0)).sum())
    return total, per_value


@dataclass(frozen=True, eq=False)
class CompressionMap:
    """A surjection from ``source_size`` FK codes onto at most ``budget`` buckets."""

    source_size: int
    budget: int
    mapping: np.ndarray

    def __post_init__(self):
        mapping = np.asarray(self.mapping, dtype=np.int32)
        object.__setattr__(self, "mapping", mapping)
        if not (1 <= self.budget <= self.source_size):
            raise ValueError("budget must lie in [1, source_size]")
        if mapping.shape != (self.source_size,):
            raise ValueError("mapping must cover every source code")
        if mapping.size and (mapping.min() < 0 or mapping.max() >= self.budget):
            raise ValueError("mapping targets must lie in [0, budget)")

    def apply(self, codes: np.ndarray) -> np.ndarray:
        return self.mapping[np.asarray(codes)]

    def write_csv(self, path) -> None:
        _write_map_csv(path, enumerate(self.mapping.tolist()))


def compress_random(m: int, l: int, seed) -> CompressionMap:
    """Hash each source code independently and uniformly into [0, l)."""
    if not 1 <= l <= m:
        raise ValueError("budget must lie in [1, m]")
    mapping = rng_from(seed, "random-hash").integers(0, l, size=m)
    return CompressionMap(m, l, mapping)


def compress_sort_based(labels, fk_codes, m: int, l: int,
                        tie_seed=None) -> CompressionMap:
    """Group codes with comparable conditional entropy into ``l`` buckets.

    Codes are sorted by H(Y | FK = z) ascending (seen before unseen, ties by
    code), and the l - 1 largest adjacent entropy differences become bucket
    boundaries.  Equal differences are cut at the earliest positions unless
    ``tie_seed`` asks for a seeded random order among them.
    """
    if not 1 <= l <= m:
        raise ValueError("budget must lie in [1, m]")
    _, per_value = conditional_entropy(labels, fk_codes, domain_size=m)
    cnt = np.bincount(np.asarray(fk_codes), minlength=m)
    seen = np.flatnonzero(cnt > 0)
    unseen = np.flatnonzero(cnt == 0)
    seen_sorted = seen[np.lexsort((seen, per_value[seen]))]
    order = np.concatenate([seen_sorted, unseen]).astype(np.int64)
    diffs = per_value[order][1:] - per_value[order][:-1]
    positions = np.arange(len(diffs))
    if tie_seed is None:
        rank = np.lexsort((positions, -diffs))
    else:
        jitter = rng_from(tie_seed, "sort-ties").permutation(len(diffs))
        rank = np.lexsort((jitter, -diffs))
    cuts = np.sort(rank[: l - 1])
    mapping = np.zeros(m, dtype=np.int32)
    bucket = np.zeros(len(order), dtype=np.int32)
    for c in cuts:
        bucket[c + 1:] += 1
    mapping[order] = bucket
    return CompressionMap(m, l, mapping)


@dataclass(frozen=True, eq=False)
class SmoothingMap:
    """Reassignment of training-unseen FK codes onto seen ones."""

    reassignment: dict[int, int]

    def apply(self, codes: np.ndarray) -> np.ndarray:
        codes = np.asarray(codes)
        out = codes.copy()
        for src, dst in self.reassignment.items():
            out[codes == src] = dst
        return out

    def write_csv(self, path) -> None:
        _write_map_csv(path, sorted(self.reassignment.items()))


def _check_smooth_args(unseen, seen):
    unseen = np.asarray(unseen, dtype=np.int64)
    seen = np.asarray(seen, dtype=np.int64)
    if seen.size == 0:
        raise ValueError("smoothing needs at least one seen FK value")
    if np.intersect1d(unseen, seen).size:
        raise ValueError("unseen and seen code sets must be disjoint")
    return unseen, seen


def smooth_random(unseen, seen, seed) -> SmoothingMap:
    """Map each unseen code to a uniformly chosen seen code."""
    unseen, seen = _check_smooth_args(unseen, seen)
    rng = rng_from(seed, "smooth-random")
    picks = seen[rng.integers(0, len(seen), size=len(unseen))]
    return SmoothingMap({int(u): int(t) for u, t in zip(unseen, picks)})


def smooth_xr(unseen, seen, dim: DimensionTable, seed) -> SmoothingMap:
    """Map each unseen code to the seen code whose foreign feature row has
    the minimum l0 (coordinate mismatch) distance; ties break uniformly at
    random under ``seed``."""
    unseen, seen = _check_smooth_args(unseen, seen)
    n_rows = dim.n_rows
    if (unseen.size and unseen.max() >= n_rows) or seen.max() >= n_rows:
        raise ValueError("codes must be valid rows of the dimension table")
    feats = np.stack(dim.features, axis=1) if dim.d_r else np.zeros((n_rows, 0), dtype=np.int32)
    rng = rng_from(seed, "smooth-xr")
    mapping = {}
    for u in unseen:
        dist = (feats[seen] != feats[u]).sum(axis=1)
        best = np.flatnonzero(dist == dist.min())
        mapping[int(u)] = int(seen[best[rng.integers(0, len(best))]])
    return SmoothingMap(mapping)


def unseen_codes(train_codes, domain_size: int) -> np.ndarray:
    """Domain codes that never occur in the training column."""
    cnt = np.bincount(np.asarray(train_codes), minlength=domain_size)
    return np.flatnonzero(cnt == 0)


def _write_map_csv(path, pairs) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["source_code", "target_code"])
        for src, dst in pairs:
            writer.writerow([src, dst])
