"""CART-style decision trees over categorical codes.

Splits are binary partitions of one feature's value set.  For features with
at most :data:`EXHAUSTIVE_MAX_DOMAIN` observed values the best partition is
found by exhaustive enumeration; above that, values are ordered by their
positive-class proportion and only prefix cuts of that order are scored
(the classic CART shortcut, which is exact for Gini and entropy gains on
binary targets).  Pruning is pre-pruning: a node splits only when it holds
at least ``minsplit`` rows and the best gain, rescaled by the root impurity,
reaches ``cp``.

The grower records every split's rescaled gain, so one fully grown tree can
be re-pruned cheaply for each (minsplit, cp) grid cell; ``train_tree`` is
exactly grow-then-prune, which keeps the two paths equivalent.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ..star import Dataset

GAIN_EPS = 1e-12
EXHAUSTIVE_MAX_DOMAIN = 12


class SplitCriterion(Enum):
    GINI = "gini"
    INFO_GAIN = "info_gain"
    GAIN_RATIO = "gain_ratio"


@dataclass(frozen=True)
class TreeParams:
    minsplit: int = 1
    cp: float = 0.0

    def __post_init__(self):
        if self.minsplit < 1:
            raise ValueError("minsplit must be >= 1")
        if not 0.0 <= self.cp <= 1.0:
            raise ValueError("cp must lie in [0, 1]")


def _xlog2(p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=np.float64)
    safe = np.where(p > 0.0, p, 1.0)
    return p * np.log2(safe)


def _entropy_counts(a, b) -> np.ndarray:
    total = np.asarray(a + b, dtype=np.float64)
    pa = np.divide(a, total, out=np.zeros_like(total), where=total > 0)
    pb = np.divide(b, total, out=np.zeros_like(total), where=total > 0)
    return -(_xlog2(pa) + _xlog2(pb))


def _gini_counts(a, b) -> np.ndarray:
    total = np.asarray(a + b, dtype=np.float64)
    pa = np.divide(a, total, out=np.zeros_like(total), where=total > 0)
    pb = np.divide(b, total, out=np.zeros_like(total), where=total > 0)
    return 1.0 - pa * pa - pb * pb


def impurity(class_counts, criterion: SplitCriterion) -> float:
    """Node impurity from a (negatives, positives) count pair.

    Gini for the Gini criterion, base-2 entropy for information gain and
    gain ratio.  A pure node scores 0.
    """
    n0, n1 = class_counts
    if n0 < 0 or n1 < 0:
        raise ValueError("class counts cannot be negative")
    if n0 + n1 == 0:
        raise ValueError("impurity of an empty node is undefined")
    if criterion is SplitCriterion.GINI:
        return float(_gini_counts(n0, n1))
    return float(_entropy_counts(n0, n1))


def _candidate_gains(parent: float, n: int, n1: int, n_left, n1_left,
                     criterion: SplitCriterion) -> np.ndarray:
    n_left = np.asarray(n_left, dtype=np.float64)
    n1_left = np.asarray(n1_left, dtype=np.float64)
    n_right = n - n_left
    n1_right = n1 - n1_left
    n0_left = n_left - n1_left
    n0_right = n_right - n1_right
    if criterion is SplitCriterion.GINI:
        child = _gini_counts(n0_left, n1_left) * n_left + _gini_counts(n0_right, n1_right) * n_right
        return parent - child / n
    child = _entropy_counts(n0_left, n1_left) * n_left + _entropy_counts(n0_right, n1_right) * n_right
    gain = parent - child / n
    if criterion is SplitCriterion.INFO_GAIN:
        return gain
    split_info = _entropy_counts(n_left, n_right)
    return np.divide(gain, split_info, out=np.zeros_like(gain), where=split_info > 0)


def _canonical(left: np.ndarray, right: np.ndarray) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Orient a partition so the side holding the smallest value is 'left'."""
    left = np.sort(left)
    right = np.sort(right)
    if right.size and (not left.size or right[0] < left[0]):
        left, right = right, left
    return tuple(int(v) for v in left), tuple(int(v) for v in right)


def _best_partition_for_feature(cnt_o, pos_o, observed, parent, n, n1, criterion):
    """Best (gain, left_values, right_values) for one feature, or None."""
    k = len(observed)
    if k <= EXHAUSTIVE_MAX_DOMAIN:
        # Enumerate all bipartitions, pinning observed[0] to the left side.
        m = 1 << (k - 1)
        masks = np.arange(m, dtype=np.int64)
        bits = (masks[:, None] >> np.arange(k - 1)) & 1
        n_left = cnt_o[0] + bits @ cnt_o[1:]
        n1_left = pos_o[0] + bits @ pos_o[1:]
        valid = n_left < n  # right side non-empty
        gains = _candidate_gains(parent, n, n1, n_left, n1_left, criterion)
        gains[~valid] = -np.inf
        best = float(gains.max())
        if not np.isfinite(best):
            return None
        tied = np.flatnonzero(gains == best)
        choice = None
        for t in tied:
            sel = np.concatenate(([True], bits[t].astype(bool)))
            left, right = _canonical(observed[sel], observed[~sel])
            if choice is None or left < choice[0]:
                choice = (left, right)
        return best, choice[0], choice[1]
    # Large domain: order by positive proportion and score prefix cuts only.
    ratio = pos_o / cnt_o
    order = np.lexsort((observed, ratio))
    c_cnt = np.cumsum(cnt_o[order])
    c_pos = np.cumsum(pos_o[order])
    n_left = c_cnt[:-1]
    n1_left = c_pos[:-1]
    gains = _candidate_gains(parent, n, n1, n_left, n1_left, criterion)
    best = float(gains.max())
    tied = np.flatnonzero(gains == best)
    choice = None
    for t in tied:
        left, right = _canonical(observed[order[: t + 1]], observed[order[t + 1:]])
        if choice is None or left < choice[0]:
            choice = (left, right)
    return best, choice[0], choice[1]


def _best_split_arrays(codes, labels, criterion, allow_zero_gain=False):
    """Best split over all features, or None.

    With ``allow_zero_gain`` (used by the grower) any valid partition
    qualifies even at zero gain; the stopping rule ``rel_gain < cp`` then
    decides its fate, so cp = 0 keeps splits that merely do not worsen the
    fit (what lets depth-2 interactions like XOR be carved out).
    """
    n = len(labels)
    n1 = int(labels.sum())
    n0 = n - n1
    if n0 == 0 or n1 == 0 or n < 2:
        return None
    parent = impurity((n0, n1), criterion)
    best = None
    for f in range(codes.shape[1]):
        col = codes[:, f]
        size = int(col.max()) + 1
        cnt = np.bincount(col, minlength=size)
        pos = np.bincount(col[labels == 1], minlength=size)
        observed = np.flatnonzero(cnt)
        if len(observed) < 2:
            continue
        found = _best_partition_for_feature(
            cnt[observed].astype(np.float64), pos[observed].astype(np.float64),
            observed, parent, n, n1, criterion,
        )
        if found is None:
            continue
        gain, left, right = found
        if best is None or gain > best[0]:
            best = (gain, f, left, right)
    if best is None or (not allow_zero_gain and best[0] <= GAIN_EPS):
        return None
    return best


def best_split(data: Dataset, criterion: SplitCriterion = SplitCriterion.GINI):
    """Best binary value-partition split of one node's rows.

    Returns ``(feature_index, left_values, gain)`` where ``left_values`` is
    the canonical side of the partition (the one holding the smallest
    observed value).  Ties go to the lowest feature index, then to the
    lexicographically smallest partition.  Returns ``None`` when no split
    improves impurity.
    """
    found = _best_split_arrays(data.codes, data.labels, criterion)
    if found is None:
        return None
    gain, f, left, _ = found
    return f, left, gain


@dataclass(eq=False)
class TreeNode:
    n0: int
    n1: int
    feature: int = -1
    left_values: tuple[int, ...] = ()
    right_values: tuple[int, ...] = ()
    default_left: bool = True
    gain: float = 0.0
    rel_gain: float = 0.0
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None
    _left_arr: np.ndarray | None = field(default=None, repr=False)
    _right_arr: np.ndarray | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.n0 + self.n1

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    @property
    def label(self) -> int:
        return 1 if self.n1 > self.n0 else 0


def _grow_full(codes, labels, criterion) -> TreeNode:
    n1 = int(labels.sum())
    root = TreeNode(len(labels) - n1, n1)
    if root.n == 0:
        raise ValueError("cannot grow a tree from an empty dataset")
    root_imp = impurity((root.n0, root.n1), criterion) if root.n0 and root.n1 else 0.0
    stack = [(root, np.arange(len(labels)))]
    while stack:
        node, idx = stack.pop()
        if node.n0 == 0 or node.n1 == 0:
            continue
        found = _best_split_arrays(codes[idx], labels[idx], criterion,
                                   allow_zero_gain=True)
        if found is None:
            continue
        gain, f, left_vals, right_vals = found
        gain = max(gain, 0.0)
        node.feature = f
        node.left_values = left_vals
        node.right_values = right_vals
        node._left_arr = np.asarray(left_vals, dtype=np.int32)
        node._right_arr = np.asarray(right_vals, dtype=np.int32)
        node.gain = gain
        node.rel_gain = gain / root_imp if root_imp > 0 else 0.0
        col = codes[idx, f]
        go_left = np.isin(col, node._left_arr)
        left_idx, right_idx = idx[go_left], idx[~go_left]
        c1_left = int(labels[left_idx].sum())
        c1_right = int(labels[right_idx].sum())
        node.left = TreeNode(len(left_idx) - c1_left, c1_left)
        node.right = TreeNode(len(right_idx) - c1_right, c1_right)
        node.default_left = node.left.n >= node.right.n
        stack.append((node.left, left_idx))
        stack.append((node.right, right_idx))
    return root


def _prune(node: TreeNode, params: TreeParams) -> tuple[TreeNode, int]:
    keep = (
        not node.is_leaf
        and node.n >= params.minsplit
        and node.rel_gain >= params.cp
    )
    if not keep:
        return TreeNode(node.n0, node.n1), 1
    left, nl = _prune(node.left, params)
    right, nr = _prune(node.right, params)
    out = TreeNode(
        node.n0, node.n1, node.feature, node.left_values, node.right_values,
        node.default_left, node.gain, node.rel_gain, left, right,
        node._left_arr, node._right_arr,
    )
    return out, nl + nr + 1


@dataclass(eq=False)
class DecisionTree:
    root: TreeNode
    criterion: SplitCriterion
    params: TreeParams
    n_features: int
    node_count: int

    def predict(self, codes: np.ndarray) -> np.ndarray:
        """Route rows by stored partitions; values a node never saw follow
        the branch that held more training rows (ties go left)."""
        codes = np.asarray(codes)
        if codes.ndim == 1:
            codes = codes[None, :]
        if codes.shape[1] != self.n_features:
            raise ValueError(
                f"expected {self.n_features} feature columns, got {codes.shape[1]}"
            )
        out = np.empty(codes.shape[0], dtype=np.int8)
        stack = [(self.root, np.arange(codes.shape[0]))]
        while stack:
            node, idx = stack.pop()
            if idx.size == 0:
                continue
            if node.is_leaf:
                out[idx] = node.label
                continue
            col = codes[idx, node.feature]
            in_left = np.isin(col, node._left_arr)
            in_right = np.isin(col, node._right_arr)
            unseen = ~(in_left | in_right)
            go_left = in_left | (unseen & node.default_left)
            stack.append((node.left, idx[go_left]))
            stack.append((node.right, idx[~go_left]))
        return out


def grow_unpruned(train: Dataset, criterion: SplitCriterion = SplitCriterion.GINI) -> TreeNode:
    """Grow without stopping rules (beyond purity / no useful split).

    The returned root records each split's gain rescaled by the root
    impurity, so :func:`apply_pruning` can carve out the tree for any
    (minsplit, cp) combination without re-scanning the data.
    """
    if train.n_rows == 0:
        raise ValueError("cannot grow a tree from an empty dataset")
    return _grow_full(train.codes, train.labels, criterion)


def apply_pruning(full_root: TreeNode, params: TreeParams,
                  criterion: SplitCriterion, n_features: int) -> DecisionTree:
    root, count = _prune(full_root, params)
    return DecisionTree(root, criterion, params, n_features, count)


def train_tree(train: Dataset, params: TreeParams = TreeParams(),
               criterion: SplitCriterion = SplitCriterion.GINI) -> DecisionTree:
    """Recursive partitioning with pre-pruning; leaves carry majority labels
    (ties break to label 0)."""
    full = grow_unpruned(train, criterion)
    return apply_pruning(full, params, criterion, train.width)
