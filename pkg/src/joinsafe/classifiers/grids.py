"""Hyper-parameter grids, grid search over a validation split, and the
uniform train/predict dispatch used by the experiment harness.

Families
--------
``tree_gini`` / ``tree_info_gain`` / ``tree_gain_ratio``
    CART trees on raw codes; grid over (minsplit, cp).
``linear_svm`` / ``quadratic_svm`` / ``rbf_svm``
    Kernel SVMs on one-hot rows; grid over C (and gamma).
``knn1``, ``naive_bayes``
    No hyper-parameters; the grid is a single empty combination.
``logreg``
    L2 logistic regression on one-hot rows; grid over the L2 strength.

Grid search shares per-dataset work across combinations: trees are grown
once and re-pruned per cell, SVMs reuse one Gram matrix per kernel family.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..encoding import one_hot_encode
from ..errors import DegenerateModelError, GridSearchError
from ..star import Dataset
from .knn import OneNNModel, train_1nn
from .logreg import LogRegModel, train_logreg
from .naive_bayes import NBModel, train_nb
from .svm import KernelSpec, SVMModel, _fit_from_kernel, train_svm
from .trees import (
    DecisionTree,
    SplitCriterion,
    TreeParams,
    apply_pruning,
    grow_unpruned,
    train_tree,
)

FAMILIES = (
    "tree_gini",
    "tree_info_gain",
    "tree_gain_ratio",
    "linear_svm",
    "quadratic_svm",
    "rbf_svm",
    "knn1",
    "naive_bayes",
    "logreg",
)

_TREE_CRITERIA = {
    "tree_gini": SplitCriterion.GINI,
    "tree_info_gain": SplitCriterion.INFO_GAIN,
    "tree_gain_ratio": SplitCriterion.GAIN_RATIO,
}

_SVM_KINDS = {"linear_svm": "linear", "quadratic_svm": "quadratic", "rbf_svm": "rbf"}

SVM_C_GRID = (0.1, 1.0, 10.0, 100.0, 1000.0)
SVM_GAMMA_GRID = (1e-4, 1e-3, 0.01, 0.1, 1.0, 10.0)
TREE_MINSPLIT_GRID = (1, 10, 100, 1000)
TREE_CP_GRID = (1e-4, 1e-3, 0.01, 0.1, 0.0)
LOGREG_L2_GRID = (1e-3, 1e-2, 1e-1)


@dataclass(frozen=True)
class HyperGrid:
    """An ordered list of parameter combinations for one model family."""

    family: str
    combos: tuple[tuple[tuple[str, object], ...], ...]

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown model family {self.family!r}")
        if not self.combos:
            raise ValueError("a hyper-parameter grid cannot be empty")
        if len(set(self.combos)) != len(self.combos):
            raise ValueError("grid combinations must be unique")

    @classmethod
    def from_dicts(cls, family: str, combos) -> "HyperGrid":
        return cls(family, tuple(tuple(sorted(c.items())) for c in combos))

    def as_dicts(self) -> tuple[dict, ...]:
        return tuple(dict(c) for c in self.combos)


def default_grid(family: str) -> HyperGrid:
    if family in _TREE_CRITERIA:
        combos = [
            {"minsplit": m, "cp": cp}
            for m in TREE_MINSPLIT_GRID
            for cp in TREE_CP_GRID
        ]
    elif family in ("rbf_svm", "quadratic_svm"):
        combos = [
            {"c": c, "gamma": g}
            for c in SVM_C_GRID
            for g in SVM_GAMMA_GRID
        ]
    elif family == "linear_svm":
        combos = [{"c": c} for c in SVM_C_GRID]
    elif family == "logreg":
        combos = [{"l2": l2} for l2 in LOGREG_L2_GRID]
    elif family in ("knn1", "naive_bayes"):
        combos = [{}]
    else:
        raise ValueError(f"unknown model family {family!r}")
    return HyperGrid.from_dicts(family, combos)


def _pm_labels(labels: np.ndarray) -> np.ndarray:
    return np.where(labels > 0, 1.0, -1.0)


class _SharedSVM:
    """Per-dataset kernel pieces reused across the (C, gamma) grid."""

    def __init__(self, kind: str, train: Dataset, others: list[Dataset]):
        self.kind = kind
        self.x = one_hot_encode(train).matrix
        self.y = _pm_labels(train.labels)
        self.others = [one_hot_encode(d).matrix for d in others]
        self.dots = self.x @ self.x.T
        self.cross_dots = [z @ self.x.T for z in self.others]
        if kind == "rbf":
            # One-hot rows all have squared norm = number of features.
            f = float(train.width)
            self.sq = np.maximum(2.0 * f - 2.0 * self.dots, 0.0)
            self.cross_sq = [np.maximum(2.0 * f - 2.0 * c, 0.0) for c in self.cross_dots]

    def _kernel(self, dots, sq, spec: KernelSpec) -> np.ndarray:
        if self.kind == "linear":
            return dots
        if self.kind == "quadratic":
            return (spec.gamma * dots + spec.coef0) ** 2
        return np.exp(-spec.gamma * sq)

    def fit(self, spec: KernelSpec, tol: float, max_passes: int) -> SVMModel:
        if len(np.unique(self.y)) < 2:
            raise DegenerateModelError("both classes are required to train an SVM")
        K = self._kernel(self.dots, self.sq if self.kind == "rbf" else None, spec)
        return _fit_from_kernel(K, self.x, self.y, spec, tol, max_passes)

    def decisions(self, model: SVMModel, which: int) -> np.ndarray:
        sq = self.cross_sq[which] if self.kind == "rbf" else None
        K = self._kernel(self.cross_dots[which], sq, model.spec)
        coef = np.zeros(len(self.y))
        coef[model.support_row_indices] = model.dual_coef
        return K @ coef + model.bias


def _svm_spec(kind: str, params: dict) -> KernelSpec:
    gamma = float(params.get("gamma", 1.0))
    return KernelSpec(kind=kind, c=float(params["c"]), gamma=gamma,
                      coef0=float(params.get("coef0", 0.0)))


def fit_family(family: str, train: Dataset, params: dict,
               svm_tol: float = 1e-3, svm_max_passes: int = 50):
    """Train one model of ``family`` on ``train`` with the given parameters."""
    if family in _TREE_CRITERIA:
        return train_tree(train, TreeParams(**params), _TREE_CRITERIA[family])
    if family in _SVM_KINDS:
        enc = one_hot_encode(train)
        return train_svm(enc.matrix, _pm_labels(train.labels),
                         _svm_spec(_SVM_KINDS[family], params),
                         tol=svm_tol, max_passes=svm_max_passes)
    if family == "knn1":
        return train_1nn(train)
    if family == "naive_bayes":
        return train_nb(train)
    if family == "logreg":
        enc = one_hot_encode(train)
        return train_logreg(enc.matrix, train.labels.astype(np.float64), **params)
    raise ValueError(f"unknown model family {family!r}")


def needs_encoding(family: str) -> bool:
    return family in _SVM_KINDS or family == "logreg"


def predict(model, rows: np.ndarray) -> np.ndarray:
    """Uniform prediction contract: trees/NB/1-NN read coded rows, SVMs and
    logistic regression read one-hot rows."""
    if isinstance(model, (DecisionTree, NBModel, OneNNModel, SVMModel, LogRegModel)):
        return model.predict(rows)
    raise TypeError(f"unknown model type {type(model).__name__}")


def predict_dataset(model, family: str, data: Dataset) -> np.ndarray:
    if needs_encoding(family):
        return predict(model, one_hot_encode(data).matrix)
    return predict(model, data.codes)


def _accuracy(pred: np.ndarray, labels: np.ndarray) -> float:
    return float((pred == labels).mean())


def grid_search(train: Dataset, validation: Dataset, grid: HyperGrid | None = None,
                family: str | None = None, criterion: SplitCriterion | None = None,
                svm_tol: float = 1e-3, svm_max_passes: int = 50):
    """Pick the combination with the best validation accuracy.

    Ties keep the earliest combination in declared grid order.  Individual
    combinations that fail to train are skipped; if every one fails a
    :class:`GridSearchError` is raised.  Returns ``(params, model)`` with the
    model fitted on ``train`` under the winning parameters.
    """
    if family is None:
        if grid is None:
            raise ValueError("either a grid or a family is required")
        family = grid.family
    if family == "tree":
        criterion = criterion or SplitCriterion.GINI
        family = {
            SplitCriterion.GINI: "tree_gini",
            SplitCriterion.INFO_GAIN: "tree_info_gain",
            SplitCriterion.GAIN_RATIO: "tree_gain_ratio",
        }[criterion]
    if grid is None:
        grid = default_grid(family)
    if grid.family != family:
        raise ValueError(f"grid is for {grid.family!r}, not {family!r}")

    best_acc = -1.0
    best: tuple[dict, object] | None = None
    failures: list[str] = []

    if family in _TREE_CRITERIA:
        crit = _TREE_CRITERIA[family]
        full = grow_unpruned(train, crit)
        for combo in grid.as_dicts():
            model = apply_pruning(full, TreeParams(**combo), crit, train.width)
            acc = _accuracy(model.predict(validation.codes), validation.labels)
            if acc > best_acc:
                best_acc, best = acc, (combo, model)
    elif family in _SVM_KINDS:
        shared = _SharedSVM(_SVM_KINDS[family], train, [validation])
        y_val = validation.labels
        for combo in grid.as_dicts():
            spec = _svm_spec(_SVM_KINDS[family], combo)
            try:
                model = shared.fit(spec, svm_tol, svm_max_passes)
            except DegenerateModelError as exc:
                failures.append(f"{combo}: {exc}")
                continue
            dec = shared.decisions(model, 0)
            acc = _accuracy((dec >= 0.0).astype(np.int8), y_val)
            if acc > best_acc:
                best_acc, best = acc, (combo, model)
    else:
        for combo in grid.as_dicts():
            try:
                model = fit_family(family, train, combo)
            except DegenerateModelError as exc:
                failures.append(f"{combo}: {exc}")
                continue
            pred = predict_dataset(model, family, validation)
            acc = _accuracy(pred, validation.labels)
            if acc > best_acc:
                best_acc, best = acc, (combo, model)

    if best is None:
        raise GridSearchError(
            "every grid combination failed to train: " + "; ".join(failures)
        )
    return best
