from .trees import (
    SplitCriterion,
    TreeParams,
    DecisionTree,
    impurity,
    best_split,
    train_tree,
)
from .svm import KernelSpec, SVMModel, kernel, kernel_matrix, train_svm
from .naive_bayes import NBModel, train_nb
from .logreg import LogRegModel, train_logreg, logistic_loss, logistic_gradient
from .knn import OneNNModel, train_1nn
from .grids import HyperGrid, default_grid, grid_search, fit_family, predict, FAMILIES

__all__ = [
    "SplitCriterion", "TreeParams", "DecisionTree", "impurity", "best_split",
    "train_tree", "KernelSpec", "SVMModel", "kernel", "kernel_matrix",
    "train_svm", "NBModel", "train_nb", "LogRegModel", "train_logreg",
    "logistic_loss", "logistic_gradient", "OneNNModel", "train_1nn",
    "HyperGrid", "default_grid", "grid_search", "fit_family", "predict",
    "FAMILIES",
]
