import numpy as np
import pytest

from conftest import random_dataset
from joinsafe.classifiers.grids import (
    HyperGrid,
    default_grid,
    fit_family,
    grid_search,
    predict_dataset,
)
from joinsafe.classifiers.trees import SplitCriterion


def test_default_tree_grid_is_four_by_five():
    grid = default_grid("tree_gini")
    combos = grid.as_dicts()
    assert len(combos) == 20
    assert combos[0] == {"minsplit": 1, "cp": 1e-4}
    assert {c["minsplit"] for c in combos} == {1, 10, 100, 1000}
    assert {c["cp"] for c in combos} == {1e-4, 1e-3, 0.01, 0.1, 0.0}


def test_default_svm_grids():
    rbf = default_grid("rbf_svm").as_dicts()
    assert len(rbf) == 30
    assert {c["c"] for c in rbf} == {0.1, 1.0, 10.0, 100.0, 1000.0}
    assert {c["gamma"] for c in rbf} == {1e-4, 1e-3, 0.01, 0.1, 1.0, 10.0}
    assert len(default_grid("linear_svm").as_dicts()) == 5
    assert default_grid("knn1").as_dicts() == ({},)


def test_grid_rejects_duplicates_and_empty():
    with pytest.raises(ValueError):
        HyperGrid.from_dicts("tree_gini", [])
    with pytest.raises(ValueError):
        HyperGrid.from_dicts("tree_gini", [{"cp": 0.0}, {"cp": 0.0}])


def test_single_combination_returned(rng):
    train = random_dataset(rng, n_rows=40)
    val = random_dataset(rng, n_rows=20)
    grid = HyperGrid.from_dicts("tree_gini", [{"minsplit": 2, "cp": 0.01}])
    params, model = grid_search(train, val, grid)
    assert params == {"minsplit": 2, "cp": 0.01}
    assert model.params.minsplit == 2


def test_tie_keeps_earliest_combination(rng):
    train = random_dataset(rng, n_rows=40)
    val = random_dataset(rng, n_rows=20)
    # two identical models from different declared combos: equal accuracy
    grid = HyperGrid.from_dicts("knn1", [{}])
    params, _ = grid_search(train, val, grid, family="knn1")
    assert params == {}
    # trees: a pair of combos that collapse to the same pruned tree
    grid = HyperGrid.from_dicts("tree_gini", [
        {"minsplit": 1000, "cp": 0.5}, {"minsplit": 999, "cp": 0.5},
    ])
    params, _ = grid_search(train, val, grid)
    assert params == {"minsplit": 1000, "cp": 0.5}


@pytest.mark.parametrize("family", ["tree_gini", "naive_bayes", "knn1", "logreg", "rbf_svm"])
def test_winner_beats_every_other_combination(family, rng):
    from joinsafe.simulate import ScenarioSpec, SimConfig, gen_onexr
    from joinsafe.star import NO_JOIN, apply_feature_view

    tr, va, te = gen_onexr(SimConfig(160, 8, 2, 2, seed=4), ScenarioSpec("onexr", p=0.1))
    train = apply_feature_view(tr, NO_JOIN)
    val = apply_feature_view(va, NO_JOIN)
    if family == "rbf_svm":
        grid = HyperGrid.from_dicts(family, [
            {"c": 1.0, "gamma": 0.1}, {"c": 10.0, "gamma": 0.01},
        ])
    else:
        grid = default_grid(family)
    params, model = grid_search(train, val, grid, family=family)
    best_acc = (predict_dataset(model, family, val) == val.labels).mean()
    for combo in grid.as_dicts():
        other = fit_family(family, train, combo)
        acc = (predict_dataset(other, family, val) == val.labels).mean()
        assert acc <= best_acc + 1e-12


def test_tree_alias_with_criterion(rng):
    train = random_dataset(rng, n_rows=40)
    val = random_dataset(rng, n_rows=20)
    params, model = grid_search(train, val, family="tree",
                                criterion=SplitCriterion.INFO_GAIN)
    assert model.criterion is SplitCriterion.INFO_GAIN


def test_all_combinations_failing_raises(rng):
    from joinsafe.errors import GridSearchError

    ds = random_dataset(rng, n_rows=20)
    single = ds.take(np.flatnonzero(ds.labels == ds.labels[0]))
    val = random_dataset(rng, n_rows=10)
    with pytest.raises(GridSearchError):
        grid_search(single, val, default_grid("naive_bayes"), family="naive_bayes")
