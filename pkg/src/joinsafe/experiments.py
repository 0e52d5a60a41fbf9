"""End-to-end protocols built from the core pieces: fixed-split evaluation
of real star schemas, FK-domain compression curves, and unseen-FK smoothing
trials.

These are what the CLI's ``experiment``, ``compress``, and ``smooth`` modes
run, and what the scripts under ``scripts/`` sweep for the figure-style
outputs.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .classifiers.grids import (
    HyperGrid,
    grid_search,
    predict_dataset,
)
from .fk_tools import (
    CompressionMap,
    compress_random,
    compress_sort_based,
    conditional_entropy,
    smooth_random,
    smooth_xr,
    unseen_codes,
)
from .domains import index_domain
from .simulate import ScenarioSpec, SimConfig, as_star, build_world, sample_fact
from .star import (
    FeatureView,
    StarSchema,
    apply_feature_view,
    split_three_way,
)
from .util import rng_from, stable_seed


@dataclass(frozen=True)
class ApproachResult:
    approach: str
    family: str
    params: dict
    train_accuracy: float
    test_accuracy: float
    correct: int
    test_size: int
    seconds: float


def evaluate_star(star: StarSchema, approaches, families, seed: int,
                  grids: dict[str, HyperGrid] | None = None) -> list[ApproachResult]:
    """Split 50/25/25, grid-search each (approach, family), score the holdout."""
    train, validation, test = split_three_way(star, seed)
    grids = grids or {}
    results = []
    for family in families:
        for name in approaches:
            view = FeatureView.parse(name)
            t0 = time.perf_counter()
            train_ds = apply_feature_view(train, view)
            val_ds = apply_feature_view(validation, view)
            test_ds = apply_feature_view(test, view)
            params, model = grid_search(train_ds, val_ds, grids.get(family), family)
            train_pred = predict_dataset(model, family, train_ds)
            test_pred = predict_dataset(model, family, test_ds)
            seconds = time.perf_counter() - t0
            correct = int((test_pred == test_ds.labels).sum())
            results.append(ApproachResult(
                approach=name,
                family=family,
                params=params,
                train_accuracy=float((train_pred == train_ds.labels).mean()),
                test_accuracy=correct / test_ds.n_rows,
                correct=correct,
                test_size=test_ds.n_rows,
                seconds=seconds,
            ))
    return results


@dataclass(frozen=True)
class CompressionResult:
    budget: int
    method: str
    conditional_entropy_bits: float
    test_accuracy: float | None
    map: CompressionMap


def _compress_fk(dataset, fk_name: str, cmap: CompressionMap):
    new_codes = cmap.apply(dataset.column(fk_name))
    return dataset.replace_column(
        fk_name, new_codes, index_domain(fk_name, cmap.budget)
    )


def compression_trial(train_ds, val_ds, test_ds, fk_name: str, budgets,
                      hash_seeds=(0, 1, 2, 3, 4), family: str = "tree_gini",
                      grid: HyperGrid | None = None, evaluate: bool = True,
                      ) -> list[CompressionResult]:
    """Compare sort-based compression against random hashing on one FK.

    The map is always built from the training split only, then applied to
    every split.  Random hashing reports the average across its seeds.
    ``evaluate=False`` skips model training and reports entropies only.
    """
    fk_idx = train_ds.feature_names.index(fk_name)
    m = train_ds.domains[fk_idx].size
    labels = train_ds.labels
    fk_train = train_ds.column(fk_name)
    results = []
    for budget in budgets:
        sort_map = compress_sort_based(labels, fk_train, m, budget)
        h_sort, _ = conditional_entropy(labels, sort_map.apply(fk_train), budget)
        acc_sort = None
        if evaluate:
            acc_sort = _accuracy_after_compression(
                train_ds, val_ds, test_ds, fk_name, sort_map, family, grid)
        results.append(CompressionResult(budget, "sort_based", h_sort, acc_sort, sort_map))

        h_rand, acc_rand, last_map = [], [], None
        for hs in hash_seeds:
            rand_map = compress_random(m, budget, hs)
            last_map = rand_map
            h, _ = conditional_entropy(labels, rand_map.apply(fk_train), budget)
            h_rand.append(h)
            if evaluate:
                acc_rand.append(_accuracy_after_compression(
                    train_ds, val_ds, test_ds, fk_name, rand_map, family, grid))
        results.append(CompressionResult(
            budget, "random_hash", float(np.mean(h_rand)),
            float(np.mean(acc_rand)) if evaluate else None, last_map,
        ))
    return results


def _accuracy_after_compression(train_ds, val_ds, test_ds, fk_name, cmap,
                                family, grid) -> float:
    tr = _compress_fk(train_ds, fk_name, cmap)
    va = _compress_fk(val_ds, fk_name, cmap)
    te = _compress_fk(test_ds, fk_name, cmap)
    _, model = grid_search(tr, va, grid, family)
    pred = predict_dataset(model, family, te)
    return float((pred == te.labels).mean())


@dataclass(frozen=True)
class SmoothingResult:
    unseen_fraction: float
    method: str
    test_error: float
    trials: int


def smoothing_trial(
    cfg: SimConfig,
    scenario: ScenarioSpec,
    unseen_fraction: float,
    methods=("none", "random", "xr"),
    approach: str = "NoJoin",
    family: str = "tree_gini",
    grid: HyperGrid | None = None,
    trials: int = 5,
    master_seed: int = 0,
    test_size: int | None = None,
) -> list[SmoothingResult]:
    """Hold out a fraction of the FK domain from training, then smooth at test.

    Training and validation foreign keys are drawn from a random
    ``(1 - unseen_fraction)`` subset of the domain; the test set draws from
    the full domain, so roughly ``unseen_fraction`` of its rows carry FK
    values the model never saw.  ``none`` relies on the tree's
    unseen-value routing; ``random`` and ``xr`` recode the test FK column
    through a smoothing map first.
    """
    if not 0.0 <= unseen_fraction < 1.0:
        raise ValueError("unseen_fraction must lie in [0, 1)")
    errors = {m: [] for m in methods}
    for t in range(trials):
        seed = stable_seed(master_seed, "smoothing", unseen_fraction, t)
        world = build_world(cfg, scenario, seed)
        keep = max(1, round(cfg.n_r * (1.0 - unseen_fraction)))
        perm = rng_from(seed, "held-out-fks").permutation(cfg.n_r)
        allowed = np.sort(perm[:keep])

        train_fact = sample_fact(world, cfg.n_s, (seed, "train"), fk_subset=allowed)
        val_fact = sample_fact(world, cfg.n_s // 4, (seed, "validation"), fk_subset=allowed)
        n_test = test_size if test_size is not None else max(1, cfg.n_s // 4)
        test_fact = sample_fact(world, n_test, (seed, "test"))

        view = FeatureView.parse(approach)
        train_ds = apply_feature_view(as_star(world, train_fact), view)
        val_ds = apply_feature_view(as_star(world, val_fact), view)
        test_ds = apply_feature_view(as_star(world, test_fact), view)

        _, model = grid_search(train_ds, val_ds, grid, family)
        seen = np.setdiff1d(np.arange(cfg.n_r), unseen_codes(train_ds.column("fk"), cfg.n_r))
        unseen = unseen_codes(train_ds.column("fk"), cfg.n_r)
        for method in methods:
            te = test_ds
            if method != "none" and unseen.size:
                if method == "random":
                    smap = smooth_random(unseen, seen, (seed, "map"))
                elif method == "xr":
                    smap = smooth_xr(unseen, seen, world.dim, (seed, "map"))
                else:
                    raise ValueError(f"unknown smoothing method {method!r}")
                te = test_ds.replace_column("fk", smap.apply(test_ds.column("fk")))
            pred = predict_dataset(model, family, te)
            errors[method].append(float((pred != te.labels).mean()))
    return [
        SmoothingResult(unseen_fraction, m, float(np.mean(errors[m])), trials)
        for m in methods
    ]
