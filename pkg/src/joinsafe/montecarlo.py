"""The repeated-training protocol: sweep one parameter, retrain on many
fresh training sets, and decompose the error into bias and net variance.

For each swept value a *world* (dimension table + true distribution) and one
evaluation set are fixed; each run then samples a fresh training and
validation set, grid-searches the model family per feature view, and scores
the evaluation set.  Because the evaluation points stay fixed across runs,
the per-point mode of the predictions is well defined and the zero-one-loss
decomposition against the Bayes-optimal labels is exact:

    error(x) = bias(x) + variance(x)   on unbiased points,
    error(x) = bias(x) - variance(x)   on biased points,

where bias(x) is 0/1 disagreement of the mode with the optimal label and
variance(x) is the fraction of runs disagreeing with the mode.  The signed
average of variance(x) is the net variance.

All randomness is keyed by ``(master_seed, param, value, run)`` through a
stable hash, so reports are byte-identical regardless of scheduling and the
first k runs do not change when more runs are requested.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .classifiers.grids import (
    HyperGrid,
    default_grid,
    grid_search,
    needs_encoding,
)
from .encoding import one_hot_encode
from .simulate import (
    ScenarioSpec,
    SimConfig,
    SimWorld,
    apply_sweep_value,
    as_star,
    build_world,
    sample_fact,
)
from .star import FeatureView, apply_feature_view
from .util import stable_seed

SWEEP_CSV_HEADER = (
    "scenario", "param", "value", "approach", "model",
    "avg_test_error", "bias", "net_variance", "runs",
)


def decompose_bias_variance(predictions: np.ndarray, optimal_labels: np.ndarray):
    """(average error, bias, net variance) of a runs-by-points 0/1 label matrix.

    The error here is measured against the supplied Bayes-optimal labels, so
    the identity ``avg_error == bias + net_variance`` holds exactly.
    """
    preds = np.asarray(predictions)
    optimal = np.asarray(optimal_labels)
    if preds.ndim != 2 or preds.size == 0:
        raise ValueError("predictions must be a non-empty runs-by-points matrix")
    runs, points = preds.shape
    if optimal.shape != (points,):
        raise ValueError("one optimal label required per evaluation point")
    ones = preds.sum(axis=0)
    main = (2 * ones > runs).astype(np.int8)  # tie -> 0
    biased = main != optimal
    disagree = np.where(main == 1, runs - ones, ones)  # runs differing from the mode
    signed = np.where(biased, -disagree, disagree)
    total = runs * points
    avg_error = float((biased * runs + signed).sum() / total)
    bias = float(biased.sum() / points)
    net_variance = float(signed.sum() / total)
    return avg_error, bias, net_variance


@dataclass(frozen=True)
class SweepRow:
    scenario: str
    param: str
    value: float
    approach: str
    model: str
    avg_test_error: float
    bias: float
    net_variance: float
    runs: int

    def __post_init__(self):
        if not 0.0 <= self.avg_test_error <= 1.0:
            raise ValueError("avg_test_error must lie in [0, 1]")
        if not 0.0 <= self.bias <= 1.0:
            raise ValueError("bias must lie in [0, 1]")
        if not -1.0 <= self.net_variance <= 1.0:
            raise ValueError("net_variance must lie in [-1, 1]")
        if self.runs < 1:
            raise ValueError("runs must be at least 1")


@dataclass(frozen=True)
class SweepReport:
    rows: tuple[SweepRow, ...]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(SWEEP_CSV_HEADER)
        for r in self.rows:
            writer.writerow([
                r.scenario, r.param, r.value, r.approach, r.model,
                repr(r.avg_test_error), repr(r.bias), repr(r.net_variance), r.runs,
            ])
        return buf.getvalue()

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(self.to_csv())

    def select(self, **fields) -> tuple[SweepRow, ...]:
        out = []
        for row in self.rows:
            if all(getattr(row, k) == v for k, v in fields.items()):
                out.append(row)
        return tuple(out)

    def gap(self, value, a: str = "NoJoin", b: str = "JoinAll", model=None) -> float:
        """Absolute error gap between two approaches at one swept value."""
        kw = {} if model is None else {"model": model}
        (ra,) = self.select(value=value, approach=a, **kw)
        (rb,) = self.select(value=value, approach=b, **kw)
        return abs(ra.avg_test_error - rb.avg_test_error)


@dataclass(frozen=True, eq=False)
class _Cell:
    """Everything fixed for one swept value: the world plus evaluation data."""

    world: SimWorld
    eval_labels: np.ndarray
    optimal: np.ndarray
    eval_star: object


def _build_cell(base_cfg, scenario, param, value, master_seed, test_size) -> _Cell:
    cfg, scen = apply_sweep_value(base_cfg, scenario, param, value)
    world = build_world(cfg, scen, stable_seed(master_seed, param, value, "world"))
    n_eval = test_size if test_size is not None else max(1, cfg.n_s // 4)
    eval_fact = sample_fact(world, n_eval, stable_seed(master_seed, param, value, "test"))
    return _Cell(
        world=world,
        eval_labels=eval_fact.target,
        optimal=world.optimal_labels(eval_fact),
        eval_star=as_star(world, eval_fact),
    )


def _eval_payload(eval_star, approaches, family):
    views = {}
    for name in approaches:
        ds = apply_feature_view(eval_star, FeatureView.parse(name))
        views[name] = one_hot_encode(ds).matrix if needs_encoding(family) else ds.codes
    return views


def _run_one(world, approaches, family, grid, run_seed, eval_views,
             svm_tol, svm_max_passes):
    """One Monte Carlo run: fresh train/validation data, one model per approach."""
    cfg = world.cfg
    train_fact = sample_fact(world, cfg.n_s, (run_seed, "train"))
    val_fact = sample_fact(world, max(1, cfg.n_s // 4), (run_seed, "validation"))
    train_star = as_star(world, train_fact)
    val_star = as_star(world, val_fact)
    out = {}
    for name in approaches:
        view = FeatureView.parse(name)
        train_ds = apply_feature_view(train_star, view)
        val_ds = apply_feature_view(val_star, view)
        _, model = grid_search(train_ds, val_ds, grid, family,
                               svm_tol=svm_tol, svm_max_passes=svm_max_passes)
        out[name] = model.predict(eval_views[name])
    return out


def _run_task(payload):
    world, approaches, family, grid, run_seed, eval_views, svm_tol, svm_max_passes = payload
    return _run_one(world, approaches, family, grid, run_seed, eval_views,
                    svm_tol, svm_max_passes)


def run_monte_carlo(
    base_cfg: SimConfig,
    scenario: ScenarioSpec,
    param: str,
    values,
    approaches=("JoinAll", "NoJoin", "NoFK"),
    family: str = "tree_gini",
    grid: HyperGrid | None = None,
    runs: int = 100,
    master_seed: int = 0,
    test_size: int | None = None,
    jobs: int = 1,
    svm_tol: float = 1e-3,
    svm_max_passes: int = 50,
    details: dict | None = None,
) -> SweepReport:
    """Sweep ``param`` over ``values`` and aggregate per (value, approach).

    ``test_size`` overrides the evaluation set size (default: a quarter of
    the training size) when tighter estimates are wanted.  When a dict is
    passed as ``details`` it is filled with per-run error arrays keyed by
    (value, approach), mainly so tests can observe individual runs.
    """
    if runs < 1:
        raise ValueError("runs must be at least 1")
    if grid is None:
        grid = default_grid(family)
    approaches = tuple(approaches)
    rows = []
    for value in values:
        cell = _build_cell(base_cfg, scenario, param, value, master_seed, test_size)
        eval_views = _eval_payload(cell.eval_star, approaches, family)
        run_seeds = [stable_seed(master_seed, param, value, r) for r in range(runs)]
        payloads = [
            (cell.world, approaches, family, grid, rs, eval_views,
             svm_tol, svm_max_passes)
            for rs in run_seeds
        ]
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                results = list(pool.map(_run_task, payloads, chunksize=1))
        else:
            results = [_run_task(p) for p in payloads]
        for name in approaches:
            preds = np.stack([res[name] for res in results])
            errors = (preds != cell.eval_labels[None, :]).mean(axis=1)
            if details is not None:
                details[(value, name)] = errors
            _, bias, net_var = decompose_bias_variance(preds, cell.optimal)
            rows.append(SweepRow(
                scenario=scenario.kind,
                param=param,
                value=value,
                approach=name,
                model=family,
                avg_test_error=float(errors.mean()),
                bias=bias,
                net_variance=net_var,
                runs=runs,
            ))
    return SweepReport(tuple(rows))
