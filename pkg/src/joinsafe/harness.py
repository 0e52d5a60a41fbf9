"""Configuration-driven experiment execution and report emission.

A run is (mode, YAML config, output directory).  Every mode writes UTF-8
CSV reports with headers plus a flat ``manifest.csv`` echoing the effective
configuration and seeds.  Report files are byte-identical for identical
(config, seed); the manifest additionally records wall-clock timings and is
the one output excluded from that guarantee.  On failure, files written by
the current run are removed before the error propagates.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .advisor import ThresholdTable, recommend
from .classifiers.grids import FAMILIES, HyperGrid, default_grid
from .errors import ConfigError
from .experiments import compression_trial, evaluate_star, smoothing_trial
from .fk_tools import smooth_random, smooth_xr, unseen_codes
from .loader import load_star_schema
from .montecarlo import SweepReport, run_monte_carlo
from .simulate import ScenarioSpec, SimConfig, SkewSpec
from .star import FeatureView, apply_feature_view, split_three_way

MODES = ("simulate", "experiment", "advise", "compress", "smooth")
_DEFAULT_APPROACHES = ("JoinAll", "NoJoin", "NoFK")


@dataclass
class ExperimentConfig:
    """Validated union of all mode settings; unused keys stay at defaults."""

    mode: str
    seed: int = 0
    runs: int = 100
    jobs: int = 1
    out: str = "out"
    # simulate / smooth
    scenario: str = "onexr"
    scenario_params: dict = field(default_factory=dict)
    base: dict = field(default_factory=dict)
    sweep: dict = field(default_factory=dict)
    approaches: tuple[str, ...] = _DEFAULT_APPROACHES
    families: tuple[str, ...] = ("tree_gini",)
    grids: dict = field(default_factory=dict)
    test_size: int | None = None
    # experiment / advise / compress / smooth on real data
    dataset: str | None = None
    thresholds: dict = field(default_factory=dict)
    # compress / smooth
    fk: str | None = None
    budgets: tuple[int, ...] = (2, 4, 8, 16)
    hash_seeds: tuple[int, ...] = (0, 1, 2, 3, 4)
    evaluate: bool = False
    unseen_fractions: tuple[float, ...] = (0.1, 0.3, 0.5)
    methods: tuple[str, ...] = ("none", "random", "xr")
    trials: int = 5

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if self.runs < 1:
            raise ConfigError("runs must be at least 1")
        if self.jobs < 1:
            raise ConfigError("jobs must be at least 1")
        self.approaches = tuple(self.approaches)
        for a in self.approaches:
            FeatureView.parse(a)
        self.families = tuple(self.families)
        for f in self.families:
            if f not in FAMILIES:
                raise ConfigError(f"unknown model family {f!r}")
        if self.dataset is not None and not Path(self.dataset).exists():
            raise ConfigError(f"dataset manifest not found: {self.dataset}")


def load_config(path, mode: str | None = None, **overrides) -> ExperimentConfig:
    """Load a YAML config; CLI flags passed as ``overrides`` win over file keys."""
    raw = {}
    if path is not None:
        p = Path(path)
        if not p.exists():
            raise ConfigError(f"config file not found: {p}")
        with open(p, encoding="utf-8") as f:
            raw = yaml.safe_load(f) or {}
        if not isinstance(raw, dict):
            raise ConfigError("config file must be a mapping")
    if mode is not None:
        raw["mode"] = mode
    for key, value in overrides.items():
        if value is not None:
            raw[key] = value
    if "mode" not in raw:
        raise ConfigError("a mode is required (subcommand or config key)")
    known = {f for f in ExperimentConfig.__dataclass_fields__}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    # resolve dataset path relative to the config file
    if raw.get("dataset") is not None and path is not None:
        ds = Path(raw["dataset"])
        if not ds.is_absolute():
            raw["dataset"] = str((Path(path).parent / ds).resolve())
    try:
        return ExperimentConfig(**raw)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def _sim_config(cfg: ExperimentConfig) -> SimConfig:
    base = dict(n_s=1000, n_r=40, d_s=4, d_r=4)
    base.update(cfg.base or {})
    return SimConfig(seed=cfg.seed, **base)


def _scenario(cfg: ExperimentConfig) -> ScenarioSpec:
    params = dict(cfg.scenario_params or {})
    skew = params.pop("fk_skew", None)
    if skew is not None:
        skew = SkewSpec(**skew) if isinstance(skew, dict) else SkewSpec(kind=str(skew))
        params["fk_skew"] = skew
    return ScenarioSpec(kind=cfg.scenario, **params)


def _grid_for(cfg: ExperimentConfig, family: str) -> HyperGrid:
    spec = (cfg.grids or {}).get(family)
    if spec is None:
        return default_grid(family)
    if isinstance(spec, list):
        return HyperGrid.from_dicts(family, spec)
    # mapping of axis name -> values: full cross product in declared order
    axes = [(k, list(v)) for k, v in spec.items()]
    combos = [{}]
    for name, values in axes:
        combos = [dict(c, **{name: v}) for c in combos for v in values]
    return HyperGrid.from_dicts(family, combos)


class _RunOutputs:
    """Tracks files written by one run so failures can clean up."""

    def __init__(self, out_dir: Path):
        self.dir = out_dir
        self.dir.mkdir(parents=True, exist_ok=True)
        self.written: list[Path] = []

    def path(self, name: str) -> Path:
        p = self.dir / name
        self.written.append(p)
        return p

    def discard_all(self) -> None:
        for p in self.written:
            try:
                p.unlink(missing_ok=True)
            except OSError:
                pass


def _write_rows(path: Path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _write_manifest(out: _RunOutputs, cfg: ExperimentConfig, timings: dict) -> None:
    rows = []
    for name in sorted(ExperimentConfig.__dataclass_fields__):
        rows.append((name, json.dumps(getattr(cfg, name), default=list)))
    for key, secs in sorted(timings.items()):
        rows.append((f"seconds.{key}", f"{secs:.3f}"))
    _write_rows(out.path("manifest.csv"), ("key", "value"), rows)


def emit_plot_data(report: SweepReport, group_by=("param", "value", "approach")):
    """Long-format rows (one per group) with mean error and net variance,
    sorted by swept value then approach."""
    if not report.rows:
        raise ValueError("cannot emit plot data from an empty report")
    groups: dict[tuple, list] = {}
    for row in report.rows:
        key = tuple(getattr(row, k) for k in group_by)
        groups.setdefault(key, []).append(row)
    out = []
    for key in sorted(groups, key=lambda k: tuple(str(x) if isinstance(x, str) else x for x in k)):
        members = groups[key]
        out.append(key + (
            sum(r.avg_test_error for r in members) / len(members),
            sum(r.net_variance for r in members) / len(members),
        ))
    return tuple(group_by) + ("mean_error", "mean_net_variance"), out


def run_experiment(config: ExperimentConfig) -> list[Path]:
    """Execute one configured run; returns the written file paths."""
    out = _RunOutputs(Path(config.out))
    timings: dict[str, float] = {}
    try:
        if config.mode == "simulate":
            _mode_simulate(config, out, timings)
        elif config.mode == "experiment":
            _mode_experiment(config, out, timings)
        elif config.mode == "advise":
            _mode_advise(config, out)
        elif config.mode == "compress":
            _mode_compress(config, out)
        elif config.mode == "smooth":
            _mode_smooth(config, out)
        _write_manifest(out, config, timings)
    except Exception:
        out.discard_all()
        raise
    return list(out.written)


def _mode_simulate(config, out, timings) -> None:
    sweep = config.sweep or {}
    param = sweep.get("param", "p")
    values = sweep.get("values")
    if values is None:
        scenario = _scenario(config)
        values = [scenario.p] if param == "p" else [getattr(_sim_config(config), param)]
    all_rows = []
    for family in config.families:
        t0 = time.perf_counter()
        report = run_monte_carlo(
            _sim_config(config),
            _scenario(config),
            param,
            values,
            approaches=config.approaches,
            family=family,
            grid=_grid_for(config, family),
            runs=config.runs,
            master_seed=config.seed,
            test_size=config.test_size,
            jobs=config.jobs,
        )
        timings[family] = time.perf_counter() - t0
        all_rows.extend(report.rows)
    report = SweepReport(tuple(all_rows))
    with open(out.path("report.csv"), "w", encoding="utf-8", newline="") as f:
        f.write(report.to_csv())
    header, rows = emit_plot_data(report)
    _write_rows(out.path("plot.csv"), header, rows)


def _mode_experiment(config, out, timings) -> None:
    if config.dataset is None:
        raise ConfigError("experiment mode requires a dataset manifest")
    star = load_star_schema(config.dataset)
    grids = {f: _grid_for(config, f) for f in config.families}
    results = evaluate_star(star, config.approaches, config.families, config.seed, grids)
    rows = []
    for r in results:
        timings[f"{r.family}.{r.approach}"] = r.seconds
        rows.append((
            r.approach, r.family, json.dumps(r.params, sort_keys=True),
            repr(r.train_accuracy), repr(r.test_accuracy),
            r.correct, r.test_size - r.correct, r.test_size,
        ))
    _write_rows(
        out.path("accuracy.csv"),
        ("approach", "family", "params", "train_accuracy", "test_accuracy",
         "correct", "incorrect", "test_size"),
        rows,
    )


def _mode_advise(config, out) -> None:
    if config.dataset is None:
        raise ConfigError("advise mode requires a dataset manifest")
    star = load_star_schema(config.dataset)
    train, _, _ = split_three_way(star, config.seed)
    table = ThresholdTable({**dict(ThresholdTable().thresholds), **(config.thresholds or {})})
    rows = []
    for family in config.families:
        rec = recommend(star, train.n_rows, family, table)
        rows.extend(
            (v.dimension, repr(v.tuple_ratio), v.verdict, v.family,
             repr(v.threshold), v.note)
            for v in rec.rows
        )
        for v in rec.rows:
            print(f"{v.dimension:>20}  ratio={v.tuple_ratio:8.2f}  {v.verdict:>13}  "
                  f"[{v.family}, threshold {v.threshold:g}]")
    _write_rows(
        out.path("verdicts.csv"),
        ("dimension", "tuple_ratio", "verdict", "family", "threshold", "note"),
        rows,
    )


def _source_splits(config):
    """(train, validation, test) datasets for compress/smooth on real data."""
    star = load_star_schema(config.dataset)
    train, validation, test = split_three_way(star, config.seed)
    view = FeatureView.parse("NoJoin")
    return (
        apply_feature_view(train, view),
        apply_feature_view(validation, view),
        apply_feature_view(test, view),
        star,
    )


def _mode_compress(config, out) -> None:
    if config.dataset is None:
        raise ConfigError("compress mode requires a dataset manifest")
    train, validation, test, star = _source_splits(config)
    fk = config.fk or star.fact.fk_domains[0].name
    results = compression_trial(
        train, validation, test, fk, config.budgets,
        hash_seeds=config.hash_seeds, family=config.families[0],
        grid=_grid_for(config, config.families[0]), evaluate=config.evaluate,
    )
    rows = []
    for r in results:
        rows.append((r.budget, r.method, repr(r.conditional_entropy_bits),
                     "" if r.test_accuracy is None else repr(r.test_accuracy)))
        r.map.write_csv(out.path(f"map_{r.method}_l{r.budget}.csv"))
    _write_rows(
        out.path("compression.csv"),
        ("budget", "method", "conditional_entropy_bits", "test_accuracy"),
        rows,
    )


def _mode_smooth(config, out) -> None:
    if config.dataset is not None:
        train, validation, test, star = _source_splits(config)
        fk = config.fk or star.fact.fk_domains[0].name
        fk_idx = train.feature_names.index(fk)
        m = star.dims[0].n_rows
        unseen = unseen_codes(train.column(fk), m)
        seen = [c for c in range(m) if c not in set(unseen.tolist())]
        rows = []
        for method in config.methods:
            if method == "none":
                continue
            smap = (smooth_random(unseen, seen, config.seed) if method == "random"
                    else smooth_xr(unseen, seen, star.dims[0], config.seed))
            smap.write_csv(out.path(f"smoothing_map_{method}.csv"))
            rows.append((method, len(unseen), len(seen)))
        _write_rows(out.path("smoothing.csv"), ("method", "unseen", "seen"), rows)
        return
    rows = []
    for gamma in config.unseen_fractions:
        results = smoothing_trial(
            _sim_config(config), _scenario(config), gamma,
            methods=config.methods, family=config.families[0],
            grid=_grid_for(config, config.families[0]),
            trials=config.trials, master_seed=config.seed,
            test_size=config.test_size,
        )
        rows.extend((r.unseen_fraction, r.method, repr(r.test_error), r.trials)
                    for r in results)
    _write_rows(
        out.path("smoothing.csv"),
        ("unseen_fraction", "method", "test_error", "trials"),
        rows,
    )
