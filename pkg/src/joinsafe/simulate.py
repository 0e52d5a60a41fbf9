"""Synthetic two-table star schemas with controlled true distributions.

Three scenarios stress how safe it is to drop the dimension table's feature
columns and lean on the foreign key alone:

``onexr``
    One foreign feature (column 0 of the dimension table) drives the label;
    everything else is coin-flip noise.  ``P(wrong label | x_r) = p`` on both
    halves of x_r's domain, so the Bayes error is exactly ``p``.
``xsxr``
    A dense true probability table over all boolean [home, foreign] patterns
    with a deterministic label per pattern (zero Bayes error).
``reponexr``
    Like ``onexr`` but every foreign column repeats x_r, inflating the
    foreign-key domain relative to the distinct foreign rows.

A "world" (the dimension table plus the true distribution) is built once
from a seed; fact tables of any size can then be sampled from it.  The
``gen_*`` helpers bundle that into the (train, validation, test) triple with
validation and test a quarter of the training size.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .domains import CategoricalDomain, binary_domain, index_domain
from .errors import ConfigError
from .star import DimensionTable, FactTable, StarSchema
from .util import rng_from

MAX_PATTERN_BITS = 20


@dataclass(frozen=True)
class SimConfig:
    n_s: int
    n_r: int
    d_s: int
    d_r: int
    seed: int = 0

    def __post_init__(self):
        if self.n_r < 2:
            raise ConfigError("n_r must be at least 2")
        if self.n_s < 1:
            raise ConfigError("n_s must be at least 1")
        if self.d_s < 0:
            raise ConfigError("d_s cannot be negative")
        if self.d_r < 1:
            raise ConfigError("d_r must be at least 1")


@dataclass(frozen=True)
class SkewSpec:
    """Distribution of foreign-key values: uniform, Zipf, or needle-and-thread."""

    kind: str = "uniform"
    s: float = 0.0
    needle_prob: float = 0.0

    def __post_init__(self):
        if self.kind not in ("uniform", "zipf", "needle_thread"):
            raise ConfigError(f"unknown skew kind {self.kind!r}")
        if self.s < 0:
            raise ConfigError("zipf exponent cannot be negative")
        if not 0.0 <= self.needle_prob <= 1.0:
            raise ConfigError("needle_prob must lie in [0, 1]")


UNIFORM_SKEW = SkewSpec()


@dataclass(frozen=True)
class ScenarioSpec:
    kind: str
    p: float = 0.1
    fk_skew: SkewSpec = UNIFORM_SKEW
    xr_domain_size: int = 2

    def __post_init__(self):
        if self.kind not in ("onexr", "xsxr", "reponexr"):
            raise ConfigError(f"unknown scenario {self.kind!r}")
        if not 0.0 <= self.p <= 0.5:
            raise ConfigError("probability skew p must lie in [0, 0.5]")
        if self.xr_domain_size < 2:
            raise ConfigError("xr_domain_size must be at least 2")
        if self.kind != "onexr" and self.xr_domain_size != 2:
            raise ConfigError("xr_domain_size is only adjustable for onexr")
        if self.kind == "xsxr" and self.fk_skew.kind != "uniform":
            raise ConfigError("xsxr assigns FKs by matching foreign rows; no skew applies")


def sample_fk(skew: SkewSpec, n: int, n_r: int, seed) -> np.ndarray:
    """Draw ``n`` foreign-key codes from [0, n_r) under the given skew.

    Zipf puts probability proportional to ``(k+1)**-s`` on code k;
    needle-and-thread puts ``needle_prob`` on code 0 and splits the rest
    evenly over the other codes.
    """
    if n_r < 1:
        raise ConfigError("n_r must be at least 1")
    rng = seed if isinstance(seed, np.random.Generator) else rng_from(seed, "fk")
    if skew.kind == "uniform":
        return rng.integers(0, n_r, size=n).astype(np.int32)
    if skew.kind == "zipf":
        weights = np.arange(1, n_r + 1, dtype=np.float64) ** (-skew.s)
        probs = weights / weights.sum()
    else:
        if n_r == 1:
            if skew.needle_prob < 1.0:
                raise ConfigError("needle-and-thread needs a second code for the thread")
            return np.zeros(n, dtype=np.int32)
        probs = np.full(n_r, (1.0 - skew.needle_prob) / (n_r - 1))
        probs[0] = skew.needle_prob
    return rng.choice(n_r, size=n, p=probs).astype(np.int32)


def _optimal_for_xr(xr_codes: np.ndarray, domain_size: int) -> np.ndarray:
    """Majority label given x_r: 1 on the lower half of the domain, 0 above."""
    lower = (domain_size + 1) // 2
    return (np.asarray(xr_codes) < lower).astype(np.int8)


@dataclass(frozen=True, eq=False)
class SimWorld:
    """Fixed dimension table plus the true distribution for one scenario."""

    cfg: SimConfig
    scenario: ScenarioSpec
    dim: DimensionTable
    # xsxr only: surviving probability-table entries
    tpt_probs: np.ndarray | None = None
    tpt_xs: np.ndarray | None = None
    tpt_labels: np.ndarray | None = None
    tpt_rids: tuple[np.ndarray, ...] | None = None

    @property
    def xr_column(self) -> np.ndarray:
        return self.dim.features[0]

    def optimal_labels(self, fact: FactTable) -> np.ndarray:
        """Bayes-optimal label for each fact row (the generators know the truth)."""
        if self.scenario.kind == "xsxr":
            return fact.target.copy()
        xr = self.xr_column[fact.fk_columns[0]]
        return _optimal_for_xr(xr, self.scenario.xr_domain_size)


def _home_domains(d_s: int) -> tuple[CategoricalDomain, ...]:
    return tuple(binary_domain(f"xs{i}") for i in range(d_s))


def _foreign_domains(d_r: int, xr_domain_size: int) -> tuple[CategoricalDomain, ...]:
    first = (
        binary_domain("xr0")
        if xr_domain_size == 2
        else index_domain("xr0", xr_domain_size)
    )
    return (first,) + tuple(binary_domain(f"xr{i}") for i in range(1, d_r))


def build_world(cfg: SimConfig, scenario: ScenarioSpec, seed) -> SimWorld:
    rng = rng_from(seed, "world")
    if scenario.kind == "xsxr":
        return _build_xsxr_world(cfg, scenario, rng)
    xr_size = scenario.xr_domain_size
    if scenario.kind == "reponexr":
        xr = rng.integers(0, 2, size=cfg.n_r).astype(np.int32)
        features = tuple(xr.copy() for _ in range(cfg.d_r))
    else:
        xr = rng.integers(0, xr_size, size=cfg.n_r).astype(np.int32)
        features = (xr,) + tuple(
            rng.integers(0, 2, size=cfg.n_r).astype(np.int32)
            for _ in range(cfg.d_r - 1)
        )
    dim = DimensionTable(
        rid_domain=index_domain("fk", cfg.n_r),
        features=features,
        feature_domains=_foreign_domains(cfg.d_r, xr_size if scenario.kind == "onexr" else 2),
    )
    return SimWorld(cfg=cfg, scenario=scenario, dim=dim)


def _build_xsxr_world(cfg: SimConfig, scenario: ScenarioSpec, rng) -> SimWorld:
    bits_total = cfg.d_s + cfg.d_r
    if bits_total > MAX_PATTERN_BITS:
        raise ConfigError(
            f"xsxr tabulates all 2^(d_s + d_r) patterns; {bits_total} bits is too many"
        )
    n_patterns = 1 << bits_total
    pattern_ids = np.arange(n_patterns, dtype=np.int64)
    bits = ((pattern_ids[:, None] >> np.arange(bits_total - 1, -1, -1)) & 1).astype(np.int32)
    xs_bits, xr_bits = bits[:, : cfg.d_s], bits[:, cfg.d_s:]

    probs = rng.uniform(size=n_patterns)
    probs /= probs.sum()
    labels = rng.integers(0, 2, size=n_patterns).astype(np.int8)

    # Sample the dimension rows from the foreign-pattern marginal.
    xr_ids = np.zeros(n_patterns, dtype=np.int64)
    for b in range(cfg.d_r):
        xr_ids = (xr_ids << 1) | xr_bits[:, b]
    marginal = np.bincount(xr_ids, weights=probs, minlength=1 << cfg.d_r)
    marginal /= marginal.sum()
    drawn = rng.choice(1 << cfg.d_r, size=cfg.n_r, p=marginal)
    dim_feature_bits = ((drawn[:, None] >> np.arange(cfg.d_r - 1, -1, -1)) & 1).astype(np.int32)
    dim = DimensionTable(
        rid_domain=index_domain("fk", cfg.n_r),
        features=tuple(dim_feature_bits[:, b] for b in range(cfg.d_r)),
        feature_domains=_foreign_domains(cfg.d_r, 2),
    )

    # Zero out entries whose foreign pattern missed the dimension sample, renormalize.
    present = np.isin(xr_ids, drawn)
    survived = probs * present
    survived /= survived.sum()
    keep = np.flatnonzero(survived > 0)
    rids_per_pattern = tuple(
        np.flatnonzero(drawn == int(xr_ids[entry])).astype(np.int32) for entry in keep
    )
    return SimWorld(
        cfg=cfg,
        scenario=scenario,
        dim=dim,
        tpt_probs=survived[keep],
        tpt_xs=xs_bits[keep],
        tpt_labels=labels[keep],
        tpt_rids=rids_per_pattern,
    )


def sample_fact(world: SimWorld, n: int, seed,
                fk_subset: np.ndarray | None = None) -> FactTable:
    """Draw ``n`` labeled fact rows from the world's true distribution.

    ``fk_subset`` (onexr/reponexr only) restricts the foreign-key draw to the
    given codes before labels are assigned; labels stay consistent with the
    drawn key's foreign row.  Used to manufacture training splits that leave
    part of the FK domain unseen.
    """
    cfg, scenario = world.cfg, world.scenario
    rng = seed if isinstance(seed, np.random.Generator) else rng_from(seed, "fact")
    if scenario.kind == "xsxr":
        if fk_subset is not None:
            raise ConfigError("fk_subset does not apply to the xsxr scenario")
        entries = rng.choice(len(world.tpt_probs), size=n, p=world.tpt_probs)
        home = tuple(world.tpt_xs[entries, i] for i in range(cfg.d_s))
        target = world.tpt_labels[entries]
        fk = np.empty(n, dtype=np.int32)
        for row, entry in enumerate(entries):
            rids = world.tpt_rids[entry]
            fk[row] = rids[rng.integers(0, len(rids))]
    else:
        home = tuple(
            rng.integers(0, 2, size=n).astype(np.int32) for _ in range(cfg.d_s)
        )
        if fk_subset is None:
            fk = sample_fk(scenario.fk_skew, n, cfg.n_r, rng)
        else:
            subset = np.asarray(fk_subset, dtype=np.int32)
            fk = subset[sample_fk(scenario.fk_skew, n, len(subset), rng)]
        xr = world.xr_column[fk]
        optimal = _optimal_for_xr(xr, scenario.xr_domain_size)
        flips = rng.random(n) < scenario.p
        target = np.where(flips, 1 - optimal, optimal).astype(np.int8)
    return FactTable(
        row_ids=np.arange(n),
        target=target,
        home_features=home,
        home_domains=_home_domains(cfg.d_s),
        fk_columns=(fk,),
        fk_domains=(index_domain("fk", cfg.n_r),),
    )


def as_star(world: SimWorld, fact: FactTable) -> StarSchema:
    return StarSchema(fact, (world.dim,), (0,))


def _generate_triple(cfg: SimConfig, scenario: ScenarioSpec):
    world = build_world(cfg, scenario, cfg.seed)
    train = as_star(world, sample_fact(world, cfg.n_s, (cfg.seed, "train")))
    validation = as_star(world, sample_fact(world, cfg.n_s // 4, (cfg.seed, "validation")))
    test = as_star(world, sample_fact(world, cfg.n_s // 4, (cfg.seed, "test")))
    return train, validation, test


def gen_onexr(cfg: SimConfig, scenario: ScenarioSpec):
    """(train, validation, test) stars for the lone-foreign-feature scenario."""
    if scenario.kind != "onexr":
        raise ConfigError("gen_onexr requires an onexr scenario")
    return _generate_triple(cfg, scenario)


def gen_xsxr(cfg: SimConfig):
    """(train, validation, test) stars for the dense-pattern-table scenario."""
    return _generate_triple(cfg, ScenarioSpec(kind="xsxr"))


def gen_reponexr(cfg: SimConfig, scenario: ScenarioSpec):
    """(train, validation, test) stars with x_r replicated across all foreign columns."""
    if scenario.kind != "reponexr":
        raise ConfigError("gen_reponexr requires a reponexr scenario")
    return _generate_triple(cfg, scenario)


def apply_sweep_value(cfg: SimConfig, scenario: ScenarioSpec, param: str, value):
    """Return (cfg, scenario) with one swept parameter replaced."""
    if param in ("n_s", "n_r", "d_s", "d_r"):
        return replace(cfg, **{param: int(value)}), scenario
    if param == "p":
        return cfg, replace(scenario, p=float(value))
    if param == "xr_domain_size":
        return cfg, replace(scenario, xr_domain_size=int(value))
    if param == "zipf_s":
        return cfg, replace(scenario, fk_skew=SkewSpec("zipf", s=float(value)))
    if param == "needle_prob":
        return cfg, replace(scenario, fk_skew=SkewSpec("needle_thread", needle_prob=float(value)))
    raise ConfigError(f"unknown sweep parameter {param!r}")
