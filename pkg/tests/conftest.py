import numpy as np
import pytest

from joinsafe.domains import CategoricalDomain, index_domain
from joinsafe.star import Dataset, DimensionTable, FactTable, StarSchema


def random_star(rng, n_rows=20, q=2, d_s=2, d_r=2, n_r=5) -> StarSchema:
    """A small random star schema for property and oracle tests."""
    dims = []
    for j in range(q):
        feats = tuple(
            rng.integers(0, 3, size=n_r).astype(np.int32) for _ in range(d_r)
        )
        dims.append(DimensionTable(
            rid_domain=index_domain(f"fk{j}", n_r),
            features=feats,
            feature_domains=tuple(
                index_domain(f"fk{j}.x{f}", 3) for f in range(d_r)
            ),
        ))
    fact = FactTable(
        row_ids=np.arange(n_rows),
        target=rng.integers(0, 2, size=n_rows),
        home_features=tuple(
            rng.integers(0, 3, size=n_rows).astype(np.int32) for _ in range(d_s)
        ),
        home_domains=tuple(index_domain(f"xs{i}", 3) for i in range(d_s)),
        fk_columns=tuple(
            rng.integers(0, n_r, size=n_rows).astype(np.int32) for _ in range(q)
        ),
        fk_domains=tuple(index_domain(f"fk{j}", n_r) for j in range(q)),
    )
    return StarSchema(fact, tuple(dims), tuple(range(q)))


def random_dataset(rng, n_rows=20, widths=(3, 3, 2)) -> Dataset:
    domains = tuple(index_domain(f"f{i}", w) for i, w in enumerate(widths))
    codes = np.column_stack([
        rng.integers(0, w, size=n_rows) for w in widths
    ]).astype(np.int32)
    labels = rng.integers(0, 2, size=n_rows)
    return Dataset(domains, codes, labels)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
