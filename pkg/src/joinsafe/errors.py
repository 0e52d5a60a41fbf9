"""Exception types shared across the package."""


class SchemaError(ValueError):
    """A table, domain, or star schema violates a structural invariant."""


class ReferentialIntegrityError(SchemaError):
    """A foreign key value has no matching row in its dimension table."""


class EncodingError(ValueError):
    """A categorical code falls outside its declared domain."""


class DegenerateModelError(ValueError):
    """Training data cannot support a model (e.g. a single-class label column)."""


class GridSearchError(ValueError):
    """Every hyper-parameter combination failed to train."""


class ConfigError(ValueError):
    """An experiment configuration or dataset manifest is invalid."""
