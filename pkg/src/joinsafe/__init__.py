"""joinsafe: star-schema feature views, desk-scale classifiers, and Monte
Carlo stress tests for skipping key-foreign-key joins."""

from .domains import OTHERS_LABEL, CategoricalDomain, recode_to_others
from .star import (
    Dataset,
    DimensionTable,
    FactTable,
    FeatureView,
    StarSchema,
    ViewMode,
    apply_feature_view,
    materialize_join,
    split_three_way,
    tuple_ratio,
)
from .encoding import EncodedMatrix, one_hot_encode
from .loader import load_star_schema
from .simulate import (
    ScenarioSpec,
    SimConfig,
    SkewSpec,
    build_world,
    gen_onexr,
    gen_reponexr,
    gen_xsxr,
    sample_fact,
    sample_fk,
)
from .montecarlo import SweepReport, decompose_bias_variance, run_monte_carlo
from .advisor import Recommendation, ThresholdTable, recommend

__version__ = "0.1.0"
