"""Percentage scales, percentization and percentage coefficients (b_p)."""

from .compare import (
    ComparisonEntry,
    ComparisonReport,
    MediationDecomposition,
    mediation_paths,
    mediation_report,
    pool_datasets,
    relative_impact,
    relative_importance,
)
from .dataset import Dataset, load_csv
from .errors import *  # noqa: F401,F403
from .percentize import (
    PercentizedDataset,
    TransformRecord,
    format_percent,
    min_max_normalize,
    percentize_dataset,
    percentize_value,
    to_percent_scale,
    unpercentize_value,
)
from .regress import (
    BpRegressionResult,
    DesignMatrix,
    build_design,
    fit_ols,
    percent_difference,
    pomp_coefficients,
    rescale_coefficient,
    rescale_result,
    standardized_coefficients,
)
from .scales import (
    AnchorCandidate,
    Kind,
    Provenance,
    Role,
    ScaleAnchor,
    VariableSpec,
    suggest_anchors,
    validate_anchor,
)

__version__ = "0.1.0"
