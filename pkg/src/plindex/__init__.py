"""Error-bounded piecewise-linear approximate index."""

from .errors import (
    CapacityError,
    ConfigError,
    ConstraintError,
    EmptyInputError,
    InfeasibleConstraintError,
    MalformedInputError,
    MissingSampleError,
    PlindexError,
)
from .segmentation import (
    Cone,
    Point,
    Segment,
    max_error,
    non_linearity_ratio,
    optimal_segmentation,
    points_from_keys,
    segment_count_bound,
    shrinking_cone,
    validate_segment,
)
from .index import (
    CLUSTERED,
    NON_CLUSTERED,
    Entry,
    IndexConfig,
    IndexStats,
    SegmentIndex,
    search_window,
)
from .cost_model import (
    CostParams,
    InsertEstimate,
    SegmentCountProfile,
    insert_latency_estimate,
    latency_estimate,
    pick_error_for_budget,
    pick_error_for_latency,
    profile_segments,
    size_estimate,
)

__version__ = "0.1.0"
