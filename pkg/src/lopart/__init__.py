"""Optimal changepoint detection for partially labeled sequences.

The core solvers fit piecewise-constant means under a per-changepoint
penalty: :func:`opart` ignores labels, :func:`lopart` is guaranteed
consistent with 0/1-change region labels, and :func:`lopart_infinite`
is the infinite-penalty limit (one change per positive label, none
elsewhere).  Companion modules score predictions against labels,
learn penalties, cross-validate, benchmark, and serve an interactive
labeling API.
"""

from .core import (
    BRUTE_FORCE_MAX_N,
    DataSequence,
    DpState,
    Label,
    LabelSet,
    LabelValidationError,
    Segmentation,
    brute_force_solve,
    candidate_set_update,
    count_changes,
    dp_solve,
    last_label_index,
    lopart,
    lopart_infinite,
    objective_value,
    opart,
    segment_loss,
    segment_mean,
    validate_labels,
)
from .metrics import (
    CORRECT,
    FALSE_NEGATIVE,
    FALSE_POSITIVE,
    ErrorCounts,
    LabelOutcome,
    RocPoint,
    classify_label,
    roc_curve,
    total_errors,
)
from .penalty import (
    PENALTY_EXPONENTS,
    PENALTY_GRID,
    ErrorCurve,
    PenaltyModel,
    TargetInterval,
    best_constant,
    bic_penalty,
    compute_error_curve,
    fit_linear2,
    predict_penalty,
    target_interval,
)

__version__ = "0.1.0"

__all__ = [
    "BRUTE_FORCE_MAX_N",
    "DataSequence",
    "DpState",
    "Label",
    "LabelSet",
    "LabelValidationError",
    "Segmentation",
    "brute_force_solve",
    "candidate_set_update",
    "count_changes",
    "dp_solve",
    "last_label_index",
    "lopart",
    "lopart_infinite",
    "objective_value",
    "opart",
    "segment_loss",
    "segment_mean",
    "validate_labels",
    "CORRECT",
    "FALSE_NEGATIVE",
    "FALSE_POSITIVE",
    "ErrorCounts",
    "LabelOutcome",
    "RocPoint",
    "classify_label",
    "roc_curve",
    "total_errors",
    "PENALTY_EXPONENTS",
    "PENALTY_GRID",
    "ErrorCurve",
    "PenaltyModel",
    "TargetInterval",
    "best_constant",
    "bic_penalty",
    "compute_error_curve",
    "fit_linear2",
    "predict_penalty",
    "target_interval",
    "__version__",
]
