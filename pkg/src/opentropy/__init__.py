"""Entropy of contractions on weighted sequence spaces.

The functional core lives in :mod:`opentropy.measure`,
:mod:`opentropy.operators`, :mod:`opentropy.mu_norm`,
:mod:`opentropy.stochastic` and :mod:`opentropy.entropy`;
:mod:`opentropy.estimators` wraps it in scikit-learn style estimators.
"""

__version__ = "0.1.0"

from .entropy import (
    EntropyReport,
    PathWeightTable,
    entropy_rate,
    enumerate_path_weights,
    exact_entropy,
    exact_entropy_sb,
    h1_partition_entropy,
    invariance_suite,
    is_zero_entropy,
    partition_entropy,
    path_weights,
    truncation_entropy_series,
)
from .exceptions import (
    BudgetExceededError,
    MeasureError,
    NotContractionError,
    NotSemibistochasticError,
    NumericalDiagnosticError,
    OpentropyError,
    RankAmbiguityError,
    SpecError,
    ValidationError,
)
from .measure import (
    Measure,
    WeightedVector,
    entropy_of_measure,
    inner_l2mu,
    norm_l1,
    norm_l1mu,
    norm_l2mu,
)
from .mu_norm import (
    Partition,
    koopman_product_norm_sq,
    mu_norm_sq,
    partition_functional,
    sandwiched_norm_sq,
)
from .operators import (
    DenseMatrix,
    OperatorSpec,
    adjoint,
    compose,
    is_contraction,
    operator_norm,
    truncate,
)
from .stochastic import (
    ErgodicData,
    SBMatrix,
    a_seq,
    a_table,
    averaged_operator,
    b_entries,
    b_map,
    cesaro_average,
    ergodic_projector,
    l1_operator_norm,
    u_limit,
    u_limits,
    validate_sb,
)

PartitionOfIndices = Partition

__all__ = [
    "__version__",
    "a_seq",
    "a_table",
    "adjoint",
    "averaged_operator",
    "b_entries",
    "b_map",
    "BudgetExceededError",
    "cesaro_average",
    "compose",
    "DenseMatrix",
    "entropy_of_measure",
    "entropy_rate",
    "EntropyReport",
    "enumerate_path_weights",
    "ergodic_projector",
    "ErgodicData",
    "exact_entropy",
    "exact_entropy_sb",
    "h1_partition_entropy",
    "inner_l2mu",
    "invariance_suite",
    "is_contraction",
    "is_zero_entropy",
    "koopman_product_norm_sq",
    "l1_operator_norm",
    "Measure",
    "MeasureError",
    "mu_norm_sq",
    "norm_l1",
    "norm_l1mu",
    "norm_l2mu",
    "NotContractionError",
    "NotSemibistochasticError",
    "NumericalDiagnosticError",
    "OpentropyError",
    "operator_norm",
    "OperatorSpec",
    "Partition",
    "partition_entropy",
    "partition_functional",
    "PartitionOfIndices",
    "path_weights",
    "PathWeightTable",
    "RankAmbiguityError",
    "sandwiched_norm_sq",
    "SBMatrix",
    "SpecError",
    "truncate",
    "truncation_entropy_series",
    "u_limit",
    "u_limits",
    "validate_sb",
    "ValidationError",
    "WeightedVector",
]
