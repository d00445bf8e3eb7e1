"""Simultaneous orthogonal matching pursuit with exact recovery certificates."""

from .certificates import (
    ErcReport,
    IsometryCertificate,
    OrthogonalityCertificate,
    TraceVerification,
    erc_evaluate,
    lemma1_bound,
    lemma2_bounds,
    ric_exact,
    roc_exact,
    roc_one_exact,
    verify_trace_bounds,
)
from .errors import (
    AsymmetryError,
    BudgetExceededError,
    DimensionError,
    NonConvergenceError,
    RankDeficiencyError,
)
from .experiments import (
    CampaignReport,
    TrialConfig,
    boundary_probe,
    gen_dictionary,
    gen_signal,
    run_campaign,
)
from .greedy import (
    IterationRecord,
    JointSparseSignal,
    RecoveryTrace,
    SupportSet,
    observed_ratio,
    omp,
    somp,
    somp_metric,
)
from .linalg import (
    QrFactorization,
    inf_induced_norm,
    least_squares,
    project_onto_span,
    qr_decompose,
    spectral_norm,
    symmetric_eigen_extremes,
)

__version__ = "0.1.0"
