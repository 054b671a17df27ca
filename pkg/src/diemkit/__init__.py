"""diemkit: dimension-insensitive Euclidean metric and dimensionality studies."""

from .calibration import (
    DEFAULT_CALIBRATION_TRIALS,
    DiemCalibration,
    OrthogonalStrategy,
    calibrate,
    diem_rows,
    diem_value,
    expected_distance_analytic,
    format_calibration,
    load_calibration,
    orthogonal_reference,
    save_calibration,
)
from .domain import (
    DomainSpec,
    Gaussian,
    SeedSpec,
    SignDomain,
    Uniform,
    UnitSphere,
    default_gaussian,
)
from .embedio import (
    ComparisonMode,
    ComparisonReport,
    EmbeddingCollection,
    EmbeddingRecord,
    FileFormat,
    compare_all_pairs,
    compare_pairwise,
    format_report,
    load_collection,
    save_collection,
    save_report,
)
from .errors import (
    CalibrationMismatchError,
    ConstraintViolationError,
    DegenerateDistributionError,
    DiemKitError,
    DimensionMismatchError,
    DuplicateIdError,
    EmptySampleError,
    InsufficientDataError,
    InsufficientSamplesError,
    ParseError,
    UndefinedSimilarityError,
)
from .estimator import DiemTransformer
from .metrics import (
    CosineConvention,
    MetricKind,
    cosine_from_distance,
    cosine_similarity,
    euclidean_distance,
    manhattan_distance,
    normalized_euclidean_distance,
)
from .simulation import (
    DEFAULT_DIMS,
    ConvergenceResult,
    SweepConfig,
    SweepResult,
    convergence_check,
    manhattan_growth_check,
    normality_transition,
    run_sweep,
)
from .stats import (
    DistributionSummary,
    Histogram,
    TestResult,
    histogram,
    ks_normal_test,
    summarize,
    z_test,
)
from .vecgen import sample_gaussian, sample_uniform, sample_unit_sphere

__version__ = "0.1.0"
