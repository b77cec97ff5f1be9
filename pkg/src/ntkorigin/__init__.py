"""Two-layer ReLU NTK origin-extrapolation toolkit.

Builds origin-shifted training sets, evaluates the two-layer ReLU neural
tangent kernel in closed form and by Monte Carlo, reproduces the rank-one
asymptotic gram algebra, and measures extrapolation degree near the origin
versus far from the data.
"""

from .errors import (
    BoundaryTooClose,
    ConfigError,
    DegenerateDirection,
    DimensionError,
    DivergenceError,
    EvaluationError,
    FeatureMismatch,
    FitFailure,
    InvalidInput,
    InvalidRegularization,
    NaNError,
    NtkOriginError,
    NumericalFailure,
)
from .geometry import (
    AugmentedPoint,
    Direction,
    LinearTarget,
    Point,
    QuadraticTarget,
    Realization,
    ShiftedTrainingSet,
    SinusoidalTarget,
    TargetFunction,
    augment,
    augment_direction,
    shift_set,
)
from .kernel import (
    ANALYTIC,
    Analytic,
    FeatureSample,
    KernelEstimate,
    KernelMode,
    MonteCarlo,
    agnosticism_rate,
    feature_map,
    indicator,
    kappa,
    limit_indicator,
    ntk,
    sample_features,
)
from .gram import (
    AlphaVector,
    GramMatrix,
    TikhonovConfig,
    DEFAULT_TIKHONOV,
    assemble_gram,
    asymptotic_alpha,
    asymptotic_gram,
    sherman_morrison_inverse,
    tikhonov_solve,
)
from .regression import (
    BetaComponents,
    ClosedFormContext,
    FeatureSpacePredictor,
    PointWisePredictor,
    Predictor,
    beta_bias_sensitivity,
    beta_closed_form,
    beta_from_alpha,
    bias_sensitivity_limit,
    closed_form_context,
    predict,
)
from .calculus import (
    DegreeClass,
    DerivativeEstimate,
    ExtrapolationProfile,
    PascalCoefficients,
    classify,
    default_step,
    directional_derivative,
    fit_profile,
    pascal_coefficients,
    pascal_shift_identity,
    sigma_identity_check,
)
from .mlp import (
    MLPConfig,
    MLPModel,
    evaluate,
    evaluate_batch,
    export_loss_trace,
    init_features,
    init_model,
    parameter_displacement,
    train,
)

__version__ = "0.1.0"
