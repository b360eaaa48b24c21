"""Elastic functional principal component regression.

Functions with both phase (timing) and amplitude variability are aligned
through their square-root slope representations, decomposed with
vertical, horizontal, or combined functional PCA, and their principal
coefficients drive linear, logistic, or multinomial regression.
"""

from .alignment import AlignedSet, align_set, amplitude_distance, optimal_warp, warp_cost
from .errors import (
    ConvergenceError,
    DegenerateLabelsError,
    DegeneratePhaseWarning,
    GridMismatchError,
    InjectivityRadiusError,
    InvalidGridError,
    InvalidWarpError,
    ParameterError,
    ParseError,
    RankDeficiencyError,
    StratificationError,
    UndefinedLogError,
)
from .fpca import (
    FpcaModel,
    combined_fpca,
    estimate_phase_weight,
    horizontal_fpca,
    load_fpca_model,
    principal_paths,
    project,
    save_fpca_model,
    standard_fpca,
    vertical_fpca,
)
from .harness import (
    CvReport,
    Dataset,
    METHODS,
    cross_validate,
    dataset_from_training,
    emit_alignment_plotdata,
    emit_report,
    kfold_cv,
    load_dataset,
    make_folds,
    save_dataset,
    simulation_study,
)
from .numerics import (
    SampledFunction,
    cumulative_integral,
    gradient,
    inner_product,
    integrate,
    l2_norm,
    resample,
    uniform_grid,
)
from .regression import (
    RegressionModel,
    TrainingData,
    fit_linear,
    fit_logistic,
    fit_multinomial,
    load_regression_model,
    logistic_loglik_grad,
    multinomial_loglik_grad,
    predict,
    predict_class,
    quasi_newton_maximize,
    save_regression_model,
)
from .simulation import ScenarioSpec, beta_true, generate, linear_response, scenario_spec
from .srsf import Srsf, from_srsf, srsf_distance, to_srsf, warp_srsf
from .warp_geometry import (
    PsiFunction,
    ShootingVector,
    WarpingFunction,
    apply_warp,
    compose_warps,
    exp_map,
    from_psi,
    identity_psi,
    identity_warp,
    inv_exp_map,
    invert_warp,
    phase_distance,
    random_warp,
    tangent_project,
    to_psi,
    warp_karcher_mean,
)

__version__ = "0.1.0"
