"""Smooth-and-match estimation of drift parameters in ergodic diffusions.

A kernel density estimate of the invariant law is plugged into the
stationary Fokker-Planck identity ``mu * pi - (sigma^2 / 2) pi' = 0`` and the
drift parameter is chosen to make the weighted residual small.
"""

from .baselines import (
    LikelihoodParts,
    OneStepResult,
    efficiency_bound,
    kessler_estimator,
    one_step,
    ou_fisher_information,
    ou_loglik,
    ou_mle,
)
from .errors import (
    ConfigurationError,
    DegenerateSampleError,
    DivergenceError,
    NumericalError,
    ParameterDomainError,
    SingularStepError,
    SmoothMatchError,
)
from .harness import ExperimentConfig, MonteCarloReport, reproduce_table1, run_experiment, write_report
from .kde import (
    DensityEstimate,
    Kernel,
    QuadratureGrid,
    WeightFunction,
    biweight4_kernel,
    empirical_wise,
    kde_deriv_eval,
    kde_eval,
    kernel_moment,
    default_weight,
    validate_kernel,
    weight_lambda,
)
from .models import (
    DEFAULT_THETA_SPACE,
    DOUBLE_WELL_DRIFT,
    DRIFTS,
    OU_DRIFT,
    DriftSpec,
    OuModel,
    ParameterInterval,
    ou_stationary_density,
    ou_stationary_density_deriv,
    stationary_ode_residual,
)
from .simulate import SeedSpec, TimeSeriesSample, read_sample_csv, sample_euler_maruyama, sample_ou_exact, write_sample_csv
from .smatch import (
    CriterionContext,
    SmEstimate,
    bandwidth_grid,
    criterion,
    generic_linear_closed_form,
    minimize_criterion,
    ou_closed_form,
    quasi_optimal_bandwidth,
    sm_estimator,
)

__version__ = "0.1.0"
