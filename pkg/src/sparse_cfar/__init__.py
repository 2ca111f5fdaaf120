"""Sparse recovery by LASSO-ADMM with an adaptively regularized CFAR outer loop."""

from .admm import (
    AdmmConfig,
    AdmmResult,
    AdmmState,
    SensingProblem,
    lambda_max,
    lasso_admm,
    objective,
    residuals,
    tolerances,
)
from .cfar import (
    CfarConfig,
    CfarResult,
    FinalEstimatePolicy,
    OuterIterRecord,
    Termination,
    cfar_threshold,
    check_invariants,
    estimate_noise_variance,
    iar_lasso_admm_cfar,
    matched_projection,
    residual_noise,
    restrict_to_zero_support,
    stopping_decision,
    threshold_estimate,
    update_support,
)
from .errors import DegenerateSupportError, DivergenceError, InputError, InvariantError, NumericError
from .linalg import GramFactor, factorize_gram, soft_threshold, solve_gram
from .metrics import Metrics, evaluate, ista_reference, mse, snr_db, support_metrics
from .synth import SynthSpec, generate_sensing_matrix, generate_spike_signal, synthesize, trial_rng

__version__ = "0.1.0"
