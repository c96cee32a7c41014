"""Learning single-qubit circuit functions from finite-shot measurement data.

A library plus CLI harness: an exact data re-uploading circuit serves as
the ground truth, shot-averaged labels are sampled from it, and an
iterative kernel learner (or a ridge baseline) fits trigonometric feature
models to them.  Closed-form risk-bound curves and bias-variance
decompositions quantify how the training-set size and the per-point shot
count trade off.
"""

from .analysis import (
    BiasVarianceReport,
    BoundConstants,
    InfeasibleBudgetError,
    allocate_budget,
    bias_variance,
    budget_bound,
    erm_bound,
    optimal_shots,
    risk_bound_asymmetry,
    risk_bound_full,
    simplified_constants,
)
from .circuit import ReuploadingParams, eval_circuit, random_params, rot
from .features import (
    FeatureMap,
    feature_matrix,
    gram,
    kernel,
    phi,
    sample_rff_map,
    series_to_weights,
    truncated_map,
)
from .fourier import FourierSeries, eval_series, extract_series, spectrum_distribution
from .learner import (
    CLIP01,
    IDENTITY,
    LinkFunction,
    RiskReport,
    TrainedHypothesis,
    alphatron_train,
    clip01,
    erm_fit,
    erm_fit_validated,
    estimate_risks,
    predict,
)
from .sampling import (
    EigenDistribution,
    LabeledDataset,
    build_dataset,
    sample_eigen_label,
    sample_mean_label,
)
from .seeding import cell_rng, cell_seed

__version__ = "0.1.0"
