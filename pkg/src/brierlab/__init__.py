"""Brier-score calibration analysis against an analytic Gaussian population oracle.

The modules cover the population model and its exact posteriors
(:mod:`~brierlab.model`), the Brier-score decomposition (:mod:`~brierlab.metrics`),
Brier and Bayes-loss curves (:mod:`~brierlab.curves`), the probing reduction
(:mod:`~brierlab.probing`) and sufficiency diagnostics
(:mod:`~brierlab.sufficiency`).
"""

from .curves import (
    BoundsReport, CurveKind, LossCurve, RefinementBounds, bayes_error_from_curve,
    brier_curve, cost_loss, curve_area, curve_bounds_check, curve_from_bayes_error,
    curve_from_roc, curve_max, exact_curve, one_sided_derivatives, prior_shift_transform,
    refinement_bounds, roc_from_curve, uniform_grid,
)
from .errors import (
    BrierLabError, DomainError, ModelValidationError, NoCrossing, PreconditionError,
)
from .metrics import (
    BrierDecomposition, IsotonicFit, Predictions, brier_score, calibrate_isotonic,
    decompose, estimation_tolerance, grouping_condvar, refinement, refinement_alt,
)
from .model import (
    GaussianBinaryModel, InformationScope, PopulationSample, bayes_error_exact,
    bayes_loss_exact, canonical_model, independence_model, posterior, refinement_exact,
    sample,
)
from .probing import (
    ClassifierFamily, Crossing, ProbingReport, combine_two, crossing_point, probe_combine,
    probing_bound,
)
from .sufficiency import (
    CounterexampleReport, DominanceVerdict, Relation, ThresholdCheck, comonotonicity_check,
    counterexample_harness, curve_dominance, population_threshold_curve,
    threshold_sufficiency_check,
)

__version__ = "0.1.0"
