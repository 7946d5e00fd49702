"""Brier score and its refinement / grouping / group-wise calibration split."""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import isotonic_regression

from .errors import DomainError


def estimation_tolerance(n):
    """Declared tolerance for sample-based estimates on ``n`` instances."""
    return max(1e-3, 5.0 / np.sqrt(n))


def _as_probabilities(values, name):
    arr = np.asarray(values, dtype=float).reshape(-1)
    if arr.size == 0:
        raise DomainError(f"{name} must be nonempty")
    if np.any(~np.isfinite(arr)) or np.any((arr < 0) | (arr > 1)):
        raise DomainError(f"{name} must lie in [0, 1]")
    return arr


def _as_labels(labels, n=None):
    arr = np.asarray(labels).reshape(-1)
    if arr.size == 0:
        raise DomainError("labels must be nonempty")
    if n is not None and arr.size != n:
        raise DomainError(f"expected {n} labels, got {arr.size}")
    if not np.all((arr == 0) | (arr == 1)):
        raise DomainError("labels must be 0 or 1")
    return arr.astype(np.int8)


@dataclass(frozen=True)
class Predictions:
    """Column-wise set of predictions.

    Attributes
    ----------
    z : ndarray
        Probabilistic classifier output in [0, 1].
    labels : ndarray
        Outcome indicator, 0 or 1.
    oracle_psi : ndarray, optional
        Full-information posterior when a population oracle exists.
    group_score : ndarray, optional
        Scoring classifier generating the coarser information.
    """

    z: np.ndarray
    labels: np.ndarray
    oracle_psi: np.ndarray = None
    group_score: np.ndarray = None

    def __post_init__(self):
        z = _as_probabilities(self.z, "z")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "labels", _as_labels(self.labels, z.size))
        if self.oracle_psi is not None:
            psi = _as_probabilities(self.oracle_psi, "oracle_psi")
            if psi.size != z.size:
                raise DomainError("oracle_psi length differs from z")
            object.__setattr__(self, "oracle_psi", psi)
        if self.group_score is not None:
            s = np.asarray(self.group_score, dtype=float).reshape(-1)
            if s.size != z.size:
                raise DomainError("group_score length differs from z")
            object.__setattr__(self, "group_score", s)

    @property
    def n(self):
        return self.z.size

    @classmethod
    def from_sample(cls, sample, scope, group_scope=None, oracle_scope="full"):
        """Predictions of one scope on a :class:`~brierlab.model.PopulationSample`.

        The group score defaults to the prediction itself, i.e. the information
        ``sigma(Z)``.
        """
        z = sample.psi(scope)
        group = z if group_scope is None else sample.psi(group_scope)
        return cls(z, sample.labels, sample.psi(oracle_scope), group)


def _mean_square_error(y, z):
    # Extended-precision accumulation keeps closed forms such as 0.09 for a
    # constant 0.1 on a 10% set exact at any sample size.
    d = np.asarray(y, dtype=np.longdouble) - np.asarray(z, dtype=np.longdouble)
    return float(np.sum(d * d) / d.size)


def brier_score(z, labels):
    """Mean of ``(label - z)**2``, accumulated in extended precision."""
    z = _as_probabilities(z, "z")
    y = _as_labels(labels, z.size)
    return _mean_square_error(y, z)


def refinement(psis):
    """Plug-in refinement loss ``mean(psi * (1 - psi))``."""
    psis = _as_probabilities(psis, "psis")
    return float(np.mean(psis * (1.0 - psis)))


def refinement_alt(psis, prior):
    """Refinement as uncertainty minus resolution, ``p(1-p) - var(psi)``.

    The variance is the population (ddof=0) variance of ``psis``. When ``prior``
    equals the sample mean of ``psis`` the result equals :func:`refinement`
    up to rounding, which is checked here.
    """
    psis = _as_probabilities(psis, "psis")
    if not 0.0 < prior < 1.0:
        raise DomainError("prior must lie in (0, 1)")
    value = prior * (1.0 - prior) - float(np.var(psis))
    if abs(float(np.mean(psis)) - prior) <= 1e-12:
        direct = refinement(psis)
        if abs(direct - value) > 1e-12:
            raise ArithmeticError(
                f"uncertainty-resolution identity violated: {value} vs {direct}")
    return value


@dataclass(frozen=True)
class IsotonicFit:
    """Nondecreasing step function fitted by pool-adjacent-violators.

    ``breakpoints[k]`` is the smallest training score of block ``k`` and
    ``levels[k]`` its fitted probability. Scores between blocks take the level
    of the block to their left; scores outside the training range take the
    first or last level.
    """

    breakpoints: np.ndarray
    levels: np.ndarray

    def __call__(self, scores):
        scores = np.asarray(scores, dtype=float)
        idx = np.searchsorted(self.breakpoints, scores, side="right") - 1
        return self.levels[np.clip(idx, 0, self.levels.size - 1)]

    predict = __call__


def calibrate_isotonic(scores, labels):
    """Least-squares nondecreasing fit of ``labels`` on ``scores``.

    Tied scores are pooled into one weighted point first, so the fit does not
    depend on the order of the input.
    """
    scores = np.asarray(scores, dtype=float).reshape(-1)
    y = np.asarray(labels, dtype=float).reshape(-1)
    if scores.size != y.size:
        raise DomainError("scores and labels differ in length")
    if scores.size == 0:
        raise DomainError("need at least one instance")
    if not np.all(np.isfinite(scores)):
        raise DomainError("scores must be finite")
    uniq, inverse, counts = np.unique(scores, return_inverse=True, return_counts=True)
    means = np.bincount(inverse, weights=y, minlength=uniq.size) / counts
    fitted = isotonic_regression(means, weights=counts.astype(float), increasing=True).x
    fitted = np.clip(fitted, 0.0, 1.0)
    starts = np.flatnonzero(np.r_[True, np.diff(fitted) != 0])
    return IsotonicFit(uniq[starts], fitted[starts])


@dataclass(frozen=True)
class BrierDecomposition:
    refinement: float
    grouping: float
    groupwise_calibration: float
    total: float

    @property
    def residual(self):
        """``total - (refinement + grouping + groupwise_calibration)``."""
        return self.total - (self.refinement + self.grouping + self.groupwise_calibration)

    def is_additive(self, tolerance):
        return abs(self.residual) <= tolerance


def _require_oracle(preds):
    if preds.oracle_psi is None or preds.group_score is None:
        raise DomainError("decomposition needs oracle_psi and group_score for every instance")


def decompose(preds):
    """Split the Brier score of ``preds.z`` into three nonnegative parts.

    The calibrated map P[A | group_score] is estimated by isotonic regression
    of the labels on ``group_score``; ``oracle_psi`` plays the role of the
    full-information posterior.

    Returns
    -------
    BrierDecomposition
        ``refinement = mean(psi (1 - psi))``,
        ``grouping = mean((psi - psi_g)**2)``,
        ``groupwise_calibration = mean((psi_g - z)**2)`` and the Brier score
        as ``total``. The three parts add up to ``total`` up to sampling
        error; see :func:`estimation_tolerance`.
    """
    _require_oracle(preds)
    psi = preds.oracle_psi
    psi_g = calibrate_isotonic(preds.group_score, preds.labels)(preds.group_score)
    return BrierDecomposition(
        refinement=float(np.mean(psi * (1.0 - psi))),
        grouping=float(np.mean((psi - psi_g) ** 2)),
        groupwise_calibration=float(np.mean((psi_g - preds.z) ** 2)),
        total=_mean_square_error(preds.labels, preds.z),
    )


def equal_frequency_bins(scores, bins):
    """Bin index per score; bin edges are empirical quantiles, ties share a bin."""
    if bins < 2:
        raise DomainError("need at least 2 bins")
    scores = np.asarray(scores, dtype=float)
    edges = np.quantile(scores, np.linspace(0.0, 1.0, bins + 1)[1:-1])
    return np.searchsorted(edges, scores, side="right")


def grouping_condvar(preds, bins=100):
    """Grouping loss as the mean within-bin variance of ``oracle_psi``.

    Bins are equal-frequency bins of ``group_score``, so this estimates
    E[var(psi | group_score)].
    """
    if bins < 2:
        raise DomainError("need at least 2 bins")
    _require_oracle(preds)
    ids = equal_frequency_bins(preds.group_score, bins)
    counts = np.bincount(ids, minlength=bins)
    sums = np.bincount(ids, weights=preds.oracle_psi, minlength=bins)
    bin_means = np.divide(sums, counts, out=np.zeros(bins), where=counts > 0)
    dev = preds.oracle_psi - bin_means[ids]
    return float(np.mean(dev * dev))
