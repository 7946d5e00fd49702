"""Analytic two-class Gaussian populations.

Both classes share one bivariate normal covariance and differ in their means.
Every posterior offered here (full information, single component, naive Bayes
and its calibrated version) is a logistic function of a linear score
``s = a @ x`` whose class-conditional laws are univariate normal, so all loss
curves, quantiles and densities reduce to evaluations of the standard normal
CDF.
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import brentq
from scipy.special import expit, logit, ndtr

from .errors import DomainError, ModelValidationError


class InformationScope(str, Enum):
    """Which information a posterior conditions on."""

    FULL = "full"
    COMPONENT1 = "c1"
    COMPONENT2 = "c2"
    NAIVE_BAYES = "nb"
    NAIVE_BAYES_CALIBRATED = "nbcal"
    PRIOR = "prior"

    @classmethod
    def parse(cls, name):
        """Accept either the short value (``"c1"``) or the member name."""
        if isinstance(name, cls):
            return name
        key = str(name).strip()
        for member in cls:
            if key.lower() in (member.value, member.name.lower()):
                return member
        raise DomainError(f"unknown information scope {name!r}")


ALL_SCOPES = tuple(InformationScope)

# Scopes whose posterior is P[A | some sub-sigma-field], i.e. calibrated.
CALIBRATED_SCOPES = (
    InformationScope.FULL,
    InformationScope.COMPONENT1,
    InformationScope.COMPONENT2,
    InformationScope.NAIVE_BAYES_CALIBRATED,
    InformationScope.PRIOR,
)


@dataclass(frozen=True)
class GaussianBinaryModel:
    """Two-class population with shared-covariance bivariate normal features.

    Parameters
    ----------
    prior : float
        P[A], probability of the positive class, in (0, 1).
    mean_neg, mean_pos : array_like, shape (2,)
        Class-conditional feature means for class 0 and class 1.
    cov : array_like, shape (2, 2)
        Shared class-conditional covariance; must be symmetric positive definite.
    """

    prior: float
    mean_neg: np.ndarray
    mean_pos: np.ndarray
    cov: np.ndarray = field(default_factory=lambda: np.eye(2))

    def __post_init__(self):
        prior = float(self.prior)
        mean_neg = np.asarray(self.mean_neg, dtype=float).reshape(-1)
        mean_pos = np.asarray(self.mean_pos, dtype=float).reshape(-1)
        cov = np.asarray(self.cov, dtype=float)
        if cov.shape == (4,):
            cov = cov.reshape(2, 2)
        if not 0.0 < prior < 1.0:
            raise ModelValidationError(f"prior must lie in (0, 1), got {prior}")
        if mean_neg.shape != (2,) or mean_pos.shape != (2,):
            raise ModelValidationError("class means must be pairs of reals")
        if cov.shape != (2, 2):
            raise ModelValidationError("covariance must be a 2x2 matrix")
        if not (np.all(np.isfinite(cov)) and np.all(np.isfinite(mean_neg))
                and np.all(np.isfinite(mean_pos))):
            raise ModelValidationError("model parameters must be finite")
        if cov[0, 1] != cov[1, 0]:
            raise ModelValidationError("covariance must be symmetric")
        if not (np.linalg.det(cov) > 0 and np.trace(cov) > 0):
            raise ModelValidationError("covariance must be positive definite")
        for arr in (mean_neg, mean_pos, cov):
            arr.setflags(write=False)
        object.__setattr__(self, "prior", prior)
        object.__setattr__(self, "mean_neg", mean_neg)
        object.__setattr__(self, "mean_pos", mean_pos)
        object.__setattr__(self, "cov", cov)

    @property
    def correlation(self):
        return self.cov[0, 1] / np.sqrt(self.cov[0, 0] * self.cov[1, 1])

    @property
    def mahalanobis(self):
        """Mahalanobis distance between the two class means."""
        delta = self.mean_pos - self.mean_neg
        return float(np.sqrt(delta @ np.linalg.solve(self.cov, delta)))

    def with_prior(self, prior):
        """Same class-conditional laws under a different P[A] (prior shift)."""
        return GaussianBinaryModel(prior, self.mean_neg, self.mean_pos, self.cov)

    def with_cov(self, cov):
        return GaussianBinaryModel(self.prior, self.mean_neg, self.mean_pos, cov)


@dataclass(frozen=True)
class LinearScore:
    """Posterior of one scope written as ``expit(intercept + slope * (direction @ x))``.

    ``mean_neg``/``mean_pos``/``sd`` describe the class-conditional normal laws
    of the score ``direction @ x``. ``slope`` is always >= 0.
    """

    direction: np.ndarray
    intercept: float
    slope: float
    mean_neg: float
    mean_pos: float
    sd: float

    @property
    def is_constant(self):
        return self.sd == 0.0 or self.slope == 0.0

    def posterior_of_score(self, s):
        return expit(self.intercept + self.slope * np.asarray(s, dtype=float))

    def threshold(self, u):
        """Score value ``c`` with ``{posterior > u} == {score > c}``."""
        with np.errstate(divide="ignore", over="ignore"):
            return (logit(u) - self.intercept) / self.slope


def _calibrated_score(model, direction):
    m0 = float(direction @ model.mean_neg)
    m1 = float(direction @ model.mean_pos)
    var = float(direction @ model.cov @ direction)
    if m1 < m0:
        direction, m0, m1 = -direction, -m0, -m1
    lp = float(logit(model.prior))
    if var <= 0.0 or m1 == m0:
        return LinearScore(direction, lp, 0.0, m0, m1, np.sqrt(max(var, 0.0)))
    slope = (m1 - m0) / var
    return LinearScore(direction, lp - slope * 0.5 * (m0 + m1), slope, m0, m1, np.sqrt(var))


def linear_score(model, scope):
    """Return the :class:`LinearScore` representing ``scope``'s posterior."""
    scope = InformationScope.parse(scope)
    delta = model.mean_pos - model.mean_neg
    if scope is InformationScope.FULL:
        return _calibrated_score(model, np.linalg.solve(model.cov, delta))
    if scope is InformationScope.COMPONENT1:
        return _calibrated_score(model, np.array([1.0, 0.0]))
    if scope is InformationScope.COMPONENT2:
        return _calibrated_score(model, np.array([0.0, 1.0]))
    naive = delta / np.diag(model.cov)
    if scope is InformationScope.NAIVE_BAYES_CALIBRATED:
        return _calibrated_score(model, naive)
    if scope is InformationScope.NAIVE_BAYES:
        # Full-information formula evaluated with the off-diagonal covariance zeroed.
        m0 = float(naive @ model.mean_neg)
        m1 = float(naive @ model.mean_pos)
        sd = float(np.sqrt(naive @ model.cov @ naive))
        intercept = float(logit(model.prior)) - 0.5 * (m0 + m1)
        return LinearScore(naive, intercept, 1.0, m0, m1, sd)
    # PRIOR
    return LinearScore(np.zeros(2), float(logit(model.prior)), 0.0, 0.0, 0.0, 0.0)


def posterior(model, scope, x):
    """P[A | scope information] evaluated at feature vector(s) ``x``.

    ``x`` has shape ``(2,)`` or ``(n, 2)``; the result has shape ``()`` or ``(n,)``.
    """
    scope = InformationScope.parse(scope)
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != 2:
        raise DomainError("features must have a trailing dimension of 2")
    if scope is InformationScope.PRIOR:
        return np.full(x.shape[:-1], model.prior)
    score = linear_score(model, scope)
    return score.posterior_of_score(x @ score.direction)


def _class_cdfs(score, u):
    """P[psi <= u | A] and P[psi > u | A^c] for an array of levels ``u``."""
    u = np.asarray(u, dtype=float)
    if score.is_constant:
        c = float(score.posterior_of_score(score.mean_neg))
        below = (c <= u).astype(float)
        return below, 1.0 - below
    cut = score.threshold(u)
    with np.errstate(invalid="ignore"):
        cdf_pos = ndtr((cut - score.mean_pos) / score.sd)
        sf_neg = ndtr((score.mean_neg - cut) / score.sd)
    return cdf_pos, sf_neg


def brier_curve_value(model, scope, t):
    """Population Brier curve ``L({psi_scope > t}, t)`` for t in [0, 1].

    For calibrated scopes this is the cost-weighted Bayes loss of the scope.
    """
    t = np.asarray(t, dtype=float)
    if np.any((t < 0) | (t > 1)):
        raise DomainError("cost parameter must lie in [0, 1]")
    score = linear_score(model, scope)
    cdf_pos, sf_neg = _class_cdfs(score, t)
    p = model.prior
    return (1.0 - t) * p * cdf_pos + t * (1.0 - p) * sf_neg


def bayes_loss_exact(model, scope, t):
    """Cost-weighted Bayes loss L*(t) of the scope's information, 0 < t < 1.

    Evaluated as ``(1-t) P[A, psi <= t] + t P[A^c, psi > t]`` through normal
    CDFs of the scope's linear score. For ``NAIVE_BAYES`` the value is the loss
    of thresholding the misspecified posterior, which is its Brier curve.
    """
    t = np.asarray(t, dtype=float)
    if np.any((t <= 0) | (t >= 1)):
        raise DomainError("Bayes loss is defined for t in (0, 1)")
    out = brier_curve_value(model, scope, t)
    return float(out) if out.ndim == 0 else out


def refinement_exact(model, scope=InformationScope.FULL):
    """E[psi (1 - psi)] for a calibrated scope, by 1-D Gauss-Hermite quadrature."""
    score = linear_score(model, scope)
    p = model.prior
    if score.is_constant:
        c = float(score.posterior_of_score(score.mean_neg))
        return c * (1.0 - c)
    nodes, weights = np.polynomial.hermite_e.hermegauss(200)
    weights = weights / weights.sum()
    total = 0.0
    for pi, mean in ((p, score.mean_pos), (1.0 - p, score.mean_neg)):
        psi = score.posterior_of_score(mean + score.sd * nodes)
        total += pi * np.sum(weights * psi * (1.0 - psi))
    return float(total)


def posterior_cdf(model, scope, u):
    """Unconditional P[psi_scope <= u]."""
    score = linear_score(model, scope)
    cdf_pos, sf_neg = _class_cdfs(score, u)
    p = model.prior
    return p * cdf_pos + (1.0 - p) * (1.0 - sf_neg)


def posterior_class_cdfs(model, scope, u):
    """Class-conditional CDFs ``(P[psi <= u | A], P[psi <= u | A^c])``."""
    cdf_pos, sf_neg = _class_cdfs(linear_score(model, scope), u)
    return cdf_pos, 1.0 - sf_neg


def posterior_quantile(model, scope, alpha):
    """Lowest alpha-quantile of psi_scope, i.e. smallest u with P[psi <= u] >= alpha."""
    if not 0.0 < alpha < 1.0:
        raise DomainError("alpha must lie in (0, 1)")
    score = linear_score(model, scope)
    if score.is_constant:
        return float(score.posterior_of_score(score.mean_neg))
    p = model.prior

    def excess(c):
        return (p * ndtr((c - score.mean_pos) / score.sd)
                + (1.0 - p) * ndtr((c - score.mean_neg) / score.sd) - alpha)

    lo = min(score.mean_neg, score.mean_pos) - 40.0 * score.sd
    hi = max(score.mean_neg, score.mean_pos) + 40.0 * score.sd
    cut = brentq(excess, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps)
    return float(score.posterior_of_score(cut))


def posterior_densities(model, scope, u):
    """Lebesgue densities ``(g_A(u), g_{A^c}(u))`` of psi_scope given each class.

    Only defined for non-constant scopes and u in (0, 1).
    """
    score = linear_score(model, scope)
    if score.is_constant:
        raise DomainError("a constant posterior has no density")
    u = np.asarray(u, dtype=float)
    cut = score.threshold(u)
    jac = 1.0 / (score.slope * u * (1.0 - u))
    phi = lambda z: np.exp(-0.5 * z * z) / np.sqrt(2.0 * np.pi)  # noqa: E731
    g_pos = phi((cut - score.mean_pos) / score.sd) / score.sd * jac
    g_neg = phi((cut - score.mean_neg) / score.sd) / score.sd * jac
    return g_pos, g_neg


def bayes_error_exact(model, scope=InformationScope.FULL):
    """Unweighted Bayes error ``min_G P[A, G^c] + P[A^c, G]`` = 2 L*(1/2)."""
    return 2.0 * float(brier_curve_value(model, scope, 0.5))


@dataclass(frozen=True)
class PopulationSample:
    """Seeded draw of ``(X, 1_A, psi)`` from a :class:`GaussianBinaryModel`."""

    features: np.ndarray
    labels: np.ndarray
    posteriors: dict
    seed: int

    @property
    def n(self):
        return self.labels.shape[0]

    def psi(self, scope):
        return self.posteriors[InformationScope.parse(scope)]


def make_rng(seed):
    """Counter-based Philox generator; the documented RNG for all sampling."""
    return np.random.Generator(np.random.Philox(int(seed)))


def sample(model, n, seed):
    """Draw ``n`` instances sequentially from ``model``.

    Labels are Bernoulli(prior) from one block of uniforms, then features are
    mean + Cholesky(cov) @ standard normals. Output depends only on
    ``(model, n, seed)``.
    """
    n = int(n)
    if n < 1:
        raise DomainError("sample size must be at least 1")
    rng = make_rng(seed)
    labels = (rng.random(n) < model.prior).astype(np.int8)
    noise = rng.standard_normal((n, 2))
    chol = np.linalg.cholesky(model.cov)
    means = np.where(labels[:, None] == 1, model.mean_pos, model.mean_neg)
    features = means + noise @ chol.T
    posteriors = {scope: posterior(model, scope, features) for scope in ALL_SCOPES}
    return PopulationSample(features, labels, posteriors, int(seed))


def canonical_model():
    """Correlated configuration where naive Bayes and component 1 curves cross."""
    return GaussianBinaryModel(
        prior=0.1, mean_neg=(0.0, 0.0), mean_pos=(1.0, 2.0),
        cov=((1.0, 0.7), (0.7, 1.0)),
    )


def independence_model():
    """Zero-correlation configuration for the dominance-without-sufficiency example."""
    return GaussianBinaryModel(
        prior=0.1, mean_neg=(0.0, 0.0), mean_pos=(2.0, 1.0), cov=np.eye(2),
    )
