"""Brier curves and cost-weighted Bayes-loss curves.

Curves follow the unscaled convention ``B(t) = L({Z > t}, t)`` with
``L(H, t) = (1-t) P[A, H^c] + t P[A^c, H]``, so that twice the area below the
curve is the Brier score. (Hernandez-Orallo et al. scale by 2 instead.)
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import ndtr

from . import model as _model
from .errors import DomainError, PreconditionError
from .metrics import _as_labels, _as_probabilities


class CurveKind(str, Enum):
    BRIER_CURVE = "brier"
    BAYES_LOSS_CURVE = "bayes"


@dataclass(frozen=True)
class LossCurve:
    """Loss values on a nondecreasing grid of cost parameters covering [0, 1].

    A grid value may appear twice; the first copy then carries the left limit
    of a right-continuous step, which makes trapezoidal integration exact for
    empirical curves.
    """

    grid: np.ndarray
    values: np.ndarray
    prior: float
    kind: CurveKind = CurveKind.BRIER_CURVE

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float).reshape(-1)
        values = np.asarray(self.values, dtype=float).reshape(-1)
        if grid.size != values.size or grid.size < 2:
            raise DomainError("grid and values must have equal length >= 2")
        if np.any(np.diff(grid) < 0):
            raise DomainError("grid must be ascending")
        if grid[0] != 0.0 or grid[-1] != 1.0:
            raise DomainError("grid must start at 0 and end at 1")
        if np.any(values < -1e-12) or not np.all(np.isfinite(values)):
            raise DomainError("loss values must be finite and nonnegative")
        if abs(values[-1]) > 1e-12:
            raise DomainError("a loss curve vanishes at t = 1")
        values = np.maximum(values, 0.0)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "prior", float(self.prior))
        object.__setattr__(self, "kind", CurveKind(self.kind))

    def __call__(self, t):
        """Linear interpolation between grid points."""
        return np.interp(t, self.grid, self.values)

    @property
    def peak(self):
        k = int(np.argmax(self.values))
        return float(self.grid[k]), float(self.values[k])


def uniform_grid(points=1001):
    if points < 3:
        raise DomainError("a grid needs at least 3 points")
    return np.linspace(0.0, 1.0, int(points))


def _check_grid(grid):
    grid = np.asarray(grid, dtype=float).reshape(-1)
    if np.any(np.diff(grid) < 0):
        raise DomainError("grid must be sorted ascending")
    if grid.size == 0 or grid[0] < 0 or grid[-1] > 1:
        raise DomainError("grid must lie in [0, 1]")
    return grid


class _EmpiricalLoss:
    """Cumulative class counts over sorted predictions."""

    def __init__(self, z, labels):
        z = _as_probabilities(z, "z")
        y = _as_labels(labels, z.size)
        order = np.argsort(z, kind="stable")
        self.z_sorted = z[order]
        pos = y[order].astype(float)
        self.n = z.size
        self.cum_pos = np.r_[0.0, np.cumsum(pos)]
        self.cum_neg = np.r_[0.0, np.cumsum(1.0 - pos)]
        self.prior = self.cum_pos[-1] / self.n

    def at(self, t, left=False):
        """``L({z > t}, t)``; with ``left`` the limit from the left, ``L({z >= t}, t)``."""
        t = np.asarray(t, dtype=float)
        k = np.searchsorted(self.z_sorted, t, side="left" if left else "right")
        fn = self.cum_pos[k]
        fp = self.cum_neg[-1] - self.cum_neg[k]
        return ((1.0 - t) * fn + t * fp) / self.n


def cost_loss(z, labels, t):
    """Empirical cost-weighted mean loss of the decision ``z > t``.

    ``(1-t) * frac(label 1 and z <= t) + t * frac(label 0 and z > t)``.
    """
    t = np.asarray(t, dtype=float)
    if np.any((t < 0) | (t > 1)):
        raise DomainError("t must lie in [0, 1]")
    out = _EmpiricalLoss(z, labels).at(t)
    return float(out) if out.ndim == 0 else out


def brier_curve(z, labels, grid=None, breakpoints=True):
    """Empirical Brier curve of predictions ``z``.

    Parameters
    ----------
    z, labels : array_like
        Predictions in [0, 1] and 0/1 outcomes.
    grid : array_like, optional
        Ascending cost parameters including 0 and 1. Defaults to 1001 uniform
        points.
    breakpoints : bool
        Also evaluate at every distinct value of ``z``, inserting the left
        limit just before it. The curve is then exact: linear between knots,
        with the jumps represented by duplicated knots.
    """
    grid = uniform_grid() if grid is None else _check_grid(grid)
    if grid[0] != 0.0 or grid[-1] != 1.0:
        raise DomainError("grid must include the endpoints 0 and 1")
    emp = _EmpiricalLoss(z, labels)
    if not breakpoints:
        return LossCurve(grid, emp.at(grid), emp.prior, CurveKind.BRIER_CURVE)
    knots = np.unique(emp.z_sorted)
    knots = knots[knots > 0.0]
    t = np.concatenate([grid, knots, knots])
    is_left = np.r_[np.zeros(grid.size + knots.size, bool), np.ones(knots.size, bool)]
    # Left limits sort before the right-continuous value at the same t.
    order = np.lexsort((~is_left, t))
    t, is_left = t[order], is_left[order]
    values = np.where(is_left, emp.at(t, left=True), emp.at(t))
    keep = np.r_[True, (np.diff(t) != 0) | (is_left[1:] != is_left[:-1])]
    return LossCurve(t[keep], values[keep], emp.prior, CurveKind.BRIER_CURVE)


def exact_curve(model, scope, grid=None):
    """Population curve ``L({psi_scope > t}, t)`` of a Gaussian model."""
    grid = uniform_grid() if grid is None else _check_grid(grid)
    scope = _model.InformationScope.parse(scope)
    kind = (CurveKind.BAYES_LOSS_CURVE if scope in _model.CALIBRATED_SCOPES
            else CurveKind.BRIER_CURVE)
    values = _model.brier_curve_value(model, scope, grid)
    return LossCurve(grid, values, model.prior, kind)


def curve_area(curve):
    """Trapezoidal area below the curve."""
    return float(np.trapezoid(curve.values, curve.grid))


def quantile_low(z, alpha):
    """Smallest ``v`` among ``z`` with ``frac(z <= v) >= alpha``."""
    return float(np.quantile(np.asarray(z, dtype=float), alpha, method="inverted_cdf"))


def curve_max(z, labels):
    """Location and height of the maximum of a calibrated classifier's Brier curve.

    The maximiser is the lowest ``(1 - P[A])``-quantile of ``z``; ``P[A]`` is
    the label frequency. Only meaningful for calibrated ``z``.
    """
    y = _as_labels(labels)
    p = float(np.mean(y))
    if p in (0.0, 1.0):
        return 0.0, 0.0
    t_star = quantile_low(z, 1.0 - p)
    return t_star, cost_loss(z, y, t_star)


@dataclass(frozen=True)
class BoundsReport:
    """Worst-case margins of ``min(t,1-t) R <= B(t) <= R``; a margin <= 0 means no violation."""

    holds: bool
    lower_margin: float
    upper_margin: float
    lower_argmax_t: float
    upper_argmax_t: float


def curve_bounds_check(curve, refinement, tolerance=1e-9):
    """Check ``min(t, 1-t) * refinement <= B(t) <= refinement`` on the grid.

    Holds for the Brier curve of any calibrated classifier, with
    ``refinement = E[psi (1 - psi)]`` of that classifier.
    """
    t = curve.grid
    lower = np.minimum(t, 1.0 - t) * refinement - curve.values
    upper = curve.values - refinement
    i, j = int(np.argmax(lower)), int(np.argmax(upper))
    holds = bool(lower[i] <= tolerance and upper[j] <= tolerance)
    return BoundsReport(holds, float(lower[i]), float(upper[j]), float(t[i]), float(t[j]))


def one_sided_derivatives(z, labels, t):
    """Left and right derivative of a calibrated Brier curve at ``t``.

    ``right = 1 - P[A] - P[z <= t]`` and ``left = 1 - P[A] - P[z < t]``,
    empirical frequencies throughout.
    """
    if not 0.0 < t < 1.0:
        raise DomainError("t must lie in (0, 1)")
    z = _as_probabilities(z, "z")
    y = _as_labels(labels, z.size)
    p = float(np.mean(y))
    right = 1.0 - p - float(np.mean(z <= t))
    left = 1.0 - p - float(np.mean(z < t))
    return left, right


def shift_cost(t, p, q):
    """Source cost ``s`` matching target cost ``t`` when the prior moves from p to q."""
    t = np.asarray(t, dtype=float)
    return (1.0 - q) * p * t / ((p - q) * t + q * (1.0 - p))


def _check_prior(x, name):
    if not 0.0 < x < 1.0:
        raise DomainError(f"{name} must lie in (0, 1), got {x}")


def prior_shift_transform(curve, target_prior, grid=None):
    """Curve of the same calibrated classifier after a prior shift p -> q.

    ``B_Q(t) = B_P(s) (1 - t) q / ((1 - s) p)`` with ``s = shift_cost(t, p, q)``.

    Without ``grid`` the result lives on the image of the source grid under the
    inverse cost map, which needs no interpolation and round-trips exactly.
    With ``grid`` the source curve is linearly interpolated at ``s``.
    """
    p, q = curve.prior, float(target_prior)
    _check_prior(p, "source prior")
    _check_prior(q, "target prior")
    if grid is None:
        s = curve.grid
        t = shift_cost(s, q, p)
        t[0], t[-1] = 0.0, 1.0
        source = curve.values
    else:
        t = _check_grid(grid)
        s = shift_cost(t, p, q)
        source = curve(s)
    with np.errstate(divide="ignore", invalid="ignore"):
        values = source * (1.0 - t) * q / ((1.0 - s) * p)
    values = np.where(t >= 1.0, 0.0, values)
    return LossCurve(t, values, q, curve.kind)


def reweighted_prior(t, p):
    """``q = (1-t) p / ((1-t) p + t (1-p))``."""
    return (1.0 - t) * p / ((1.0 - t) * p + t * (1.0 - p))


def curve_from_bayes_error(t, prior, bayes_error):
    """Brier-curve value at ``t`` from an unweighted Bayes-error oracle.

    ``bayes_error(q)`` must return ``min_G q P[G^c | A] + (1-q) P[G | A^c]``,
    the Bayes error of the same class-conditional laws under prior ``q``.
    """
    if not 0.0 < t < 1.0:
        raise DomainError("t must lie in (0, 1)")
    _check_prior(prior, "prior")
    weight = (1.0 - t) * prior + t * (1.0 - prior)
    return weight * float(bayes_error(reweighted_prior(t, prior)))


def bayes_error_from_curve(half_prior_curve, prior):
    """Unweighted Bayes error under ``prior`` as ``2 B_Q(1 - prior)``.

    ``half_prior_curve`` is the calibrated curve under prior 1/2, either a
    :class:`LossCurve` or a callable.
    """
    _check_prior(prior, "prior")
    if isinstance(half_prior_curve, LossCurve) and abs(half_prior_curve.prior - 0.5) > 1e-12:
        raise DomainError("curve must be given under prior 1/2")
    return 2.0 * float(half_prior_curve(1.0 - prior))


def _power_on_grid(power, alphas):
    if callable(power):
        betas = np.asarray(power(alphas), dtype=float) * np.ones_like(alphas)
    else:
        a, b = (np.asarray(v, dtype=float) for v in power)
        if np.any(np.diff(a) <= 0):
            raise DomainError("power-function abscissae must increase")
        if np.any(np.diff(b) < 0):
            raise DomainError("power function must be nondecreasing")
        betas = np.interp(alphas, a, b)
    if np.any(np.diff(betas) < -1e-12):
        raise DomainError("power function must be nondecreasing")
    if np.any((betas < -1e-12) | (betas > 1 + 1e-12)):
        raise DomainError("power function values must lie in [0, 1]")
    return np.clip(betas, 0.0, 1.0)


def curve_from_roc(power, prior, grid=None, alpha_points=1999):
    """Calibrated Brier curve from the Neyman-Pearson power function.

    ``B(t) = ((1-t) p + t (1-p)) min_a ((1-q) a + q (1 - beta(a)))`` with
    ``q = reweighted_prior(t, p)``; the minimum runs over ``alpha_points``
    uniform sizes in [0, 1] plus as many probit-spaced ones, which resolve the
    steep ends of typical power functions. ``power`` is a callable or
    ``(alphas, betas)``.
    """
    _check_prior(prior, "prior")
    grid = uniform_grid() if grid is None else _check_grid(grid)
    alphas = np.unique(np.r_[np.linspace(0.0, 1.0, alpha_points),
                             ndtr(np.linspace(-9.0, 9.0, alpha_points))])
    betas = _power_on_grid(power, alphas)
    weight = (1.0 - grid) * prior + grid * (1.0 - prior)
    q = (1.0 - grid) * prior / weight
    risk = (1.0 - q)[:, None] * alphas[None, :] + q[:, None] * (1.0 - betas)[None, :]
    return LossCurve(grid, weight * risk.min(axis=1), prior, CurveKind.BAYES_LOSS_CURVE)


def roc_from_curve(half_prior_curve, alphas=None, prior_points=1999):
    """Power function ``beta(alpha)`` recovered from a calibrated curve under prior 1/2.

    ``beta(a) = inf_{p in (0,1]} ((1-p) a + p - 2 B_Q(1-p)) / p`` with the infimum
    over ``prior_points`` uniform plus as many probit-spaced values of ``p``.
    Returns ``(alphas, betas)``.
    """
    if isinstance(half_prior_curve, LossCurve) and abs(half_prior_curve.prior - 0.5) > 1e-12:
        raise DomainError("curve must be given under prior 1/2")
    alphas = np.linspace(0.0, 1.0, 1001) if alphas is None else np.asarray(alphas, float)
    ps = np.unique(np.r_[np.linspace(1.0 / prior_points, 1.0, prior_points),
                         ndtr(np.linspace(-9.0, 9.0, prior_points))])
    b_half = np.asarray(half_prior_curve(1.0 - ps), dtype=float)
    ratio = ((1.0 - ps)[None, :] * alphas[:, None] + (ps - 2.0 * b_half)[None, :]) / ps[None, :]
    return alphas, np.clip(ratio.min(axis=1), 0.0, 1.0)


@dataclass(frozen=True)
class RefinementBounds:
    lower: float
    upper: float
    correlation: float
    quantile_q: float
    refinement: float


def refinement_bounds(psis, labels, tolerance=None):
    """Correlation bounds on the refinement loss of a calibrated posterior.

    With ``q`` the lowest ``(1-p)``-quantile of ``psis`` and
    ``rho = corr(1_A, 1{psi > q})``::

        (1 - rho) p (1 - p) <= mean(psi (1 - psi)) <= (1 - rho**2) p (1 - p)

    Raises
    ------
    PreconditionError
        If no ``q`` with ``P[psi <= q] = 1 - p`` exists within ``tolerance``
        (default :func:`~brierlab.metrics.estimation_tolerance`).
    """
    psis = _as_probabilities(psis, "psis")
    y = _as_labels(labels, psis.size).astype(float)
    n = psis.size
    if tolerance is None:
        from .metrics import estimation_tolerance
        tolerance = estimation_tolerance(n)
    p = float(np.mean(y))
    if p in (0.0, 1.0):
        raise PreconditionError("both classes must be present")
    q = quantile_low(psis, 1.0 - p)
    above = (psis > q).astype(float)
    if abs(float(np.mean(psis <= q)) - (1.0 - p)) > tolerance:
        raise PreconditionError(
            f"no admissible threshold: P[psi <= q] = {np.mean(psis <= q):.6g} "
            f"but 1 - P[A] = {1.0 - p:.6g}")
    if np.std(above) == 0:
        raise PreconditionError("indicator 1{psi > q} is constant")
    rho = float(np.corrcoef(y, above)[0, 1])
    base = p * (1.0 - p)
    return RefinementBounds(
        lower=(1.0 - rho) * base,
        upper=(1.0 - rho * rho) * base,
        correlation=rho,
        quantile_q=q,
        refinement=float(np.mean(psis * (1.0 - psis))),
    )
