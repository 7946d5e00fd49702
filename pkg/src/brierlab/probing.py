"""Probability estimates from families of cost-sensitive classifiers.

A family assigns to every instance a decision ``h(t) in {0, 1}`` for each cost
weight ``t`` on a grid. The decisions are piecewise constant on the cells of
the grid (cell edges are midpoints between neighbouring grid points, the outer
cells extend to 0 and 1), so the combined estimate ``Z = integral h(t) dt`` is
an exact cell-weighted sum.
"""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .curves import LossCurve
from .errors import DomainError, NoCrossing


def cell_edges(grid):
    """Cell boundaries for a strictly increasing grid in (0, 1)."""
    grid = np.asarray(grid, dtype=float)
    return np.concatenate([[0.0], 0.5 * (grid[1:] + grid[:-1]), [1.0]])


@dataclass(frozen=True)
class ClassifierFamily:
    """Decisions ``h(t, omega)`` of a family of binary classifiers.

    Attributes
    ----------
    grid : ndarray, shape (m,)
        Strictly increasing cost weights in (0, 1).
    decisions : ndarray of bool, shape (n, m)
        Row ``i`` holds instance ``i``'s decision at every grid weight.
    """

    grid: np.ndarray
    decisions: np.ndarray

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float).reshape(-1)
        if grid.size == 0:
            raise DomainError("family grid is empty")
        if np.any(np.diff(grid) <= 0) or grid[0] <= 0 or grid[-1] >= 1:
            raise DomainError("family grid must be strictly increasing inside (0, 1)")
        dec = np.asarray(self.decisions)
        if dec.ndim != 2 or dec.shape[1] != grid.size:
            raise DomainError("decisions must have shape (n_instances, len(grid))")
        if dec.dtype != bool:
            if not np.all((dec == 0) | (dec == 1)):
                raise DomainError("decisions must be 0 or 1")
            dec = dec.astype(bool)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "decisions", dec)

    @property
    def n(self):
        return self.decisions.shape[0]

    @property
    def widths(self):
        return np.diff(cell_edges(self.grid))

    @classmethod
    def from_scores(cls, scores, grid, thresholds=None):
        """Threshold rules ``h(t) = 1{score > threshold(t)}``; thresholds default to ``grid``."""
        grid = np.asarray(grid, dtype=float)
        cut = grid if thresholds is None else np.asarray(thresholds, dtype=float)
        scores = np.asarray(scores, dtype=float)
        return cls(grid, scores[:, None] > cut[None, :])


def default_grid(points=99):
    """Midpoints of ``points`` equal cells of (0, 1)."""
    return (np.arange(points) + 0.5) / points


def probe_combine(family):
    """Per-instance estimate ``Z = integral_0^1 h(t) dt`` (Riemann sum on the cells)."""
    z = family.decisions.astype(float) @ family.widths
    return np.clip(z, 0.0, 1.0)


@dataclass(frozen=True)
class ProbingReport:
    """Both sides of the probing bound.

    ``calibration_loss_lhs`` is E[(Z - psi)^2], ``combined_regret`` is
    2 integral (L({Z > t}, t) - L*(t)) dt and ``regret_integral_rhs`` is
    2 integral (L(H(t), t) - L*(t)) dt. Population-wise the first two are equal
    and bounded by the third.
    """

    calibration_loss_lhs: float
    regret_integral_rhs: float
    combined_regret: float

    def holds(self, tolerance):
        return (abs(self.calibration_loss_lhs - self.combined_regret) <= tolerance
                and self.combined_regret <= self.regret_integral_rhs + tolerance)


def _bayes_area(exact_bayes, psis):
    """2 * integral of L*(t) over (0, 1)."""
    if exact_bayes is None:
        return float(np.mean(psis * (1.0 - psis)))
    val, _ = quad(lambda t: float(exact_bayes(t)), 0.0, 1.0, limit=400,
                  epsabs=1e-13, epsrel=1e-12)
    return 2.0 * val


def probing_bound(family, oracle_psis, exact_bayes=None):
    """Evaluate the calibration-loss bound for a classifier family.

    Cost-weighted losses of decisions are taken in expectation given the
    oracle posterior, ``E[(1-t) psi 1{h=0} + t (1-psi) 1{h=1}]``, and their
    t-integrals are computed in closed form cell by cell.

    Parameters
    ----------
    family : ClassifierFamily
    oracle_psis : array_like
        Full-information posterior of each instance.
    exact_bayes : callable, optional
        ``t -> L*(t)``. When omitted the plug-in ``2 int L* = mean(psi (1-psi))``
        of the same instances is used, which makes the first identity exact.
    """
    psi = np.asarray(oracle_psis, dtype=float).reshape(-1)
    if psi.size != family.n:
        raise DomainError("one oracle posterior per instance required")
    z = probe_combine(family)
    lhs = float(np.mean((z - psi) ** 2))
    bayes = _bayes_area(exact_bayes, psi)
    # 2 int_0^1 (1-t) psi 1{t >= z} + t (1-psi) 1{t < z} dt
    combined = float(np.mean(psi * (1.0 - z) ** 2 + (1.0 - psi) * z * z))
    edges = cell_edges(family.grid)
    lo, hi = edges[:-1], edges[1:]
    neg_w = (1.0 - lo) ** 2 - (1.0 - hi) ** 2      # 2 int (1-t) dt over the cell
    pos_w = hi * hi - lo * lo                      # 2 int t dt over the cell
    h = family.decisions
    miss = (~h).astype(float) @ neg_w
    false_alarm = h.astype(float) @ pos_w
    family_loss = float(np.mean(psi * miss + (1.0 - psi) * false_alarm))
    return ProbingReport(
        calibration_loss_lhs=lhs,
        regret_integral_rhs=family_loss - bayes,
        combined_regret=combined - bayes,
    )


def combine_two(z1, z2, z):
    """``min(z, Z1) + (Z2 - z) 1{Z2 > z}``: use Z1 for costs below z and Z2 above."""
    if not 0.0 < z < 1.0:
        raise DomainError("switch point must lie in (0, 1)")
    z1 = np.asarray(z1, dtype=float)
    z2 = np.asarray(z2, dtype=float)
    return np.minimum(z, z1) + (z2 - z) * (z2 > z)


@dataclass(frozen=True)
class Crossing:
    """Switch point between two crossing curves.

    ``first`` (1 or 2) is the curve that is lower for costs just below ``t``;
    ``unique`` is False when the curves change order more than once.
    """

    t: float
    first: int
    unique: bool
    combined_area: float


def crossing_point(curve1, curve2, tolerance=0.0):
    """Cost weight where two curves on a common grid change order.

    Among several sign changes the one giving the smallest area below the
    piecewise-combined curve is returned.

    Raises
    ------
    NoCrossing
        When the difference never changes sign beyond ``tolerance``.
    """
    if not (isinstance(curve1, LossCurve) and isinstance(curve2, LossCurve)):
        raise DomainError("expected two LossCurve objects")
    if curve1.grid.shape != curve2.grid.shape or np.any(curve1.grid != curve2.grid):
        raise DomainError("curves must share a grid")
    t = curve1.grid
    diff = curve1.values - curve2.values
    sign = np.where(diff > tolerance, 1, np.where(diff < -tolerance, -1, 0))
    idx = np.flatnonzero(sign)
    if idx.size == 0:
        raise NoCrossing(equal=True)
    changes = np.flatnonzero(sign[idx[1:]] != sign[idx[:-1]])
    if changes.size == 0:
        raise NoCrossing(equal=False, dominant=1 if sign[idx[0]] < 0 else 2)
    candidates = []
    for c in changes:
        i, k = idx[c], idx[c + 1]
        t_cross = t[i] + (t[k] - t[i]) * diff[i] / (diff[i] - diff[k])
        first = 1 if sign[i] < 0 else 2
        low, high = (curve1, curve2) if first == 1 else (curve2, curve1)
        merged = np.where(t <= t_cross, low.values, high.values)
        candidates.append((float(np.trapezoid(merged, t)), float(t_cross), first))
    area, t_best, first = min(candidates)
    return Crossing(t_best, first, changes.size == 1, area)
