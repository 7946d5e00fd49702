"""Executable sufficiency diagnostics.

A coarser score is sufficient for the full information exactly when its
cost-weighted Bayes-loss curve coincides with the full-information curve.
This module compares curves, checks strong comonotonicity, recovers optimal
thresholds per cost weight, and runs the non-nested counter-example in which
one curve dominates another without the stronger sufficiency notion holding.
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.stats import kendalltau

from . import model as _model
from .curves import LossCurve, exact_curve, uniform_grid
from .errors import DomainError, PreconditionError


def comonotonicity_check(s, psi):
    """Strong comonotonicity of two sequences, plus Kendall's tau-b.

    True iff ``s[i] < s[j] <=> psi[i] < psi[j]`` for all pairs, which in
    particular requires the tie classes of ``s`` and ``psi`` to coincide.
    Runs in O(n log n) from one joint sort.
    """
    s = np.asarray(s, dtype=float).reshape(-1)
    psi = np.asarray(psi, dtype=float).reshape(-1)
    if s.size != psi.size:
        raise DomainError("sequences differ in length")
    if s.size < 2:
        raise DomainError("need at least two observations")
    order = np.lexsort((psi, s))
    s_sorted, psi_sorted = s[order], psi[order]
    same_s = np.diff(s_sorted) == 0
    dpsi = np.diff(psi_sorted)
    # Within an s-tie psi must be constant; across s-steps psi must rise strictly.
    comonotone = bool(np.all(np.where(same_s, dpsi == 0, dpsi > 0)))
    tau = kendalltau(s, psi).statistic
    return comonotone, float(tau)


class Relation(str, Enum):
    EQUAL = "Equal"
    DOMINATES = "Dominates"
    DOMINATED_BY = "DominatedBy"
    CROSSES = "Crosses"


@dataclass(frozen=True)
class DominanceVerdict:
    """How curve ``a`` compares to curve ``b`` (lower loss dominates).

    ``max_gap`` is ``max |a - b|`` over the grid, attained at ``argmax_t``.
    """

    relation: Relation
    max_gap: float
    argmax_t: float
    tolerance: float = 0.0


def _values_on_common_grid(a, b):
    if isinstance(a, LossCurve) and isinstance(b, LossCurve):
        if a.grid.shape != b.grid.shape or np.any(a.grid != b.grid):
            raise DomainError("curves must share a grid")
        return a.grid, a.values, b.values
    raise DomainError("expected two LossCurve objects")


def curve_dominance(a, b, tolerance):
    """Classify the pointwise order of two loss curves on a shared grid.

    ``Equal`` if ``|a - b| <= tolerance`` everywhere; ``Dominates`` if ``a`` is
    nowhere above ``b`` by more than the tolerance and somewhere below it;
    ``DominatedBy`` for the mirror case; ``Crosses`` otherwise. For nested
    information, ``Equal`` certifies sufficiency.
    """
    grid, va, vb = _values_on_common_grid(a, b)
    diff = va - vb
    k = int(np.argmax(np.abs(diff)))
    gap, at = float(abs(diff[k])), float(grid[k])
    above = bool(np.any(diff > tolerance))
    below = bool(np.any(diff < -tolerance))
    if not above and not below:
        rel = Relation.EQUAL
    elif below and not above:
        rel = Relation.DOMINATES
    elif above and not below:
        rel = Relation.DOMINATED_BY
    else:
        rel = Relation.CROSSES
    return DominanceVerdict(rel, gap, at, float(tolerance))


def interior_grid(points=999):
    """``points`` equally spaced cost weights strictly inside (0, 1)."""
    return np.arange(1, points + 1) / (points + 1)


@dataclass(frozen=True)
class ThresholdCheck:
    """Per-cost optimal thresholding of a score, compared with L*.

    ``thresholds[j]`` is the largest score value classified negative at
    ``grid[j]`` (``-inf`` when everything is positive); ``losses`` the attained
    empirical cost-weighted loss; ``tolerance`` the per-t acceptance band.
    """

    sufficient: bool
    monotone: bool
    grid: np.ndarray
    thresholds: np.ndarray
    losses: np.ndarray
    bayes: np.ndarray
    tolerance: np.ndarray

    @property
    def gaps(self):
        return self.losses - self.bayes

    @property
    def max_gap(self):
        return float(np.max(np.abs(self.gaps)))


def threshold_sufficiency_check(s, labels, exact_bayes, grid=None, tolerance=None,
                                chunk=64):
    """Is thresholding ``s`` optimal at every cost weight?

    For each ``t`` the cut minimising the empirical ``L({s > c}, t)`` is found
    over all sample cut points. ``s`` is declared sufficient when those minimal
    losses match ``exact_bayes(t)`` within tolerance at every ``t`` *and* the
    fitted cut map ``t -> F(t)`` is nondecreasing.

    ``tolerance`` defaults to a uniform band of three times the largest
    per-t standard error of the attained loss, which keeps the sup over many
    cost weights from tripping on sampling noise alone.
    """
    if exact_bayes is None:
        raise PreconditionError("a population Bayes-loss oracle is required")
    s = np.asarray(s, dtype=float).reshape(-1)
    y = np.asarray(labels).reshape(-1)
    if s.size != y.size or s.size == 0:
        raise DomainError("scores and labels must be nonempty and of equal length")
    grid = interior_grid() if grid is None else np.asarray(grid, dtype=float)
    n = s.size
    uniq, inverse = np.unique(s, return_inverse=True)
    pos = np.bincount(inverse, weights=(y == 1).astype(float), minlength=uniq.size)
    neg = np.bincount(inverse, weights=(y == 0).astype(float), minlength=uniq.size)
    # Cut k classifies the k smallest distinct scores as negative.
    fn = np.r_[0.0, np.cumsum(pos)]
    fp = neg.sum() - np.r_[0.0, np.cumsum(neg)]
    best = np.empty(grid.size, dtype=np.int64)
    for start in range(0, grid.size, chunk):
        t = grid[start:start + chunk]
        loss = (1.0 - t)[None, :] * fn[:, None] + t[None, :] * fp[:, None]
        best[start:start + chunk] = np.argmin(loss, axis=0)
    losses = ((1.0 - grid) * fn[best] + grid * fp[best]) / n
    thresholds = np.where(best > 0, uniq[np.maximum(best - 1, 0)], -np.inf)
    bayes = np.asarray([float(exact_bayes(t)) for t in grid])
    if tolerance is None:
        # Per-instance loss takes (1-t) on misses, t on false alarms.
        miss, alarm = fn[best] / n, fp[best] / n
        second = (1.0 - grid) ** 2 * miss + grid ** 2 * alarm
        se = np.sqrt(np.maximum(second - losses ** 2, 0.0) / n)
        tol = np.full(grid.shape, 3.0 * float(se.max()))
    else:
        tol = np.broadcast_to(np.asarray(tolerance, dtype=float), grid.shape)
    monotone = bool(np.all(np.diff(thresholds) >= 0))
    matches = bool(np.all(np.abs(losses - bayes) <= tol))
    return ThresholdCheck(matches and monotone, monotone, grid, thresholds, losses,
                          bayes, np.array(tol))


def population_threshold_curve(class_cdfs, prior, grid, support, points=4001):
    """``min_c L({s > c}, t)`` for a score with known class-conditional CDFs.

    Parameters
    ----------
    class_cdfs : callable
        ``c -> (P[s <= c | A], P[s <= c | A^c])``, vectorised in ``c``.
    prior : float
        P[A].
    grid : array_like
        Cost weights.
    support : (float, float)
        Interval searched for the cut. A dense scan over ``points`` cuts is
        refined by bounded Brent minimisation around the best cut.
    """
    lo, hi = support
    cuts = np.linspace(lo, hi, points)
    cdf_pos, cdf_neg = class_cdfs(cuts)
    p = prior

    def loss(c, t):
        cpos, cneg = class_cdfs(np.asarray([c]))
        return float((1.0 - t) * p * cpos[0] + t * (1.0 - p) * (1.0 - cneg[0]))

    out = np.empty(len(grid))
    for j, t in enumerate(np.asarray(grid, dtype=float)):
        scan = (1.0 - t) * p * cdf_pos + t * (1.0 - p) * (1.0 - cdf_neg)
        k = int(np.argmin(scan))
        a, b = cuts[max(k - 1, 0)], cuts[min(k + 1, points - 1)]
        res = minimize_scalar(loss, bounds=(a, b), args=(t,), method="bounded",
                              options={"xatol": 1e-12 * max(1.0, abs(cuts[k]))})
        out[j] = min(scan[k], res.fun)
    return out


@dataclass(frozen=True)
class CounterexampleReport:
    """Outcome of the non-nested dominance-without-sufficiency check."""

    curves: dict
    x2_vs_x1: DominanceVerdict
    x1_vs_prior: DominanceVerdict
    joint_vs_best: DominanceVerdict
    tolerance: float
    dominance_holds: bool
    x1_informative: bool
    joint_dominates: bool
    certified: bool = field(default=False)

    def summary(self):
        lines = [
            "counterexample harness",
            f"  tolerance                : {self.tolerance:.3g}",
            f"  X2 curve vs X1 curve     : {self.x2_vs_x1.relation.value} "
            f"(max gap {self.x2_vs_x1.max_gap:.6g} at t={self.x2_vs_x1.argmax_t:.4g})",
            f"  X1 curve vs prior curve  : max gap {self.x1_vs_prior.max_gap:.6g} "
            f"at t={self.x1_vs_prior.argmax_t:.4g}",
            f"  joint vs min(X1, X2)     : {self.joint_vs_best.relation.value}",
            f"  dominance holds          : {self.dominance_holds}",
            f"  X1 informative (>10 tol) : {self.x1_informative}",
            f"  certified                : {self.certified}",
        ]
        return "\n".join(lines)


def counterexample_harness(independence_model, grid=None, tolerance=1e-3):
    """Dominance of Bayes-loss curves without the stronger sufficiency notion.

    With class-conditionally independent components, the X2 curve lying above
    the X1 curve everywhere would, if X2's posterior were the conditional
    expectation of X1's information, force X1 to be uninformative. Showing the
    X1 curve differs from the prior curve therefore refutes it.

    Raises
    ------
    PreconditionError
        If the model's covariance is not diagonal.
    """
    m = independence_model
    if m.cov[0, 1] != 0.0:
        raise PreconditionError("the harness needs a diagonal covariance")
    grid = uniform_grid(1001) if grid is None else np.asarray(grid, dtype=float)
    S = _model.InformationScope
    curves = {
        "joint": exact_curve(m, S.FULL, grid),
        "x1": exact_curve(m, S.COMPONENT1, grid),
        "x2": exact_curve(m, S.COMPONENT2, grid),
        "prior": exact_curve(m, S.PRIOR, grid),
    }
    x2_vs_x1 = curve_dominance(curves["x2"], curves["x1"], tolerance)
    x1_vs_prior = curve_dominance(curves["x1"], curves["prior"], tolerance)
    best = LossCurve(grid, np.minimum(curves["x1"].values, curves["x2"].values), m.prior)
    joint_vs_best = curve_dominance(curves["joint"], best, tolerance)
    dominance = x2_vs_x1.relation in (Relation.EQUAL, Relation.DOMINATED_BY)
    informative = x1_vs_prior.max_gap > 10.0 * tolerance
    joint_ok = joint_vs_best.relation in (Relation.EQUAL, Relation.DOMINATES)
    certified = (x2_vs_x1.relation is Relation.DOMINATED_BY and informative)
    return CounterexampleReport(curves, x2_vs_x1, x1_vs_prior, joint_vs_best,
                                float(tolerance), dominance, informative, joint_ok,
                                certified)
