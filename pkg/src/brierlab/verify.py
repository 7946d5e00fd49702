"""The invariant suite behind ``brierlab verify``.

Each check compares a measured discrepancy against a limit. Exact checks
(closed forms, quadrature, floating-point identities) use fixed limits;
sample-based checks use a Monte-Carlo limit that the caller may override,
which is how a zero tolerance makes them fail on purpose.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import curves as _curves
from . import metrics as _metrics
from . import model as _model
from . import probing as _probing
from . import sufficiency as _suff
from .errors import NoCrossing, PreconditionError

S = _model.InformationScope
FIGURE1_SCOPES = (S.FULL, S.COMPONENT1, S.NAIVE_BAYES, S.NAIVE_BAYES_CALIBRATED)
# Rows used by the quadratic-cost checks (probing families, threshold scans).
SUBSAMPLE = 100_000


@dataclass(frozen=True)
class Check:
    """One row of the verification table; ``passed`` iff ``measured <= limit``."""

    name: str
    kind: str
    measured: float
    limit: float
    detail: str = ""

    @property
    def passed(self):
        return bool(np.isfinite(self.measured) and self.measured <= self.limit)


@dataclass(frozen=True)
class SuiteResult:
    checks: list

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def table(self):
        width = max(len(c.name) for c in self.checks)
        lines = [f"{'check':<{width}}  kind   {'measured':>12}  {'limit':>12}  result"]
        for c in self.checks:
            res = "PASS" if c.passed else "FAIL"
            line = f"{c.name:<{width}}  {c.kind:<5}  {c.measured:>12.4g}  {c.limit:>12.4g}  {res}"
            if c.detail:
                line += f"  ({c.detail})"
            lines.append(line)
        n_fail = len(self.failures())
        lines.append(f"{len(self.checks) - n_fail}/{len(self.checks)} checks passed")
        return "\n".join(lines)


def thread_cap(default=None):
    """Worker count from ``BRIERLAB_THREADS`` (at least 1)."""
    raw = os.environ.get("BRIERLAB_THREADS")
    if raw is None:
        return default or min(4, os.cpu_count() or 1)
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


class _Suite:
    def __init__(self, model, sample, tolerance, grid_points):
        self.model = model
        self.sample = sample
        self.n = sample.n
        self.tolerance = tolerance
        self.grid = _curves.uniform_grid(grid_points)
        self.sub = slice(0, min(self.n, SUBSAMPLE))

    def mc(self, default):
        return default if self.tolerance is None else float(self.tolerance)

    # sample-level sanity

    def sample_checks(self):
        p, n = self.model.prior, self.n
        y = self.sample.labels
        out = [Check("sample.label_mean", "mc", abs(float(y.mean()) - p),
                     self.mc(4.0 * np.sqrt(p * (1 - p) / n)), "4-sigma binomial band")]
        for scope in _model.CALIBRATED_SCOPES:
            gap = abs(float(self.sample.psi(scope).mean()) - float(y.mean()))
            out.append(Check(f"sample.tower[{scope.value}]", "mc", gap,
                             self.mc(_metrics.estimation_tolerance(n)), "E[psi] = P[A]"))
        return out

    # decompositions and curve areas

    def decomposition_checks(self):
        out = []
        add_limit = self.mc(max(1e-3, 1.0 / np.sqrt(self.n)))
        decs = {}
        for scope in FIGURE1_SCOPES:
            group = S.NAIVE_BAYES if scope is S.NAIVE_BAYES_CALIBRATED else None
            preds = _metrics.Predictions.from_sample(self.sample, scope, group_scope=group)
            d = _metrics.decompose(preds)
            decs[scope] = d
            out.append(Check(f"decompose.additivity[{scope.value}]", "mc", abs(d.residual),
                             add_limit, f"BS={d.total:.6g}"))
            if scope in (S.COMPONENT1, S.NAIVE_BAYES):
                cv = _metrics.grouping_condvar(preds)
                out.append(Check(f"decompose.grouping_binned[{scope.value}]", "mc",
                                 abs(cv - d.grouping),
                                 self.mc(_metrics.estimation_tolerance(self.n)),
                                 "isotonic vs binned conditional variance"))
        # Twice the area between exact curves is the matching component.
        area = {s: _curves.curve_area(_curves.exact_curve(self.model, s, self.grid))
                for s in FIGURE1_SCOPES}
        pairs = [
            ("grouping[c1]", S.COMPONENT1, S.FULL, decs[S.COMPONENT1].grouping),
            ("grouping[nb]", S.NAIVE_BAYES_CALIBRATED, S.FULL, decs[S.NAIVE_BAYES].grouping),
            ("calibration[nb]", S.NAIVE_BAYES, S.NAIVE_BAYES_CALIBRATED,
             decs[S.NAIVE_BAYES].groupwise_calibration),
        ]
        for label, upper, lower, component in pairs:
            gap = abs(2.0 * (area[upper] - area[lower]) - component)
            out.append(Check(f"curves.area_between[{label}]", "mc", gap, self.mc(2e-3)))
        return out

    def area_checks(self):
        out = []
        y = self.sample.labels
        for scope in FIGURE1_SCOPES:
            z = self.sample.psi(scope)
            bs = _metrics.brier_score(z, y)
            exact = _curves.brier_curve(z, y)
            out.append(Check(f"curves.area_identity[{scope.value}]", "exact",
                             abs(2.0 * _curves.curve_area(exact) - bs), 1e-9,
                             "breakpoint grid"))
            coarse = _curves.brier_curve(z, y, _curves.uniform_grid(1001), breakpoints=False)
            out.append(Check(f"curves.area_identity_1001[{scope.value}]", "exact",
                             abs(2.0 * _curves.curve_area(coarse) - bs), 1e-4,
                             "1001-point grid"))
        return out

    # exact-curve structure

    def curve_checks(self):
        m, grid = self.model, self.grid
        cur = {s: _curves.exact_curve(m, s, grid) for s in _model.ALL_SCOPES}
        v = {s: c.values for s, c in cur.items()}
        order = [(S.FULL, S.NAIVE_BAYES_CALIBRATED), (S.NAIVE_BAYES_CALIBRATED, S.NAIVE_BAYES),
                 (S.FULL, S.COMPONENT1), (S.FULL, S.COMPONENT2),
                 (S.COMPONENT1, S.PRIOR), (S.COMPONENT2, S.PRIOR)]
        out = []
        for lo, hi in order:
            excess = float(np.max(v[lo] - v[hi]))
            out.append(Check(f"curves.order[{lo.value}<={hi.value}]", "exact", excess, 1e-12))
        p = m.prior
        tent = np.minimum((1 - grid) * p, grid * (1 - p))
        out.append(Check("curves.prior_tent", "exact", float(np.max(np.abs(v[S.PRIOR] - tent))),
                         1e-15))
        for scope in _model.CALIBRATED_SCOPES:
            rep = _curves.curve_bounds_check(cur[scope], _model.refinement_exact(m, scope), 0.0)
            out.append(Check(f"curves.bounds[{scope.value}]", "exact",
                             max(rep.lower_margin, rep.upper_margin), 1e-9,
                             "min(t,1-t) R <= B <= R"))
        fine = _curves.uniform_grid(9999)
        t_peak, _ = _curves.exact_curve(m, S.FULL, fine).peak
        q = _model.posterior_quantile(m, S.FULL, 1.0 - p)
        out.append(Check("curves.argmax_quantile[full]", "exact", abs(t_peak - q),
                         float(fine[1] - fine[0]), "argmax vs (1-p)-quantile"))
        back = _curves.prior_shift_transform(
            _curves.prior_shift_transform(cur[S.FULL], 0.5), p)
        out.append(Check("curves.prior_shift_roundtrip", "exact",
                         float(np.max(np.abs(back.values - v[S.FULL]))), 1e-12,
                         f"p={p:g} -> 0.5 -> p"))
        half = m.with_prior(0.5)
        via_curve = _curves.bayes_error_from_curve(
            lambda t: _model.brier_curve_value(half, S.FULL, t), p)
        out.append(Check("curves.bayes_error_duality", "exact",
                         abs(via_curve - _model.bayes_error_exact(m, S.FULL)), 1e-12,
                         "2 B_half(1-p) vs direct"))
        return out

    def sampled_curve_checks(self):
        out = []
        y = self.sample.labels
        psi = self.sample.psi(S.FULL)
        emp = _curves.brier_curve(psi, y, self.grid, breakpoints=False)
        ref = _metrics.refinement(psi)
        rep = _curves.curve_bounds_check(emp, ref, 0.0)
        out.append(Check("curves.bounds_sampled[full]", "mc",
                         max(rep.lower_margin, rep.upper_margin),
                         self.mc(_metrics.estimation_tolerance(self.n))))
        try:
            rb = _curves.refinement_bounds(psi, y)
            margin = max(rb.lower - rb.refinement, rb.refinement - rb.upper)
            out.append(Check("curves.correlation_bounds[full]", "mc", margin,
                             self.mc(_metrics.estimation_tolerance(self.n)),
                             f"rho={rb.correlation:.4g}"))
        except PreconditionError as exc:
            out.append(Check("curves.correlation_bounds[full]", "mc", np.inf, 0.0, str(exc)))
        return out

    # probing reduction

    def probing_checks(self):
        sub = self.sub
        psi = self.sample.psi(S.FULL)[sub]
        grid = _probing.default_grid(99)
        out = []
        bayes = _probing.probing_bound(_probing.ClassifierFamily.from_scores(psi, grid), psi)
        out.append(Check("probing.bayes_family_lhs", "mc", bayes.calibration_loss_lhs,
                         self.mc(1e-3)))
        rng = _model.make_rng(self.sample.seed if self.sample.seed >= 0 else 0)
        worst_id, worst_bound = 0.0, -np.inf
        for _ in range(5):
            fam = _probing.ClassifierFamily.from_scores(psi, grid)
            flip = rng.random(fam.decisions.shape) < 0.05
            rep = _probing.probing_bound(_probing.ClassifierFamily(grid, fam.decisions ^ flip),
                                         psi)
            worst_id = max(worst_id, abs(rep.calibration_loss_lhs - rep.combined_regret))
            worst_bound = max(worst_bound, rep.calibration_loss_lhs - rep.regret_integral_rhs)
        out.append(Check("probing.lhs_equals_combined", "exact", worst_id, 1e-12,
                         "5 perturbed families"))
        out.append(Check("probing.lhs_below_rhs", "exact", worst_bound, 1e-12,
                         "5 perturbed families"))
        y = self.sample.labels[sub]
        nb = self.sample.psi(S.NAIVE_BAYES)[sub]
        c1 = self.sample.psi(S.COMPONENT1)[sub]
        try:
            cross = _probing.crossing_point(_curves.exact_curve(self.model, S.NAIVE_BAYES, self.grid),
                                            _curves.exact_curve(self.model, S.COMPONENT1, self.grid))
        except NoCrossing:
            out.append(Check("probing.combine_two", "mc", 0.0, 0.0, "curves do not cross"))
        else:
            z1, z2 = (nb, c1) if cross.first == 1 else (c1, nb)
            comb = _probing.combine_two(z1, z2, cross.t)
            gain = _metrics.brier_score(comb, y) - min(_metrics.brier_score(nb, y),
                                                       _metrics.brier_score(c1, y))
            out.append(Check("probing.combine_two", "mc", gain, self.mc(1e-3),
                             f"switch at t={cross.t:.4g}"))
        return out

    # sufficiency

    def sufficiency_checks(self):
        m, sub = self.model, self.sub
        psi = self.sample.psi(S.FULL)[sub]
        y = self.sample.labels[sub]
        out = []
        ok, tau = _suff.comonotonicity_check(np.exp(psi), psi)
        out.append(Check("sufficiency.comonotone[exp(psi)]", "exact", 0.0 if ok else 1.0, 0.0,
                         f"tau={tau:.4g}"))
        lstar = lambda t: _model.bayes_loss_exact(m, S.FULL, t)  # noqa: E731
        grid = _suff.interior_grid(199)
        chk = _suff.threshold_sufficiency_check(np.exp(psi), y, lstar, grid,
                                                tolerance=self.tolerance)
        out.append(Check("sufficiency.threshold[exp(psi)]", "mc",
                         float(np.max(np.abs(chk.gaps) - chk.tolerance))
                         if chk.monotone else np.inf, 0.0,
                         f"max gap {chk.max_gap:.3g}, monotone={chk.monotone}"))
        # Population check: exp(psi) has CDF F_psi(log c).
        def cdfs(c):
            with np.errstate(divide="ignore"):
                u = np.clip(np.log(c), 0.0, 1.0)
            return _model.posterior_class_cdfs(m, S.FULL, u)
        pop = _suff.population_threshold_curve(cdfs, m.prior, grid, (1.0, np.e))
        exact = np.asarray([lstar(t) for t in grid])
        out.append(Check("sufficiency.population[exp(psi)]", "exact",
                         float(np.max(np.abs(pop - exact))), 3e-9))
        if m.cov[0, 1] == 0.0:
            rep = _suff.counterexample_harness(m)
            out.append(Check("sufficiency.counterexample", "exact", 0.0 if rep.certified else 1.0,
                             0.0, f"{rep.x2_vs_x1.relation.value}, "
                                  f"x1 vs prior gap {rep.x1_vs_prior.max_gap:.3g}"))
        return out


def run_suite(model, sample, tolerance=None, grid_points=1001, threads=None):
    """Run every check; groups run on a thread pool, results keep a fixed order."""
    suite = _Suite(model, sample, tolerance, grid_points)
    groups = [suite.sample_checks, suite.decomposition_checks, suite.area_checks,
              suite.curve_checks, suite.sampled_curve_checks, suite.probing_checks,
              suite.sufficiency_checks]
    with ThreadPoolExecutor(max_workers=threads or thread_cap()) as pool:
        results = list(pool.map(lambda f: f(), groups))
    return SuiteResult([c for group in results for c in group])
