import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import expit, logit

from brierlab import curves, model, sufficiency
from brierlab.errors import DomainError, PreconditionError
from brierlab.model import InformationScope as S
from brierlab.sufficiency import Relation


def brute_comonotone(s, psi):
    n = len(s)
    return all((s[i] < s[j]) == (psi[i] < psi[j]) for i in range(n) for j in range(n))


class TestComonotonicity:
    def test_increasing_transform(self, rng):
        psi = rng.uniform(size=500)
        ok, tau = sufficiency.comonotonicity_check(np.exp(3 * psi), psi)
        assert ok and tau == pytest.approx(1.0)

    def test_ties_must_coincide(self):
        psi = np.array([0.1, 0.2, 0.2, 0.4])
        assert sufficiency.comonotonicity_check([1, 2, 2, 3], psi)[0]
        assert not sufficiency.comonotonicity_check([1, 2, 3, 4], psi)[0]
        assert not sufficiency.comonotonicity_check([1, 1, 2, 3], psi)[0]

    def test_decreasing_transform(self, rng):
        psi = rng.uniform(size=50)
        ok, tau = sufficiency.comonotonicity_check(-psi, psi)
        assert not ok and tau == pytest.approx(-1.0)

    def test_validation(self):
        with pytest.raises(DomainError):
            sufficiency.comonotonicity_check([1, 2], [1])
        with pytest.raises(DomainError):
            sufficiency.comonotonicity_check([1], [1])

    @settings(max_examples=200, deadline=None)
    @given(pairs=st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4)), min_size=2,
                          max_size=12))
    def test_against_pairwise_definition(self, pairs):
        s = [p[0] for p in pairs]
        psi = [p[1] for p in pairs]
        assert sufficiency.comonotonicity_check(s, psi)[0] == brute_comonotone(s, psi)


class TestDominance:
    grid = np.linspace(0, 1, 5)

    def curve(self, values):
        return curves.LossCurve(self.grid, values, 0.5)

    def test_relations(self):
        base = self.curve([0, 0.2, 0.2, 0.1, 0])
        lower = self.curve([0, 0.1, 0.2, 0.1, 0])
        crossing = self.curve([0, 0.1, 0.3, 0.1, 0])
        assert sufficiency.curve_dominance(base, base, 0).relation is Relation.EQUAL
        assert sufficiency.curve_dominance(lower, base, 0).relation is Relation.DOMINATES
        assert sufficiency.curve_dominance(base, lower, 0).relation is Relation.DOMINATED_BY
        v = sufficiency.curve_dominance(crossing, base, 0)
        assert v.relation is Relation.CROSSES
        assert v.max_gap == pytest.approx(0.1) and v.argmax_t in (0.25, 0.5)

    def test_tolerance_absorbs_small_gaps(self):
        a = self.curve([0, 0.2, 0.2, 0.1, 0])
        b = self.curve([0, 0.2 + 1e-9, 0.2 - 1e-9, 0.1, 0])
        assert sufficiency.curve_dominance(a, b, 1e-8).relation is Relation.EQUAL

    def test_grid_mismatch(self):
        a = self.curve([0, 0.2, 0.2, 0.1, 0])
        b = curves.LossCurve([0, 1], [0, 0], 0.5)
        with pytest.raises(DomainError):
            sufficiency.curve_dominance(a, b, 0)

    def test_full_dominates_component(self, canonical):
        full = curves.exact_curve(canonical, S.FULL)
        c1 = curves.exact_curve(canonical, S.COMPONENT1)
        assert sufficiency.curve_dominance(full, c1, 1e-9).relation is Relation.DOMINATES


class TestThresholdCheck:
    def lstar(self, m):
        return lambda t: model.bayes_loss_exact(m, S.FULL, t)

    def test_posterior_and_transform_are_sufficient(self, canonical, medium_sample):
        psi, y = medium_sample.psi(S.FULL), medium_sample.labels
        for s in (psi, np.exp(psi), logit(np.clip(psi, 1e-300, None))):
            chk = sufficiency.threshold_sufficiency_check(s, y, self.lstar(canonical),
                                                          sufficiency.interior_grid(199))
            assert chk.sufficient and chk.monotone

    def test_component_is_not_sufficient(self, canonical, medium_sample):
        chk = sufficiency.threshold_sufficiency_check(
            medium_sample.psi(S.COMPONENT1), medium_sample.labels, self.lstar(canonical),
            sufficiency.interior_grid(199))
        assert not chk.sufficient
        assert chk.max_gap > 0.02

    def test_thresholds_against_brute_force(self, rng):
        s = rng.integers(0, 8, size=60).astype(float)
        y = (rng.random(60) < s / 8).astype(int)
        grid = np.array([0.2, 0.5, 0.8])
        chk = sufficiency.threshold_sufficiency_check(s, y, lambda t: 0.0, grid, tolerance=1.0)
        for t, loss in zip(grid, chk.losses):
            brute = min(np.mean((1 - t) * (y == 1) * (s <= c) + t * (y == 0) * (s > c))
                        for c in np.r_[-np.inf, np.unique(s)])
            assert loss == pytest.approx(brute, abs=1e-15)

    def test_oracle_required(self):
        with pytest.raises(PreconditionError):
            sufficiency.threshold_sufficiency_check([0.1, 0.2], [0, 1], None)


class TestPopulationThresholds:
    def test_transforms_reach_bayes_loss(self, canonical):
        grid = sufficiency.interior_grid(99)
        exact = model.bayes_loss_exact(canonical, S.FULL, grid)

        def cdfs_of(inverse):
            return lambda c: model.posterior_class_cdfs(canonical, S.FULL,
                                                       np.clip(inverse(c), 0.0, 1.0))

        lo, hi = 1e-12, 1 - 1e-12
        cases = [
            (lambda c: c, (0.0, 1.0)),
            (np.log, (1.0, np.e)),
            (expit, (logit(lo), logit(hi))),
            (np.cbrt, (0.0, 1.0)),
        ]
        for inverse, support in cases:
            got = sufficiency.population_threshold_curve(cdfs_of(inverse), canonical.prior, grid,
                                                         support)
            assert np.max(np.abs(got - exact)) <= 1e-9

    def test_component_has_positive_gap(self, canonical):
        grid = sufficiency.interior_grid(99)
        exact = model.bayes_loss_exact(canonical, S.FULL, grid)
        got = sufficiency.population_threshold_curve(
            lambda c: model.posterior_class_cdfs(canonical, S.COMPONENT1, c),
            canonical.prior, grid, (0.0, 1.0))
        assert np.min(got - exact) >= -1e-12
        assert np.max(got - exact) > 0.02


class TestCounterexample:
    def test_certified_on_independence_model(self, independent):
        rep = sufficiency.counterexample_harness(independent)
        assert rep.certified and rep.dominance_holds and rep.x1_informative
        assert rep.x2_vs_x1.relation is Relation.DOMINATED_BY
        assert rep.x1_vs_prior.max_gap > 10 * rep.tolerance
        assert rep.joint_dominates
        assert "certified" in rep.summary()

    def test_swapped_means_not_certified(self):
        m = model.GaussianBinaryModel(0.1, (0, 0), (1, 2), np.eye(2))
        rep = sufficiency.counterexample_harness(m)
        assert rep.x2_vs_x1.relation is Relation.DOMINATES
        assert not rep.certified

    def test_correlated_model_rejected(self, canonical):
        with pytest.raises(PreconditionError):
            sufficiency.counterexample_harness(canonical)
