"""Probing bound, two-estimator combination and a sufficiency certificate."""

import numpy as np

from brierlab import curves, metrics, model, probing, sufficiency
from brierlab.model import InformationScope as S

m = model.canonical_model()
smp = model.sample(m, 100_000, seed=1)
psi, y = smp.psi(S.FULL), smp.labels
grid = probing.default_grid(99)
rng = np.random.default_rng(1)

# Threshold families on a coarser score, with increasing decision noise.
for rate in (0.0, 0.05, 0.2):
    base = probing.ClassifierFamily.from_scores(smp.psi(S.COMPONENT1), grid)
    fam = probing.ClassifierFamily(grid, base.decisions ^ (rng.random(base.decisions.shape) < rate))
    rep = probing.probing_bound(fam, psi)
    print(f"flip rate {rate:4.2f}: calibration loss {rep.calibration_loss_lhs:.5f} "
          f"<= regret integral {rep.regret_integral_rhs:.5f}")

nb, c1 = curves.exact_curve(m, S.NAIVE_BAYES), curves.exact_curve(m, S.COMPONENT1)
cross = probing.crossing_point(nb, c1)
z_nb, z_c1 = smp.psi(S.NAIVE_BAYES), smp.psi(S.COMPONENT1)
z1, z2 = (z_nb, z_c1) if cross.first == 1 else (z_c1, z_nb)
combined = probing.combine_two(z1, z2, cross.t)
print(f"\ncurves cross at t = {cross.t:.4f}")
for name, z in (("NaiveBayes", z_nb), ("Component1", z_c1), ("combined", combined)):
    print(f"  BS({name}) = {metrics.brier_score(z, y):.5f}")

lstar = lambda t: model.bayes_loss_exact(m, S.FULL, t)  # noqa: E731
for name, s in (("exp(psi)", np.exp(psi)), ("Component1", smp.psi(S.COMPONENT1))):
    ok, tau = sufficiency.comonotonicity_check(s, psi)
    chk = sufficiency.threshold_sufficiency_check(s, y, lstar, sufficiency.interior_grid(199))
    print(f"\n{name}: comonotone {ok} (tau {tau:.3f}), threshold-sufficient {chk.sufficient}, "
          f"max gap {chk.max_gap:.4f}")

print()
print(sufficiency.counterexample_harness(model.independence_model()).summary())
