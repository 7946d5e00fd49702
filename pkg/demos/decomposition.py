"""Decompose the Brier score of four classifiers on a simulated sample.

Twice the area between two exact curves equals the matching loss component,
which the last block prints next to the sample estimate.
"""

from brierlab import curves, metrics, model
from brierlab.model import InformationScope as S

m = model.canonical_model()
smp = model.sample(m, 1_000_000, seed=20240607)

print(f"{'scope':<8} {'BS':>8} {'refine':>8} {'group':>8} {'calib':>8} {'resid':>9}")
decs = {}
for scope in (S.FULL, S.COMPONENT1, S.NAIVE_BAYES, S.NAIVE_BAYES_CALIBRATED):
    group = S.NAIVE_BAYES if scope is S.NAIVE_BAYES_CALIBRATED else None
    d = metrics.decompose(metrics.Predictions.from_sample(smp, scope, group))
    decs[scope] = d
    print(f"{scope.value:<8} {d.total:8.5f} {d.refinement:8.5f} {d.grouping:8.5f} "
          f"{d.groupwise_calibration:8.5f} {d.residual:+9.1e}")

area = {s: curves.curve_area(curves.exact_curve(m, s)) for s in decs}
print("\ncomponent              2 x area between   sample estimate")
rows = [("grouping, Component1", S.COMPONENT1, S.FULL, decs[S.COMPONENT1].grouping),
        ("grouping, NaiveBayes", S.NAIVE_BAYES_CALIBRATED, S.FULL, decs[S.NAIVE_BAYES].grouping),
        ("calibration, NaiveBayes", S.NAIVE_BAYES, S.NAIVE_BAYES_CALIBRATED,
         decs[S.NAIVE_BAYES].groupwise_calibration)]
for name, upper, lower, est in rows:
    print(f"{name:<24} {2 * (area[upper] - area[lower]):15.5f} {est:17.5f}")
