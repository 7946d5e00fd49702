"""``brierlab`` command-line front end.

Subcommands ``simulate``, ``curves``, ``decompose``, ``probe``, ``verify`` and
``report`` read a ``key = value`` config file (see :func:`brierlab.io.parse_config`);
command-line flags override config values. Exit codes: 0 success, 1 invalid
config or input, 2 I/O failure, 3 verification failure.
"""

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import curves as _curves
from . import io as _io
from . import metrics as _metrics
from . import model as _model
from . import probing as _probing
from . import sufficiency as _suff
from . import verify as _verify
from .errors import BrierLabError

S = _model.InformationScope

EXIT_OK, EXIT_INVALID, EXIT_IO, EXIT_FAILED = 0, 1, 2, 3

# (label, scope, line style) in the layouts of the two reference figures.
FIGURE1_LAYOUT = [
    ("Full (true posterior)", S.FULL, "solid"),
    ("Naive Bayes", S.NAIVE_BAYES, "dashed"),
    ("Component 1", S.COMPONENT1, "dashdot"),
    ("Naive Bayes, calibrated", S.NAIVE_BAYES_CALIBRATED, "dotted"),
]
FIGURE2_LAYOUT = [
    ("X1 and X2", S.FULL, "dashed"),
    ("X1 only", S.COMPONENT1, "dotted"),
    ("X2 only", S.COMPONENT2, "dashdot"),
    ("prior only", S.PRIOR, "solid"),
]
STYLE_CYCLE = ["solid", "dashed", "dashdot", "dotted"]


@dataclass(frozen=True)
class RunConfig:
    """Everything a subcommand needs; built from defaults, config file, then flags."""

    model: _model.GaussianBinaryModel = field(default_factory=_model.canonical_model)
    n: int = 1_000_000
    seed: int = 20240607
    grid_points: int = 1001
    tolerance: float = None
    out: Path = Path("brierlab-out")
    scopes: tuple = ()

    def __post_init__(self):
        if self.n < 1:
            raise _io.InputError(f"n must be at least 1, got {self.n}")
        if self.grid_points < 3:
            raise _io.InputError(f"grid_points must be at least 3, got {self.grid_points}")
        if self.seed < 0:
            raise _io.InputError("seed must be a nonnegative integer")
        if self.tolerance is not None and not self.tolerance >= 0:
            raise _io.InputError("tolerance must be nonnegative")

    @property
    def diagonal(self):
        return self.model.cov[0, 1] == 0.0

    def layout(self):
        """Curves to draw: the config's scopes, else the matching figure layout."""
        if self.scopes:
            return [(s.value, s, STYLE_CYCLE[i % 4]) for i, s in enumerate(self.scopes)]
        return FIGURE2_LAYOUT if self.diagonal else FIGURE1_LAYOUT


def build_config(args):
    cfg = _io.load_config(args.config) if args.config else {}
    overrides = {"seed": args.seed, "n": args.n, "grid_points": args.grid,
                 "tolerance": args.tolerance, "out": args.out}
    for key, value in overrides.items():
        if value is not None:
            cfg[key] = value
    if args.scopes:
        try:
            cfg["scopes"] = [S.parse(s) for s in args.scopes.split(",") if s.strip()]
        except ValueError as exc:
            raise _io.InputError(str(exc)) from None
    base = _model.canonical_model()
    model = _model.GaussianBinaryModel(
        prior=cfg.get("prior", base.prior),
        mean_neg=cfg.get("mean_neg", base.mean_neg),
        mean_pos=cfg.get("mean_pos", base.mean_pos),
        cov=cfg.get("cov", base.cov),
    )
    run = RunConfig(model=model)
    return replace(run, n=cfg.get("n", run.n), seed=cfg.get("seed", run.seed),
                   grid_points=cfg.get("grid_points", run.grid_points),
                   tolerance=cfg.get("tolerance", run.tolerance),
                   out=Path(cfg.get("out", run.out)),
                   scopes=tuple(cfg.get("scopes", ())))


def _outdir(config):
    config.out.mkdir(parents=True, exist_ok=True)
    return config.out


def _draw(config, sample_path=None):
    if sample_path:
        return _io.read_sample_csv(sample_path, seed=config.seed)
    return _model.sample(config.model, config.n, config.seed)


def _pool_map(func, items):
    with ThreadPoolExecutor(max_workers=_verify.thread_cap()) as pool:
        return list(pool.map(func, items))


def cmd_simulate(config, args):
    out = _outdir(config)
    smp = _model.sample(config.model, config.n, config.seed)
    path = out / "sample.csv"
    _io.write_sample_csv(path, smp)
    print(f"wrote {path} ({smp.n} rows, label mean {smp.labels.mean():.6g})")
    return EXIT_OK


def cmd_curves(config, args):
    out = _outdir(config)
    grid = _curves.uniform_grid(config.grid_points)
    layout = config.layout()
    made = _pool_map(lambda item: _curves.exact_curve(config.model, item[1], grid), layout)
    series = []
    for (label, scope, style), curve in zip(layout, made):
        _io.write_curve_csv(out / f"curve_{scope.value}.csv", curve)
        series.append((label, curve, style))
    figure = ("joint, components and prior" if config.diagonal and not config.scopes
              else "full, naive Bayes and component curves")
    _io.write_curves_svg(out / "curves.svg", series,
                         title=f"Brier curves, prior {config.model.prior:g}")
    print(f"wrote {len(series)} curve CSVs and curves.svg to {out} ({figure})")
    ok = True
    if not config.scopes:
        if config.diagonal:
            rep = _suff.counterexample_harness(config.model, grid)
            (out / "harness.txt").write_text(rep.summary() + "\n")
            print(rep.summary())
            ok = rep.certified
        else:
            v = {s: c.values for (_, s, _), c in zip(layout, made)}
            checks = [(S.FULL, S.NAIVE_BAYES_CALIBRATED), (S.NAIVE_BAYES_CALIBRATED, S.NAIVE_BAYES),
                      (S.FULL, S.COMPONENT1)]
            for lo, hi in checks:
                excess = float(np.max(v[lo] - v[hi]))
                holds = excess <= 1e-12
                ok &= holds
                print(f"ordering B_{lo.value} <= B_{hi.value}: "
                      f"{'holds' if holds else 'VIOLATED'} (max excess {excess:.3g})")
    return EXIT_OK if ok else EXIT_FAILED


def _decompose_scope(smp, scope):
    group = S.NAIVE_BAYES if scope is S.NAIVE_BAYES_CALIBRATED else None
    return _metrics.decompose(_metrics.Predictions.from_sample(smp, scope, group_scope=group))


def cmd_decompose(config, args):
    out = _outdir(config)
    if args.predictions:
        preds = _io.read_predictions_csv(args.predictions)
        if preds.oracle_psi is None:
            raise _io.InputError(f"{args.predictions}: the psi column is required")
        if preds.group_score is None:
            preds = replace(preds, group_score=preds.z)
        results = [("", _metrics.decompose(preds))]
        n = preds.n
    else:
        smp = _draw(config, args.sample)
        scopes = config.scopes or _verify.FIGURE1_SCOPES
        decs = _pool_map(lambda s: _decompose_scope(smp, s), scopes)
        results = [(f"_{s.value}", d) for s, d in zip(scopes, decs)]
        n = smp.n
    limit = config.tolerance if config.tolerance is not None else max(1e-3, 1.0 / np.sqrt(n))
    ok = True
    for suffix, d in results:
        _io.write_decomposition_csv(out / f"decomposition{suffix}.csv", d)
        add = d.is_additive(limit)
        ok &= add
        print(f"{suffix.lstrip('_') or 'input':>6}: refinement {d.refinement:.6g}  grouping "
              f"{d.grouping:.6g}  group-wise {d.groupwise_calibration:.6g}  BS {d.total:.6g}  "
              f"residual {d.residual:.3g}{'' if add else '  NOT ADDITIVE'}")
    return EXIT_OK if ok else EXIT_FAILED


def cmd_probe(config, args):
    out = _outdir(config)
    limit = config.tolerance if config.tolerance is not None else 1e-9
    if args.family:
        family = _io.read_family_csv(args.family)
        smp = _draw(config, args.sample)
        if smp.n != family.n:
            raise _io.InputError(f"family has {family.n} instances but the sample has {smp.n}")
        runs = [("", family, smp.psi(S.FULL))]
    else:
        smp = _draw(config, args.sample)
        grid = _probing.default_grid(99)
        scopes = config.scopes or _verify.FIGURE1_SCOPES
        psi = smp.psi(S.FULL)
        runs = [(f"_{s.value}", _probing.ClassifierFamily.from_scores(smp.psi(s), grid), psi)
                for s in scopes]
    ok = True
    for suffix, family, psi in runs:
        rep = _probing.probing_bound(family, psi)
        _io.write_probing_csv(out / f"probe{suffix}.csv", rep)
        holds = rep.holds(limit)
        ok &= holds
        print(f"{suffix.lstrip('_') or 'family':>6}: lhs {rep.calibration_loss_lhs:.6g}  "
              f"combined {rep.combined_regret:.6g}  rhs {rep.regret_integral_rhs:.6g}"
              f"{'' if holds else '  BOUND VIOLATED'}")
    return EXIT_OK if ok else EXIT_FAILED


def cmd_verify(config, args):
    smp = _draw(config, args.sample)
    result = _verify.run_suite(config.model, smp, config.tolerance, config.grid_points)
    print(result.table())
    return EXIT_OK if result.passed else EXIT_FAILED


def cmd_report(config, args):
    out = _outdir(config)
    codes = {}
    for name, cmd in (("simulate", cmd_simulate), ("curves", cmd_curves),
                      ("decompose", cmd_decompose), ("probe", cmd_probe)):
        print(f"== {name}")
        codes[name] = cmd(config, args)
    smp = _model.sample(config.model, config.n, config.seed)
    result = _verify.run_suite(config.model, smp, config.tolerance, config.grid_points)
    codes["verify"] = EXIT_OK if result.passed else EXIT_FAILED
    print("== verify")
    print(result.table())
    lines = [f"brierlab report (n={config.n}, seed={config.seed}, prior={config.model.prior:g})"]
    lines += [f"{k:<10} {'ok' if v == EXIT_OK else 'FAILED'}" for k, v in codes.items()]
    lines += ["", result.table()]
    (out / "report.txt").write_text("\n".join(lines) + "\n")
    return EXIT_OK if all(v == EXIT_OK for v in codes.values()) else EXIT_FAILED


COMMANDS = {"simulate": cmd_simulate, "curves": cmd_curves, "decompose": cmd_decompose,
            "probe": cmd_probe, "verify": cmd_verify, "report": cmd_report}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def make_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value config file")
    common.add_argument("--out", help="output directory")
    common.add_argument("--seed", type=int, help="RNG seed (nonnegative integer)")
    common.add_argument("--n", type=int, help="sample size")
    common.add_argument("--grid", type=int, help="points of the cost grid on [0, 1]")
    common.add_argument("--tolerance", type=float,
                        help="override for every sample-based tolerance")
    common.add_argument("--scopes", help="comma list of full,c1,c2,nb,nbcal,prior")
    common.add_argument("--sample", help="read the population sample from this CSV")
    parser = _Parser(prog="brierlab", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "simulate": "draw a population sample and write sample.csv",
        "curves": "exact curves per scope as CSV plus curves.svg",
        "decompose": "Brier-score decomposition per scope or of --predictions",
        "probe": "probing-reduction bound for threshold families or --family",
        "verify": "run the invariant suite; exit 3 on any failure",
        "report": "all of the above into one output directory",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, parents=[common], help=text, description=text)
        if name == "decompose":
            p.add_argument("--predictions", help="CSV with header z,label[,psi,group_score]")
        if name == "probe":
            p.add_argument("--family", help="CSV with header instance_id,t,decision")
    return parser


def main(argv=None):
    parser = make_parser()
    args = parser.parse_args(argv)
    for attr in ("predictions", "family"):
        if not hasattr(args, attr):
            setattr(args, attr, None)
    try:
        config = build_config(args)
        return COMMANDS[args.command](config, args)
    except (BrierLabError, ValueError) as exc:
        print(f"brierlab: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"brierlab: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
