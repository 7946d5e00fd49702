"""CSV, SVG and config-file formats.

All numbers are written with 17 significant digits, ``.`` as decimal
separator and ``\\n`` line endings, so outputs of identical runs are
byte-identical and diffs are meaningful.
"""

import csv
import math
from pathlib import Path

import numpy as np

from .curves import LossCurve
from .errors import BrierLabError
from .metrics import Predictions
from .model import ALL_SCOPES, InformationScope, PopulationSample
from .probing import ClassifierFamily


class InputError(BrierLabError, ValueError):
    """Malformed configuration or input file."""


SAMPLE_COLUMNS = ["x1", "x2", "label"] + [f"psi_{s.value}" for s in ALL_SCOPES]
DECOMPOSITION_COLUMNS = ["refinement", "grouping", "groupwise_calibration", "total"]
PROBING_COLUMNS = ["lhs", "combined_regret", "rhs"]
VERDICT_COLUMNS = ["relation", "max_gap", "argmax_t"]
FAMILY_COLUMNS = ["instance_id", "t", "decision"]


def fmt(x):
    return format(float(x), ".17g")


def _write_rows(path, header, rows):
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def write_sample_csv(path, sample):
    cols = [sample.features[:, 0], sample.features[:, 1], sample.labels]
    cols += [sample.posteriors[s] for s in ALL_SCOPES]
    table = np.column_stack([np.asarray(c, dtype=float) for c in cols])
    fmts = ["%.17g", "%.17g", "%d"] + ["%.17g"] * len(ALL_SCOPES)
    np.savetxt(path, table, fmt=fmts, delimiter=",", header=",".join(SAMPLE_COLUMNS),
               comments="", newline="\n")


def read_sample_csv(path, seed=-1):
    with open(path, newline="") as fh:
        header = fh.readline().strip().split(",")
    if header != SAMPLE_COLUMNS:
        raise InputError(f"{path}: line 1: expected header {','.join(SAMPLE_COLUMNS)}")
    try:
        table = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc
    if table.shape[1] != len(SAMPLE_COLUMNS):
        raise InputError(f"{path}: expected {len(SAMPLE_COLUMNS)} columns")
    posteriors = {s: table[:, 3 + i] for i, s in enumerate(ALL_SCOPES)}
    return PopulationSample(table[:, :2], table[:, 2].astype(np.int8), posteriors, seed)


def write_curve_csv(path, curve):
    _write_rows(path, ["t", "value"],
                ((fmt(t), fmt(v)) for t, v in zip(curve.grid, curve.values)))


def read_curve_csv(path, prior, kind="brier"):
    table = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return LossCurve(table[:, 0], table[:, 1], prior, kind)


def write_decomposition_csv(path, decomposition):
    d = decomposition
    _write_rows(path, DECOMPOSITION_COLUMNS,
                [[fmt(d.refinement), fmt(d.grouping), fmt(d.groupwise_calibration),
                  fmt(d.total)]])


def write_probing_csv(path, report):
    _write_rows(path, PROBING_COLUMNS,
                [[fmt(report.calibration_loss_lhs), fmt(report.combined_regret),
                  fmt(report.regret_integral_rhs)]])


def write_verdict_csv(path, verdict):
    _write_rows(path, VERDICT_COLUMNS,
                [[verdict.relation.value, fmt(verdict.max_gap), fmt(verdict.argmax_t)]])


def read_predictions_csv(path):
    """Read ``z,label[,psi,group_score]`` rows; errors name the offending line."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise InputError(f"{path}: line 1: empty file") from None
        allowed = (["z", "label"], ["z", "label", "psi"], ["z", "label", "psi", "group_score"])
        if header not in allowed:
            raise InputError(f"{path}: line 1: header must be z,label[,psi,group_score]")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise InputError(f"{path}: line {lineno}: expected {len(header)} fields")
            try:
                vals = [float(v) for v in row]
            except ValueError:
                raise InputError(f"{path}: line {lineno}: non-numeric field") from None
            if not 0.0 <= vals[0] <= 1.0:
                raise InputError(f"{path}: line {lineno}: z outside [0, 1]")
            if vals[1] not in (0.0, 1.0):
                raise InputError(f"{path}: line {lineno}: label must be 0 or 1")
            if len(vals) > 2 and not 0.0 <= vals[2] <= 1.0:
                raise InputError(f"{path}: line {lineno}: psi outside [0, 1]")
            rows.append(vals)
    if not rows:
        raise InputError(f"{path}: no data rows")
    table = np.asarray(rows)
    psi = table[:, 2] if table.shape[1] > 2 else None
    group = table[:, 3] if table.shape[1] > 3 else None
    return Predictions(table[:, 0], table[:, 1].astype(np.int8), psi, group)


def write_family_csv(path, family):
    n, m = family.decisions.shape
    ids = np.repeat(np.arange(n), m)
    ts = np.tile(family.grid, n)
    dec = family.decisions.reshape(-1).astype(int)
    _write_rows(path, FAMILY_COLUMNS,
                ((str(i), fmt(t), str(d)) for i, t, d in zip(ids, ts, dec)))


def read_family_csv(path):
    """Read ``instance_id,t,decision`` rows into a complete decision matrix."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = [h.strip() for h in next(reader, [])]
        if header != FAMILY_COLUMNS:
            raise InputError(f"{path}: line 1: header must be {','.join(FAMILY_COLUMNS)}")
        ids, ts, dec = [], [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                i, t, d = int(row[0]), float(row[1]), int(row[2])
            except (ValueError, IndexError):
                raise InputError(f"{path}: line {lineno}: malformed row") from None
            if d not in (0, 1):
                raise InputError(f"{path}: line {lineno}: decision must be 0 or 1")
            ids.append(i)
            ts.append(t)
            dec.append(d)
    if not ids:
        raise InputError(f"{path}: no data rows")
    uid, row_idx = np.unique(ids, return_inverse=True)
    grid, col_idx = np.unique(ts, return_inverse=True)
    if len(ids) != uid.size * grid.size:
        raise InputError(f"{path}: every instance needs exactly one decision per t")
    if not np.array_equal(uid, np.arange(uid.size)):
        raise InputError(f"{path}: instance ids must be 0..n-1")
    mat = np.zeros((uid.size, grid.size), dtype=bool)
    filled = np.zeros_like(mat)
    mat[row_idx, col_idx] = np.asarray(dec, dtype=bool)
    filled[row_idx, col_idx] = True
    if not filled.all():
        raise InputError(f"{path}: duplicate (instance_id, t) pairs")
    return ClassifierFamily(grid, mat)


# Stroke patterns for the four curve styles of the figures.
DASHES = {"solid": None, "dashed": "10 6", "dashdot": "10 5 2 5", "dotted": "2 5"}


def curves_svg(series, title="", ymax=None):
    """Self-contained SVG line plot of loss curves.

    ``series`` is a list of ``(label, LossCurve, style)`` with style one of
    ``solid``, ``dashed``, ``dashdot``, ``dotted``.
    """
    left, right, top, bottom = 70.0, 30.0, 40.0, 60.0
    w, h = 800.0 - left - right, 600.0 - top - bottom
    if ymax is None:
        ymax = max(float(c.values.max()) for _, c, _ in series) * 1.1 or 1.0
    out = [
        '<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 800 600" '
        'width="800" height="600" font-family="sans-serif" font-size="13">',
        '<rect x="0" y="0" width="800" height="600" fill="white"/>',
        f'<text x="400" y="24" text-anchor="middle" font-size="15">{title}</text>',
        f'<rect x="{left}" y="{top}" width="{w}" height="{h}" fill="none" stroke="black"/>',
    ]
    for k in range(6):
        frac = k / 5
        x = left + frac * w
        y = top + h - frac * h
        out.append(f'<text x="{x:.1f}" y="{top + h + 20:.1f}" text-anchor="middle">{frac:.1f}</text>')
        out.append(f'<text x="{left - 8:.1f}" y="{y + 4:.1f}" text-anchor="end">{frac * ymax:.3g}</text>')
    out.append(f'<text x="{left + w / 2:.1f}" y="{600 - 15:.1f}" text-anchor="middle">t</text>')
    for i, (label, curve, style) in enumerate(series):
        xs = left + curve.grid * w
        ys = top + h - np.clip(curve.values / ymax, 0.0, 1.0) * h
        pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(xs, ys))
        dash = DASHES[style]
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        out.append(f'<polyline fill="none" stroke="black" stroke-width="1.6"{dash_attr} '
                   f'points="{pts}"/>')
        ly = top + 20 + 20 * i
        out.append(f'<line x1="{left + w - 190:.1f}" y1="{ly - 4:.1f}" x2="{left + w - 150:.1f}" '
                   f'y2="{ly - 4:.1f}" stroke="black" stroke-width="1.6"{dash_attr}/>')
        out.append(f'<text x="{left + w - 140:.1f}" y="{ly:.1f}">{label}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_curves_svg(path, series, title=""):
    Path(path).write_text(curves_svg(series, title), newline="\n")


CONFIG_KEYS = {"prior", "mean_neg", "mean_pos", "cov", "seed", "n", "grid_points",
               "tolerance", "out", "scopes"}


def _numbers(key, text, count):
    parts = [p for p in text.replace(",", " ").split() if p]
    try:
        vals = [float(p) for p in parts]
    except ValueError:
        raise InputError(f"config key {key!r}: expected {count} numbers") from None
    if len(vals) != count or not all(math.isfinite(v) for v in vals):
        raise InputError(f"config key {key!r}: expected {count} finite numbers")
    return vals


def parse_config(text, source="<config>"):
    """Parse ``key = value`` lines; ``#`` starts a comment.

    Vector values are comma- or space-separated; ``cov`` lists the 2x2 matrix
    row-major.
    """
    cfg = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"{source}: line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise InputError(f"{source}: line {lineno}: unknown key {key!r}")
        try:
            if key in ("prior", "tolerance"):
                cfg[key] = _numbers(key, value, 1)[0]
            elif key in ("mean_neg", "mean_pos"):
                cfg[key] = tuple(_numbers(key, value, 2))
            elif key == "cov":
                cfg[key] = tuple(_numbers(key, value, 4))
            elif key in ("seed", "n", "grid_points"):
                cfg[key] = int(value)
            elif key == "scopes":
                cfg[key] = [InformationScope.parse(s) for s in value.split(",") if s.strip()]
            else:
                cfg[key] = value
        except (ValueError, BrierLabError) as exc:
            raise InputError(f"{source}: line {lineno}: {exc}") from None
    return cfg


def load_config(path):
    return parse_config(Path(path).read_text(), str(path))
