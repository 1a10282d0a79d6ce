"""CSV / JSON campaign reports and SVG fit plots."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict
from xml.sax.saxutils import escape

import numpy as np

from . import __version__
from .experiment import CampaignReport, CampaignRow, TrialResult

__all__ = [
    "CSV_HEADER",
    "MAX_PARAMS",
    "format_float",
    "report_to_csv",
    "csv_to_rows",
    "write_csv",
    "read_csv",
    "report_to_json",
    "write_json",
    "render_fit_svg",
]

MAX_PARAMS = 4
CSV_HEADER = ("model", "noise", "level_percent", "seed",
              *(f"param_{i}" for i in range(1, MAX_PARAMS + 1)), "rerr1", "rerr2")


def format_float(v: float) -> str:
    # 17 significant digits round-trip any double
    return format(float(v), ".17g")


def report_to_csv(report: CampaignReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in report.rows:
        params = [format_float(p) for p in r.params] + [""] * (MAX_PARAMS - len(r.params))
        w.writerow([r.model, r.noise, format_float(r.level_percent), r.seed,
                    *params, format_float(r.rerr1), format_float(r.rerr2)])
    return buf.getvalue()


def csv_to_rows(text: str) -> list:
    reader = csv.reader(io.StringIO(text))
    header = tuple(next(reader))
    if header != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {header}")
    rows = []
    for rec in reader:
        params = tuple(float(v) for v in rec[4:4 + MAX_PARAMS] if v != "")
        rows.append(CampaignRow(rec[0], rec[1], float(rec[2]), int(rec[3]), params,
                                float(rec[-2]), float(rec[-1])))
    return rows


def write_csv(report: CampaignReport, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(report_to_csv(report))


def read_csv(path) -> list:
    with open(path, encoding="utf-8", newline="") as fh:
        return csv_to_rows(fh.read())


def _noise_meta(nz):
    return {"name": nz.name, "distribution": type(nz.params).__name__,
            "params": asdict(nz.params), "centered": nz.centered, "method": nz.method}


def report_to_json(report: CampaignReport) -> str:
    doc = {
        "version": __version__,
        "master_seed": report.master_seed,
        "n": report.n,
        "models": [{"family": m.family.value, "true_params": list(m.true_params)} for m in report.models],
        "noises": [_noise_meta(nz) for nz in report.noises],
        "levels": list(report.levels),
        "seeds": list(report.seeds),
        "rows": [
            {"model": r.model, "noise": r.noise, "level_percent": r.level_percent, "seed": r.seed,
             "params": list(r.params), "rerr1": r.rerr1, "rerr2": r.rerr2}
            for r in report.rows
        ],
    }
    names = {nz.name for nz in report.noises}
    if {"FA", "FB", "FC"} <= names:
        doc["ordering"] = [asdict(o) for o in report.ordering_table()]
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def write_json(report: CampaignReport, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(report_to_json(report))


_COLORS = {"truth": "#000000", "FA": "#1f77b4", "FB": "#d62728", "FC": "#2ca02c"}
_FALLBACK = ("#9467bd", "#8c564b", "#e377c2", "#7f7f7f")
W, H = 640, 420
LEFT, RIGHT, TOP, BOTTOM = 64, 120, 36, 44


def _color(label, i):
    return _COLORS.get(label, _FALLBACK[i % len(_FALLBACK)])


def render_fit_svg(title: str, trials: dict) -> str:
    """SVG overlaying the true curve, observations and one fit per noise family.

    ``trials`` maps noise name to :class:`TrialResult` on a shared grid. The
    output has one ``<g class="series">`` per curve (truth plus one per
    family) and one ``<g class="observations">`` per family. The y range
    covers every curve and the 2-98 percentile band of the observations;
    observations outside it are dropped.
    """
    if not trials:
        raise ValueError("nothing to plot")
    first: TrialResult = next(iter(trials.values()))
    xs, truth = first.xs, first.truth
    lo = [truth.min()] + [t.fitted.min() for t in trials.values()]
    hi = [truth.max()] + [t.fitted.max() for t in trials.values()]
    for t in trials.values():
        q = np.percentile(t.observed, [2, 98])
        lo.append(q[0])
        hi.append(q[1])
    y0, y1 = float(min(lo)), float(max(hi))
    pad = 0.05 * (y1 - y0 or 1.0)
    y0, y1 = y0 - pad, y1 + pad
    x0, x1 = 0.0, float(xs.max())

    pw, ph = W - LEFT - RIGHT, H - TOP - BOTTOM

    def px(x):
        return LEFT + (x - x0) / (x1 - x0) * pw

    def py(y):
        return TOP + (y1 - y) / (y1 - y0) * ph

    def pts(xv, yv):
        return " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(xv, yv))

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
        f'<rect x="0" y="0" width="{W}" height="{H}" fill="#ffffff"/>',
        f'<text x="{W / 2:.1f}" y="22" text-anchor="middle" font-family="sans-serif" font-size="14">{escape(title)}</text>',
        f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="#444444"/>',
    ]
    for i in range(5):
        xv = x0 + (x1 - x0) * i / 4
        yv = y0 + (y1 - y0) * i / 4
        out.append(f'<text x="{px(xv):.2f}" y="{TOP + ph + 16}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="10">{xv:.2f}</text>')
        out.append(f'<text x="{LEFT - 6}" y="{py(yv) + 3:.2f}" text-anchor="end" '
                   f'font-family="sans-serif" font-size="10">{yv:.3g}</text>')
    out.append(f'<text x="{LEFT + pw / 2:.1f}" y="{H - 8}" text-anchor="middle" '
               'font-family="sans-serif" font-size="12">x</text>')

    for i, (name, t) in enumerate(trials.items()):
        keep = (t.observed >= y0) & (t.observed <= y1)
        c = _color(name, i)
        out.append(f'<g class="observations" data-noise="{escape(name)}" fill="{c}" fill-opacity="0.35">')
        out.extend(f'<circle cx="{px(a):.2f}" cy="{py(b):.2f}" r="1.5"/>'
                   for a, b in zip(xs[keep], t.observed[keep]))
        out.append("</g>")

    series = [("truth", truth)] + [(name, t.fitted) for name, t in trials.items()]
    for i, (label, yv) in enumerate(series):
        c = _color(label, i)
        dash = ' stroke-dasharray="6,3"' if label == "truth" else ""
        text = "truth" if label == "truth" else f"{label} fit"
        ly = TOP + 14 + 18 * i
        out.append(f'<g class="series" data-label="{escape(label)}">')
        out.append(f'<polyline fill="none" stroke="{c}" stroke-width="1.5"{dash} points="{pts(xs, yv)}"/>')
        out.append(f'<line x1="{LEFT + pw + 10}" y1="{ly}" x2="{LEFT + pw + 34}" y2="{ly}" stroke="{c}" stroke-width="2"{dash}/>')
        out.append(f'<text x="{LEFT + pw + 40}" y="{ly + 4}" font-family="sans-serif" font-size="11">{escape(text)}</text>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
