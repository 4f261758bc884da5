"""Deterministic log-log SVG plots of error against time step."""
from __future__ import annotations

import math
from collections import OrderedDict
from pathlib import Path

from ..errors import InvalidInputError

WIDTH, HEIGHT = 640, 480
MARGIN = dict(left=80, right=150, top=30, bottom=60)
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2",
          "#17becf", "#7f7f7f", "#bcbd22")


def _fmt(v):
    return f"{v:.2f}"


def _series_label(r, series_by):
    if series_by == "h":
        k = -math.log2(r.h)
        h = f"h=2^-{k:g}" if abs(k - round(k)) < 1e-9 else f"h={r.h:g}"
        return f"{r.scheme.upper()} {h}"
    if series_by == "sigma":
        return f"{r.scheme.upper()} sigma={r.sigma:g}"
    return r.scheme.upper()


def emit_plot(records, path=None, series_by="h", norm=None, guides=(1, 2), title=None):
    """Render ``records`` as one polyline per series plus dashed slope guides.

    ``series_by`` is ``"h"``, ``"sigma"`` or ``"scheme"``; ``norm`` filters the
    records (default: the first norm present).  Each guide spans the tau range
    of the data.  Returns the SVG text and writes it when ``path`` is given.
    """
    records = list(records)
    if not records:
        raise InvalidInputError("nothing to plot")
    norm = norm or records[0].norm
    recs = [r for r in records if r.norm == norm and r.error > 0]
    if not recs:
        raise InvalidInputError(f"no positive {norm} errors to plot")
    series = OrderedDict()
    for r in sorted(recs, key=lambda r: (_series_label(r, series_by), r.tau)):
        series.setdefault(_series_label(r, series_by), []).append((r.tau, r.error))

    taus = [t for pts in series.values() for t, _ in pts]
    errs = [e for pts in series.values() for _, e in pts]
    tmin, tmax = min(taus), max(taus)
    emin, emax = min(errs), max(errs)
    lt0, lt1 = math.floor(math.log10(tmin)), math.ceil(math.log10(tmax))
    if lt1 == lt0:
        lt1 += 1
    le0, le1 = math.floor(math.log10(emin)), math.ceil(math.log10(emax))
    if le1 == le0:
        le1 += 1

    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def X(t):
        return MARGIN["left"] + pw * (math.log10(t) - lt0) / (lt1 - lt0)

    def Y(e):
        return MARGIN["top"] + ph * (1 - (math.log10(e) - le0) / (le1 - le0))

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{MARGIN["left"]}" y="{MARGIN["top"]}" width="{pw}" height="{ph}" '
        f'fill="none" stroke="black"/>',
    ]
    for k in range(lt0, lt1 + 1):
        x = _fmt(X(10.0 ** k))
        out.append(f'<text x="{x}" y="{HEIGHT - MARGIN["bottom"] + 18}" font-size="11" '
                   f'text-anchor="middle">1e{k}</text>')
    for k in range(le0, le1 + 1):
        y = _fmt(Y(10.0 ** k))
        out.append(f'<text x="{MARGIN["left"] - 6}" y="{y}" font-size="11" '
                   f'text-anchor="end">1e{k}</text>')
    out.append(f'<text x="{MARGIN["left"] + pw / 2:.2f}" y="{HEIGHT - 15}" font-size="13" '
               f'text-anchor="middle">tau</text>')
    out.append(f'<text x="18" y="{MARGIN["top"] + ph / 2:.2f}" font-size="13" '
               f'text-anchor="middle" transform="rotate(-90 18 {MARGIN["top"] + ph / 2:.2f})">'
               f'{norm} error</text>')
    if title:
        out.append(f'<text x="{MARGIN["left"] + pw / 2:.2f}" y="20" font-size="13" '
                   f'text-anchor="middle">{title}</text>')

    # guides pass through the geometric mean of the data at mid tau
    lt_mid = 0.5 * (math.log10(tmin) + math.log10(tmax))
    le_mid = sum(math.log10(e) for e in errs) / len(errs)
    for p in guides:
        e0 = 10 ** (le_mid + p * (math.log10(tmin) - lt_mid))
        e1 = 10 ** (le_mid + p * (math.log10(tmax) - lt_mid))
        out.append(f'<line class="guide" data-slope="{p}" x1="{_fmt(X(tmin))}" y1="{_fmt(Y(e0))}" '
                   f'x2="{_fmt(X(tmax))}" y2="{_fmt(Y(e1))}" stroke="gray" '
                   f'stroke-dasharray="6,4"/>')
        out.append(f'<text x="{_fmt(X(tmax) + 4)}" y="{_fmt(Y(e1))}" font-size="10" '
                   f'fill="gray">slope {p}</text>')

    for i, (label, pts) in enumerate(series.items()):
        color = COLORS[i % len(COLORS)]
        coords = " ".join(f"{_fmt(X(t))},{_fmt(Y(e))}" for t, e in pts)
        out.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        for t, e in pts:
            out.append(f'<circle cx="{_fmt(X(t))}" cy="{_fmt(Y(e))}" r="2.5" fill="{color}"/>')
        ly = MARGIN["top"] + 14 * (i + 1)
        lx = WIDTH - MARGIN["right"] + 10
        out.append(f'<text x="{lx}" y="{ly}" font-size="11" fill="{color}">{label}</text>')
    out.append("</svg>")
    text = "\n".join(out) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text
