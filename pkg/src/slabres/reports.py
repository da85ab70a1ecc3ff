"""File output: provenance headers, atomic writes, SVG and matplotlib figures.

Data files (CSV, JSON) begin with a provenance comment line

    # slabres <subcommand> <version> <args-hash>

so artifacts can be traced to the exact invocation; strip leading '#' lines
before handing the remainder to a JSON parser.  Writes go through a temporary
file plus rename, so readers never observe partial output.  Figures are
derived artifacts of the delimited data, never the primary record.
"""
from __future__ import annotations

import hashlib
import json
import os
import tempfile
from typing import Optional, Sequence

import numpy as np


def args_hash(argv: Sequence[str]) -> str:
    canon = json.dumps(list(argv), separators=(",", ":"), sort_keys=False)
    return hashlib.sha256(canon.encode()).hexdigest()[:12]


def provenance_line(subcommand: str, version: str, argv: Sequence[str]) -> str:
    return f"slabres {subcommand} {version} {args_hash(argv)}"


def atomic_write_text(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".slabres-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_data_file(path: str, body: str, provenance: str) -> None:
    """Provenance comment line followed by the payload, written atomically."""
    atomic_write_text(path, f"# {provenance}\n" + body)


def strip_provenance(text: str) -> str:
    """Drop leading '#' comment lines (inverse of write_data_file for JSON)."""
    lines = text.splitlines()
    start = 0
    while start < len(lines) and lines[start].lstrip().startswith("#"):
        start += 1
    return "\n".join(lines[start:])


def load_json_report(path: str) -> dict:
    with open(path) as handle:
        return json.loads(strip_provenance(handle.read()))


def write_json_report(path: str, doc: dict, provenance: str) -> None:
    write_data_file(path, json.dumps(doc, indent=2) + "\n", provenance)


# ---------------------------------------------------------------------------
# figures

_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
            "#17becf", "#7f7f7f", "#bcbd22", "#e377c2"]


def _segments(x: np.ndarray, y: np.ndarray):
    """Split a curve at NaNs into drawable segments."""
    good = np.isfinite(x) & np.isfinite(y)
    segments = []
    start = None
    for i, ok in enumerate(good):
        if ok and start is None:
            start = i
        elif not ok and start is not None:
            segments.append((x[start:i], y[start:i]))
            start = None
    if start is not None:
        segments.append((x[start:], y[start:]))
    return [s for s in segments if len(s[0]) >= 2]


def svg_transmittance_plot(curves: Sequence[tuple[str, np.ndarray, np.ndarray]],
                           xlabel: str, marker: Optional[float] = None,
                           provenance: str = "") -> str:
    """Plain SVG 1.1 polyline plot of |T|^2 curves with a vertical marker.

    No plotting library involved; output is deterministic for fixed input.
    """
    width, height = 860.0, 520.0
    ml, mr, mt, mb = 75.0, 20.0, 20.0, 55.0
    pw, ph = width - ml - mr, height - mt - mb
    xs = np.concatenate([np.asarray(x, float) for _, x, _ in curves]) if curves else np.array([0.0, 1.0])
    xs = xs[np.isfinite(xs)]
    x_lo, x_hi = float(xs.min()), float(xs.max())
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    y_lo, y_hi = -0.02, 1.05

    def X(v):
        return ml + (v - x_lo) / (x_hi - x_lo) * pw

    def Y(v):
        return mt + (y_hi - v) / (y_hi - y_lo) * ph

    parts = ['<?xml version="1.0" encoding="UTF-8"?>']
    if provenance:
        parts.append(f"<!-- {provenance} -->")
    parts.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:g}" height="{height:g}" '
        f'viewBox="0 0 {width:g} {height:g}">')
    parts.append(f'<rect x="0" y="0" width="{width:g}" height="{height:g}" fill="white"/>')
    parts.append(
        f'<rect x="{ml:g}" y="{mt:g}" width="{pw:g}" height="{ph:g}" '
        'fill="none" stroke="black" stroke-width="1"/>')
    # y ticks at 0, .25, .5, .75, 1
    for yt in (0.0, 0.25, 0.5, 0.75, 1.0):
        parts.append(f'<line x1="{ml - 5:.2f}" y1="{Y(yt):.2f}" x2="{ml:.2f}" y2="{Y(yt):.2f}" '
                     'stroke="black" stroke-width="1"/>')
        parts.append(f'<text x="{ml - 9:.2f}" y="{Y(yt) + 4:.2f}" font-size="13" '
                     f'text-anchor="end" font-family="sans-serif">{yt:g}</text>')
    for i in range(5):
        xv = x_lo + i * (x_hi - x_lo) / 4
        parts.append(f'<line x1="{X(xv):.2f}" y1="{mt + ph:.2f}" x2="{X(xv):.2f}" '
                     f'y2="{mt + ph + 5:.2f}" stroke="black" stroke-width="1"/>')
        parts.append(f'<text x="{X(xv):.2f}" y="{mt + ph + 20:.2f}" font-size="13" '
                     f'text-anchor="middle" font-family="sans-serif">{xv:.6g}</text>')
    parts.append(f'<text x="{ml + pw / 2:.2f}" y="{height - 12:.2f}" font-size="14" '
                 f'text-anchor="middle" font-family="sans-serif">{xlabel}</text>')
    parts.append(f'<text x="18" y="{mt + ph / 2:.2f}" font-size="14" text-anchor="middle" '
                 f'font-family="sans-serif" transform="rotate(-90 18 {mt + ph / 2:.2f})">'
                 '|T|&#178;</text>')
    if marker is not None and x_lo <= marker <= x_hi:
        parts.append(f'<line x1="{X(marker):.2f}" y1="{mt:.2f}" x2="{X(marker):.2f}" '
                     f'y2="{mt + ph:.2f}" stroke="#444444" stroke-width="1" '
                     'stroke-dasharray="5,4"/>')
    for idx, (label, x, y) in enumerate(curves):
        color = _PALETTE[idx % len(_PALETTE)]
        for sx, sy in _segments(np.asarray(x, float), np.asarray(y, float)):
            pts = " ".join(f"{X(a):.2f},{Y(b):.2f}" for a, b in zip(sx, sy))
            parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.4" '
                         f'points="{pts}"/>')
        parts.append(f'<text x="{width - mr - 8:.2f}" y="{mt + 18 + 16 * idx:.2f}" '
                     f'font-size="12" text-anchor="end" font-family="sans-serif" '
                     f'fill="{color}">{label}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_matplotlib_figure(curves: Sequence[tuple[str, np.ndarray, np.ndarray]],
                             xlabel: str, path: str, marker: Optional[float] = None,
                             title: str = "") -> None:
    """Render the same |T|^2 curves with matplotlib (PNG/PDF per extension)."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7.2, 4.5))
    for idx, (label, x, y) in enumerate(curves):
        ax.plot(x, y, lw=1.2, label=label, color=_PALETTE[idx % len(_PALETTE)])
    if marker is not None:
        ax.axvline(marker, color="0.3", lw=0.9, ls="--")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(r"$|T|^2$")
    ax.set_ylim(-0.02, 1.05)
    if title:
        ax.set_title(title)
    if curves:
        ax.legend(fontsize=8, loc="best")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
