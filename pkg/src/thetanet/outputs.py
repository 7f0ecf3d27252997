"""Deterministic artifact writers: CSV tables, SVG plots, run manifests.

SVG is generated directly (no plotting dependency) so outputs are diffable
text. All writers are pure functions of their inputs; nothing here consults
clocks or global state except the manifest's explicit wall-time field.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os

import numpy as np

from .errors import ConfigError

FLOAT_FMT = "%.12g"
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
           "#8c564b", "#17becf", "#7f7f7f")


def _fmt_cell(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return FLOAT_FMT % float(value)


def write_csv(path, header, rows) -> str:
    """Write a CSV with %.12g floats; returns the path."""
    path = os.fspath(path)
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(list(header))
        for row in rows:
            writer.writerow([_fmt_cell(v) for v in row])
    return path


def read_csv(path):
    """Read a CSV written by write_csv: (header, list of string rows)."""
    try:
        with open(path, newline="", encoding="ascii") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise ConfigError(f"cannot read CSV {path}: {exc}") from None
    if not rows or not rows[0]:
        raise ConfigError(f"CSV {path} has no header")
    header, body = rows[0], rows[1:]
    if any(len(r) != len(header) for r in body):
        raise ConfigError(f"CSV {path} has ragged rows")
    return header, body


def read_csv_columns(path):
    """Read a numeric CSV as {column name: float array}."""
    header, body = read_csv(path)
    if not body:
        raise ConfigError(f"CSV {path} has no data rows")
    cols = {}
    for j, name in enumerate(header):
        try:
            cols[name] = np.array([float(r[j]) for r in body])
        except ValueError:
            cols[name] = np.array([r[j] for r in body], dtype=object)
    return cols


# --- SVG ------------------------------------------------------------------

_W, _H = 720, 480
_ML, _MR, _MT, _MB = 72, 24, 36, 56


def _ticks(lo: float, hi: float, n: int = 5):
    if hi <= lo:
        hi = lo + 1.0
    raw = np.linspace(lo, hi, n)
    return raw


def _scale(v, lo, hi, a, b):
    if hi == lo:
        hi = lo + 1.0
    return a + (np.asarray(v, dtype=float) - lo) * (b - a) / (hi - lo)


def _axes_svg(x_lo, x_hi, y_lo, y_hi, title, xlabel, ylabel) -> list:
    parts = []
    parts.append(f'<rect x="{_ML}" y="{_MT}" width="{_W - _ML - _MR}" '
                 f'height="{_H - _MT - _MB}" fill="none" stroke="black"/>')
    for tx in _ticks(x_lo, x_hi):
        px = float(_scale(tx, x_lo, x_hi, _ML, _W - _MR))
        parts.append(f'<line x1="{px:.2f}" y1="{_H - _MB}" x2="{px:.2f}" '
                     f'y2="{_H - _MB + 5}" stroke="black"/>')
        parts.append(f'<text x="{px:.2f}" y="{_H - _MB + 18}" font-size="11" '
                     f'text-anchor="middle">{tx:.4g}</text>')
    for ty in _ticks(y_lo, y_hi):
        py = float(_scale(ty, y_lo, y_hi, _H - _MB, _MT))
        parts.append(f'<line x1="{_ML - 5}" y1="{py:.2f}" x2="{_ML}" '
                     f'y2="{py:.2f}" stroke="black"/>')
        parts.append(f'<text x="{_ML - 8}" y="{py + 4:.2f}" font-size="11" '
                     f'text-anchor="end">{ty:.4g}</text>')
    if title:
        parts.append(f'<text x="{_W / 2}" y="{_MT - 12}" font-size="14" '
                     f'text-anchor="middle">{title}</text>')
    if xlabel:
        parts.append(f'<text x="{(_ML + _W - _MR) / 2}" y="{_H - 14}" '
                     f'font-size="12" text-anchor="middle">{xlabel}</text>')
    if ylabel:
        parts.append(f'<text x="18" y="{(_MT + _H - _MB) / 2}" font-size="12" '
                     f'text-anchor="middle" transform="rotate(-90 18 '
                     f'{(_MT + _H - _MB) / 2})">{ylabel}</text>')
    return parts


def svg_line_plot(path, series, title: str = "", xlabel: str = "",
                  ylabel: str = "") -> str:
    """Line/scatter plot. `series` is a list of dicts with keys:

    x, y (arrays), label (str), and optional style ("solid" | "dashed" |
    "dots"), color (overrides the palette). Empty series are an error and no
    file is written.
    """
    if not series:
        raise ConfigError("no series to plot")
    cleaned = []
    for s in series:
        x = np.asarray(s["x"], dtype=float)
        y = np.asarray(s["y"], dtype=float)
        if x.size == 0 or y.size == 0:
            raise ConfigError(f"series {s.get('label', '?')!r} is empty")
        if x.shape != y.shape:
            raise ConfigError(f"series {s.get('label', '?')!r} has mismatched x/y")
        cleaned.append((x, y, s.get("label", ""), s.get("style", "solid"),
                        s.get("color")))
    x_lo = min(float(x.min()) for x, *_ in cleaned)
    x_hi = max(float(x.max()) for x, *_ in cleaned)
    all_y = np.concatenate([y for _, y, *_ in cleaned])
    y_lo, y_hi = float(all_y.min()), float(all_y.max())
    pad = 0.05 * (y_hi - y_lo or 1.0)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" '
             f'height="{_H}" viewBox="0 0 {_W} {_H}">',
             f'<rect width="{_W}" height="{_H}" fill="white"/>']
    parts += _axes_svg(x_lo, x_hi, y_lo, y_hi, title, xlabel, ylabel)
    legend_y = _MT + 14
    for i, (x, y, label, style, color) in enumerate(cleaned):
        col = color or PALETTE[i % len(PALETTE)]
        px = _scale(x, x_lo, x_hi, _ML, _W - _MR)
        py = _scale(y, y_lo, y_hi, _H - _MB, _MT)
        if style == "dots":
            parts.extend(f'<circle cx="{a:.2f}" cy="{b:.2f}" r="2.2" '
                         f'fill="{col}"/>' for a, b in zip(px, py))
        else:
            dash = ' stroke-dasharray="6 4"' if style == "dashed" else ""
            pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px, py))
            parts.append(f'<polyline points="{pts}" fill="none" '
                         f'stroke="{col}" stroke-width="1.5"{dash}/>')
        if label:
            lx = _W - _MR - 150
            parts.append(f'<line x1="{lx}" y1="{legend_y - 4}" x2="{lx + 24}" '
                         f'y2="{legend_y - 4}" stroke="{col}" stroke-width="2"/>')
            parts.append(f'<text x="{lx + 30}" y="{legend_y}" font-size="11">'
                         f'{label}</text>')
            legend_y += 16
    parts.append("</svg>")
    return _write_svg(path, parts)


_HEAT_STOPS = np.array([
    (0.267, 0.005, 0.329),
    (0.229, 0.322, 0.546),
    (0.127, 0.566, 0.551),
    (0.369, 0.789, 0.383),
    (0.993, 0.906, 0.144),
])


def _heat_color(u: float) -> str:
    u = min(max(float(u), 0.0), 1.0)
    pos = u * (len(_HEAT_STOPS) - 1)
    i = min(int(pos), len(_HEAT_STOPS) - 2)
    frac = pos - i
    rgb = (1 - frac) * _HEAT_STOPS[i] + frac * _HEAT_STOPS[i + 1]
    return "#" + "".join(f"{int(round(255 * c)):02x}" for c in rgb)


def svg_heatmap(path, xs, ys, z, title: str = "", xlabel: str = "",
                ylabel: str = "") -> str:
    """Heat map of z[i, j] over cell centers (xs[j], ys[i]), with a colorbar."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    z = np.asarray(z, dtype=float)
    if z.shape != (ys.size, xs.size) or z.size == 0:
        raise ConfigError("heat map needs z shaped (len(ys), len(xs)), nonempty")
    finite = z[np.isfinite(z)]
    if finite.size == 0:
        raise ConfigError("heat map has no finite values")
    z_lo, z_hi = float(finite.min()), float(finite.max())
    span = z_hi - z_lo or 1.0

    cell_w = (_W - _ML - _MR - 60) / xs.size
    cell_h = (_H - _MT - _MB) / ys.size
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" '
             f'height="{_H}" viewBox="0 0 {_W} {_H}">',
             f'<rect width="{_W}" height="{_H}" fill="white"/>']
    for i in range(ys.size):
        for j in range(xs.size):
            val = z[i, j]
            color = "#cccccc" if not np.isfinite(val) else _heat_color((val - z_lo) / span)
            x0 = _ML + j * cell_w
            y0 = _H - _MB - (i + 1) * cell_h
            parts.append(f'<rect x="{x0:.2f}" y="{y0:.2f}" width="{cell_w:.2f}" '
                         f'height="{cell_h:.2f}" fill="{color}"/>')
    for j, x in enumerate(xs):
        px = _ML + (j + 0.5) * cell_w
        parts.append(f'<text x="{px:.2f}" y="{_H - _MB + 16}" font-size="11" '
                     f'text-anchor="middle">{x:.4g}</text>')
    for i, y in enumerate(ys):
        py = _H - _MB - (i + 0.5) * cell_h
        parts.append(f'<text x="{_ML - 8}" y="{py + 4:.2f}" font-size="11" '
                     f'text-anchor="end">{y:.4g}</text>')
    bar_x = _W - _MR - 44
    for k in range(40):
        u = k / 39.0
        y0 = _H - _MB - (k + 1) * (_H - _MT - _MB) / 40
        parts.append(f'<rect x="{bar_x}" y="{y0:.2f}" width="14" '
                     f'height="{(_H - _MT - _MB) / 40 + 0.5:.2f}" '
                     f'fill="{_heat_color(u)}"/>')
    parts.append(f'<text x="{bar_x + 18}" y="{_H - _MB}" font-size="10">'
                 f'{z_lo:.3g}</text>')
    parts.append(f'<text x="{bar_x + 18}" y="{_MT + 10}" font-size="10">'
                 f'{z_hi:.3g}</text>')
    if title:
        parts.append(f'<text x="{_W / 2}" y="{_MT - 12}" font-size="14" '
                     f'text-anchor="middle">{title}</text>')
    if xlabel:
        parts.append(f'<text x="{(_ML + _W - _MR) / 2}" y="{_H - 14}" '
                     f'font-size="12" text-anchor="middle">{xlabel}</text>')
    if ylabel:
        parts.append(f'<text x="18" y="{(_MT + _H - _MB) / 2}" font-size="12" '
                     f'text-anchor="middle" transform="rotate(-90 18 '
                     f'{(_MT + _H - _MB) / 2})">{ylabel}</text>')
    parts.append("</svg>")
    return _write_svg(path, parts)


def _write_svg(path, parts) -> str:
    path = os.fspath(path)
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(parts) + "\n")
    return path


def emit_plot(csv_path, style: str, out_path, title: str = "",
              xlabel: str = "", ylabel: str = "") -> str:
    """Render a CSV produced by this package as an SVG.

    style "line": first column is x, every further numeric column a series.
    style "heatmap": columns (x, y, value) on a full rectangular grid.
    """
    cols = read_csv_columns(csv_path)
    names = list(cols)
    if style == "line":
        if len(names) < 2:
            raise ConfigError("line plot needs at least two columns")
        x = cols[names[0]]
        series = [{"x": x, "y": cols[n], "label": n} for n in names[1:]
                  if cols[n].dtype != object]
        if not series:
            raise ConfigError("line plot found no numeric series")
        return svg_line_plot(out_path, series, title=title,
                             xlabel=xlabel or names[0], ylabel=ylabel)
    if style == "heatmap":
        if len(names) < 3:
            raise ConfigError("heat map needs columns x, y, value")
        xv, yv, zv = (cols[n] for n in names[:3])
        xs, ys = np.unique(xv), np.unique(yv)
        z = np.full((ys.size, xs.size), np.nan)
        for a, b, c in zip(xv, yv, zv):
            z[np.searchsorted(ys, b), np.searchsorted(xs, a)] = c
        return svg_heatmap(out_path, xs, ys, z, title=title,
                           xlabel=xlabel or names[0], ylabel=ylabel or names[1])
    raise ConfigError(f"unknown plot style {style!r}")


def write_manifest(out_dir, config_text: str, seed, wall_time: float,
                   outputs, extra: dict | None = None) -> str:
    """JSON manifest stamping a run: config, its hash, seed, versions, files."""
    import scipy

    from . import __version__

    path = os.path.join(os.fspath(out_dir), "manifest.json")
    os.makedirs(os.fspath(out_dir), exist_ok=True)
    payload = {
        "config": config_text,
        "config_sha256": hashlib.sha256(config_text.encode("ascii")).hexdigest(),
        "seed": seed,
        "wall_time_s": round(float(wall_time), 3),
        "outputs": [os.path.basename(os.fspath(p)) for p in outputs],
        "versions": {
            "package": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
    }
    if extra:
        payload["results"] = extra
    with open(path, "w", encoding="ascii") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path
