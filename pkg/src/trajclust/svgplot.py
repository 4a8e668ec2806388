"""Minimal self-contained SVG emission for scatter and line plots.

Deliberately dependency-free and deterministic: numeric outputs always
accompany the plots, so nothing downstream ever parses these files.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

PALETTE = (
    "#1f77b4",
    "#ff7f0e",
    "#2ca02c",
    "#d62728",
    "#9467bd",
    "#8c564b",
    "#e377c2",
    "#7f7f7f",
    "#bcbd22",
    "#17becf",
)

_W, _H, _PAD = 640, 480, 50


def _scale(values: np.ndarray, lo_px: float, hi_px: float) -> np.ndarray:
    vmin, vmax = float(values.min()), float(values.max())
    if vmax == vmin:
        return np.full(values.shape, 0.5 * (lo_px + hi_px))
    return lo_px + (values - vmin) / (vmax - vmin) * (hi_px - lo_px)


def _header(title: str) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W / 2:.0f}" y="20" text-anchor="middle" font-size="14">{title}</text>',
        f'<rect x="{_PAD}" y="{_PAD}" width="{_W - 2 * _PAD}" height="{_H - 2 * _PAD}" '
        f'fill="none" stroke="#333"/>',
    ]


def scatter_svg(coords: np.ndarray, labels: np.ndarray | None, path: str | Path, title: str = "") -> None:
    """2-D scatter with one circle per row, colored by integer label."""
    coords = np.asarray(coords, dtype=float)
    if coords.shape[1] < 2:  # lift 1-D embeddings onto a zero y-axis
        coords = np.column_stack([coords[:, 0], np.zeros(coords.shape[0])])
    xs = _scale(coords[:, 0], _PAD, _W - _PAD)
    ys = _scale(coords[:, 1], _H - _PAD, _PAD)  # svg y grows downward
    parts = _header(title)
    if labels is None:
        labels = np.zeros(coords.shape[0], dtype=int)
    for x, y, lab in zip(xs, ys, labels):
        color = PALETTE[int(lab) % len(PALETTE)]
        parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="3" fill="{color}" fill-opacity="0.7"/>')
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n", encoding="utf-8")


def line_svg(
    x: np.ndarray,
    series: dict[str, np.ndarray],
    path: str | Path,
    title: str = "",
    x_label: str = "",
) -> None:
    """Overlaid line charts sharing one x-axis, with a small legend."""
    x = np.asarray(x, dtype=float)
    all_y = np.concatenate([np.asarray(v, dtype=float) for v in series.values()])
    xs = _scale(x, _PAD, _W - _PAD)
    parts = _header(title)
    y_min, y_max = float(all_y.min()), float(all_y.max())
    span = y_max - y_min or 1.0

    def ypix(v: float) -> float:
        return (_H - _PAD) - (v - y_min) / span * (_H - 2 * _PAD)

    for idx, (name, ys) in enumerate(series.items()):
        color = PALETTE[idx % len(PALETTE)]
        pts = " ".join(f"{px:.2f},{ypix(float(v)):.2f}" for px, v in zip(xs, np.asarray(ys)))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="2"/>')
        parts.append(
            f'<text x="{_W - _PAD + 5}" y="{_PAD + 15 * idx + 10}" font-size="11" '
            f'fill="{color}">{name}</text>'
        )
    for px, xv in zip(xs, x):
        parts.append(
            f'<text x="{px:.2f}" y="{_H - _PAD + 18}" text-anchor="middle" font-size="11">{xv:g}</text>'
        )
    parts.append(
        f'<text x="{_PAD - 8}" y="{ypix(y_min):.2f}" text-anchor="end" font-size="11">{y_min:.3g}</text>'
    )
    parts.append(
        f'<text x="{_PAD - 8}" y="{ypix(y_max):.2f}" text-anchor="end" font-size="11">{y_max:.3g}</text>'
    )
    if x_label:
        parts.append(f'<text x="{_W / 2:.0f}" y="{_H - 10}" text-anchor="middle" font-size="12">{x_label}</text>')
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n", encoding="utf-8")
