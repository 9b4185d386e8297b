"""Figure emission for the report path.

Two renderers: a self-contained SVG writer for the pinned ROC-plot format
(fixed 640x480 viewBox, mean polyline, stderr band, diagonal reference),
and matplotlib PNG figures written alongside the CSV outputs.
"""

from __future__ import annotations

import numpy as np

from .evaluation import AveragedRoc, RocCurve
from .frontends import TeagerSpectralDensity

SVG_WIDTH = 640
SVG_HEIGHT = 480
_MARGIN_LEFT = 60
_MARGIN_RIGHT = 20
_MARGIN_TOP = 20
_MARGIN_BOTTOM = 50


def _x_px(fpr: float) -> float:
    return _MARGIN_LEFT + fpr * (SVG_WIDTH - _MARGIN_LEFT - _MARGIN_RIGHT)


def _y_px(tpr: float) -> float:
    return SVG_HEIGHT - _MARGIN_BOTTOM - tpr * (SVG_HEIGHT - _MARGIN_TOP - _MARGIN_BOTTOM)


def _points(fpr, tpr) -> str:
    return " ".join(f"{_x_px(f):.2f},{_y_px(t):.2f}" for f, t in zip(fpr, tpr))


def render_roc_svg(avg: AveragedRoc, title: str = "Mean ROC over validation folds") -> str:
    """Self-contained SVG: stderr band polygon, mean ROC polyline, diagonal."""
    lo = np.clip(avg.mean_tpr - avg.stderr_tpr, 0.0, 1.0)
    hi = np.clip(avg.mean_tpr + avg.stderr_tpr, 0.0, 1.0)
    band = _points(avg.fpr_grid, hi) + " " + _points(avg.fpr_grid[::-1], lo[::-1])
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}">',
        f'<rect x="0" y="0" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" fill="#ffffff"/>',
        f'<text x="{SVG_WIDTH / 2:.0f}" y="14" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13">{title}</text>',
        f'<polygon points="{band}" fill="#9ecae1" fill-opacity="0.5" stroke="none"/>',
        f'<line x1="{_x_px(0):.2f}" y1="{_y_px(0):.2f}" x2="{_x_px(1):.2f}" y2="{_y_px(1):.2f}" '
        'stroke="#999999" stroke-width="1" stroke-dasharray="6,4"/>',
        f'<polyline points="{_points(avg.fpr_grid, avg.mean_tpr)}" '
        'fill="none" stroke="#1f77b4" stroke-width="2"/>',
    ]
    # axes with 0.2-spaced ticks
    parts.append(
        f'<line x1="{_x_px(0):.2f}" y1="{_y_px(0):.2f}" x2="{_x_px(1):.2f}" y2="{_y_px(0):.2f}" '
        'stroke="#000000" stroke-width="1"/>'
    )
    parts.append(
        f'<line x1="{_x_px(0):.2f}" y1="{_y_px(0):.2f}" x2="{_x_px(0):.2f}" y2="{_y_px(1):.2f}" '
        'stroke="#000000" stroke-width="1"/>'
    )
    for v in np.linspace(0, 1, 6):
        x, y = _x_px(v), _y_px(v)
        y0 = _y_px(0)
        x0 = _x_px(0)
        parts.append(
            f'<line x1="{x:.2f}" y1="{y0:.2f}" x2="{x:.2f}" y2="{y0 + 5:.2f}" '
            'stroke="#000000" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{x:.2f}" y="{y0 + 18:.2f}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{v:.1f}</text>'
        )
        parts.append(
            f'<line x1="{x0 - 5:.2f}" y1="{y:.2f}" x2="{x0:.2f}" y2="{y:.2f}" '
            'stroke="#000000" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{x0 - 8:.2f}" y="{y + 4:.2f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{v:.1f}</text>'
        )
    parts.append(
        f'<text x="{(_x_px(0) + _x_px(1)) / 2:.0f}" y="{SVG_HEIGHT - 12}" text-anchor="middle" '
        'font-family="sans-serif" font-size="12">False positive rate</text>'
    )
    parts.append(
        f'<text x="16" y="{(_y_px(0) + _y_px(1)) / 2:.0f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 16 {(_y_px(0) + _y_px(1)) / 2:.0f})">True positive rate</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def save_roc_svg(avg: AveragedRoc, path, title: str = "Mean ROC over validation folds") -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(render_roc_svg(avg, title))


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def save_roc_png(
    avg: AveragedRoc | None,
    path,
    fold_curves: tuple[RocCurve, ...] = (),
    title: str = "ROC",
) -> None:
    """Matplotlib rendering of the mean ROC with its stderr band."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    for i, curve in enumerate(fold_curves):
        ax.plot(curve.fpr, curve.tpr, color="#bbbbbb", lw=0.8,
                label="folds" if i == 0 else None)
    if avg is not None:
        lo = np.clip(avg.mean_tpr - avg.stderr_tpr, 0, 1)
        hi = np.clip(avg.mean_tpr + avg.stderr_tpr, 0, 1)
        ax.fill_between(avg.fpr_grid, lo, hi, alpha=0.3, label="+/- 1 stderr")
        ax.plot(avg.fpr_grid, avg.mean_tpr, lw=2, label="mean ROC")
    ax.plot([0, 1], [0, 1], ls="--", c="gray", lw=1)
    ax.set_xlabel("False positive rate")
    ax.set_ylabel("True positive rate")
    ax.set_title(title)
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1.02)
    ax.legend(loc="lower right")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_single_roc_png(curve: RocCurve, path, title: str = "ROC") -> None:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    ax.plot(curve.fpr, curve.tpr, lw=2)
    ax.plot([0, 1], [0, 1], ls="--", c="gray", lw=1)
    ax.set_xlabel("False positive rate")
    ax.set_ylabel("True positive rate")
    ax.set_title(title)
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1.02)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_density_png(density: TeagerSpectralDensity, path, title: str = "") -> None:
    """Heatmap of the log Teager spectral density (filters x time)."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    t = density.frame_times_s
    extent = [0.0, float(t[-1]) + density.hop_s if t.size else density.hop_s, 0,
              density.values.shape[0]]
    im = ax.imshow(density.values, origin="lower", aspect="auto", extent=extent,
                   cmap="magma")
    ax.set_xlabel("Time (s)")
    ax.set_ylabel("Filter index")
    if title:
        ax.set_title(title)
    fig.colorbar(im, ax=ax, label="log Teager energy")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
