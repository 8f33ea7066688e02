"""Render the report's grid fields as figures next to the delimited output."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .fields import FieldReport

__all__ = ["render_report_figures"]


def render_report_figures(report: FieldReport, out_stem) -> list:
    """Write one heatmap PNG per grid field for a 2-D domain.

    Files land at <out_stem>_<field>.png; returns their paths.  Domains of
    other dimension yield no figures (there is nothing planar to draw).
    """
    stem = Path(out_stem)
    if report.domain.dim != 2:
        return []
    lo, hi = report.domain.lower, report.domain.upper
    extent = (lo[0], hi[0], lo[1], hi[1])
    panels = [
        ("psi", report.psi_field, "lifted Lagrangian angle"),
        ("delta_u", report.delta_u_field, "volume element"),
        ("tube_dev", report.tube_dev_field, "tube deviation"),
        ("hmin_residual", report.hmin_residual_field, "H-minimality residual"),
        ("cmf_residual", report.cmf_residual_field, "conformal Maslov residual"),
        ("mean_curvature", report.mean_curvature_norm_field, "|H|"),
    ]
    written = []
    for name, data, label in panels:
        if data is None:
            continue
        fig, ax = plt.subplots(figsize=(5.2, 4.2))
        masked = np.ma.masked_invalid(data)
        im = ax.imshow(
            masked.T,
            origin="lower",
            extent=extent,
            aspect="auto",
            interpolation="nearest",
        )
        fig.colorbar(im, ax=ax, label=label)
        ax.set_xlabel("x1")
        ax.set_ylabel("x2")
        ax.set_title(name)
        fig.tight_layout()
        path = stem.parent / f"{stem.name}_{name}.png"
        fig.savefig(path, dpi=150)
        plt.close(fig)
        written.append(path)
    return written
