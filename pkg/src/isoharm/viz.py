"""Optional figure rendering for the CLI report paths.

Imported lazily so default runs never touch a plotting backend; every
function writes a PNG next to the delimited output it illustrates.
"""

from __future__ import annotations

import numpy as np


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def plot_measure(E, masses, out_path: str) -> None:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7, 2.8))
    for (lo, hi), m in zip(E.bands, masses):
        ax.plot([lo, hi], [0, 0], lw=6, solid_capstyle="butt")
        ax.annotate(f"{m:.4f}", ((lo + hi) / 2, 0.02), ha="center")
    ax.set_yticks([])
    ax.set_xlabel("support")
    ax.set_title("band masses")
    fig.tight_layout()
    fig.savefig(out_path, dpi=160)
    plt.close(fig)


def plot_path(rows: np.ndarray, header: list[str], out_path: str) -> None:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7, 4))
    s = np.arange(len(rows))
    for j, name in enumerate(header):
        if name.startswith(("x", "u", "y0")):
            ax.plot(s, rows[:, j], label=name)
    ax.set_xlabel("step")
    ax.legend(loc="best", fontsize=8)
    ax.set_title("deformation path")
    fig.tight_layout()
    fig.savefig(out_path, dpi=160)
    plt.close(fig)


def plot_pell(E, p_coeffs, out_path: str) -> None:
    plt = _pyplot()
    lo, hi = E.hull
    pad = 0.05 * (hi - lo)
    z = np.linspace(lo - pad, hi + pad, 2000)
    vals = np.polynomial.polynomial.polyval(z, np.asarray(p_coeffs))
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(z, vals, lw=1)
    ax.axhline(1.0, color="gray", lw=0.7)
    ax.axhline(-1.0, color="gray", lw=0.7)
    for blo, bhi in E.bands:
        ax.axvspan(blo, bhi, color="0.9")
    ax.set_ylim(-2.5, 2.5)
    ax.set_title("extremal polynomial")
    fig.tight_layout()
    fig.savefig(out_path, dpi=160)
    plt.close(fig)


def plot_comb(polyline: np.ndarray, region, out_path: str) -> None:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(polyline[:, 0], polyline[:, 1], ".", ms=1.5)
    for q, h in zip(region.q, region.h):
        ax.plot([q, q], [0, h], lw=1, color="C1")
    ax.set_xlabel("Re theta")
    ax.set_ylabel("Im theta")
    ax.set_title("comb region boundary")
    fig.tight_layout()
    fig.savefig(out_path, dpi=160)
    plt.close(fig)


def plot_trajectory(points: np.ndarray, out_path: str) -> None:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.plot(points[:, 0], points[:, 1], "-o", ms=3, lw=0.8)
    ax.set_aspect("equal")
    ax.set_title("billiard trajectory (first two coordinates)")
    fig.tight_layout()
    fig.savefig(out_path, dpi=160)
    plt.close(fig)
