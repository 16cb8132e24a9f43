"""Report figures rendered next to the delimited outputs.

Matplotlib is imported lazily with the Agg backend so headless runs work;
every helper returns the written path.  Styling is centralized here.
"""

from __future__ import annotations

import math
import os

import numpy as np

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _plt():
    import matplotlib
    matplotlib.use("Agg", force=False)
    import matplotlib.pyplot as plt
    params = {
        "figure.figsize": (6.4, 6.4 * _GOLDEN),
        "figure.dpi": 130,
        "font.size": 10,
        "axes.grid": True,
        "grid.alpha": 0.3,
        "lines.linewidth": 1.4,
        "legend.fontsize": 9,
        "savefig.bbox": "tight",
    }
    plt.rcParams.update(params)
    return plt


def _save(fig, path):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    fig.savefig(path)
    import matplotlib.pyplot as plt
    plt.close(fig)
    return path


def decay_figure(path, rho_I, series, fits=None, labels=None, title=""):
    """Log-log decay curves with fitted power laws overlaid."""
    plt = _plt()
    fig, ax = plt.subplots()
    series = np.atleast_2d(np.asarray(series).T).T
    for i in range(series.shape[1]):
        lab = labels[i] if labels else f"block {i}"
        vals = np.abs(series[:, i])
        ax.loglog(rho_I, np.where(vals > 0, vals, np.nan), label=lab)
        if fits is not None and fits[i] is not None:
            f = fits[i]
            lo, hi = f.window
            xs = np.array([lo, hi])
            anchor_idx = int(np.argmin(np.abs(rho_I - hi)))
            anchor = max(abs(series[anchor_idx, i]), 1e-300)
            ax.loglog(xs, anchor * (xs / hi) ** f.exponent, "k--", alpha=0.6,
                      lw=1.0)
    ax.set_xlabel(r"$\rho_{\mathcal{I}}$")
    ax.set_ylabel("|amplitude|")
    ax.set_title(title)
    if labels:
        ax.legend(loc="best", ncol=2)
    return _save(fig, path)


def eigenvalue_figure(path, eigenvalues, title="block spectrum"):
    plt = _plt()
    fig, ax = plt.subplots()
    vals = np.asarray(eigenvalues, dtype=float)
    ax.stem(np.arange(vals.size), vals)
    ax.set_xlabel("canonical slot")
    ax.set_ylabel("eigenvalue")
    ax.set_title(title)
    return _save(fig, path)


def matrix_error_figure(path, err, title="extraction error"):
    plt = _plt()
    fig, ax = plt.subplots()
    im = ax.imshow(np.asarray(err), cmap="viridis")
    fig.colorbar(im, ax=ax, shrink=0.85)
    ax.set_xlabel("column")
    ax.set_ylabel("row")
    ax.set_title(title)
    return _save(fig, path)


def mass_figure(path, record, title="Bondi mass and news flux"):
    plt = _plt()
    fig, ax = plt.subplots()
    ax.plot(record.u_ret, record.mass, label=r"$M_B(u)$")
    ax2 = ax.twinx()
    ax2.plot(record.u_ret, record.news_flux, color="tab:red", alpha=0.7,
             label="news flux")
    ax2.grid(False)
    ax.set_xlabel(r"retarded time $u$")
    ax.set_ylabel(r"$M_B$")
    ax2.set_ylabel("flux")
    ax.set_title(title)
    return _save(fig, path)


def slope_figure(path, names, slopes, required, title="remainder decay orders"):
    plt = _plt()
    fig, ax = plt.subplots(figsize=(7.2, 7.2 * _GOLDEN))
    x = np.arange(len(names))
    ax.bar(x, slopes, width=0.6, label="fitted slope")
    ax.plot(x, required, "r_", markersize=14, label="stated order - 0.1")
    ax.set_xticks(x)
    ax.set_xticklabels(names, rotation=75, fontsize=7)
    ax.set_ylabel("log-log slope")
    ax.set_title(title)
    ax.legend()
    return _save(fig, path)


def energy_figure(path, rho_I, energy, title="slice energy"):
    plt = _plt()
    fig, ax = plt.subplots()
    ax.loglog(rho_I, np.maximum(energy, 1e-300))
    ax.set_xlabel(r"$\rho_{\mathcal{I}}$")
    ax.set_ylabel("energy")
    ax.set_title(title)
    return _save(fig, path)
