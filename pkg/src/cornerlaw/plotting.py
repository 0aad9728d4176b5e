"""Static SVG figures for sweeps, fits and the analytic comparison."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .fitting import regressor  # noqa: E402

STYLE = {
    "font.size": 10,
    "axes.labelsize": 11,
    "legend.fontsize": 8,
    "xtick.labelsize": 9,
    "ytick.labelsize": 9,
    "lines.linewidth": 1.4,
    "lines.markersize": 4,
    "svg.hashsalt": "cornerlaw",
    "svg.fonttype": "none",
}


def _save(fig, path):
    # fixed salt and no date stamp keep the SVG byte-identical across runs
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def _pi_ticks(ax):
    ticks = np.linspace(0, math.pi, 5)
    ax.set_xticks(ticks)
    ax.set_xticklabels(["0", r"$\pi/4$", r"$\pi/2$", r"$3\pi/4$", r"$\pi$"])


def plot_counts(radius_sweep, fit_legs, fit_corners, path):
    """Mean counts against theta at one radius, with the fitted corner model."""
    with plt.rc_context(STYLE):
        fig, axes = plt.subplots(1, 2, figsize=(8, 3.2))
        theta = np.asarray(radius_sweep.theta)
        fine = np.linspace(max(theta.min(), 1e-3), theta.max(), 400)
        for ax, y, fit, label in (
            (axes[0], radius_sweep.mean_legs, fit_legs, r"$n_\mathrm{legs}$"),
            (axes[1], radius_sweep.mean_corners, fit_corners, r"$n_\mathrm{corners}$"),
        ):
            ax.plot(theta, y, "o", mfc="none", label="count")
            ax.plot(fine, fit.alpha + fit.beta * regressor(fine), "-",
                    label=rf"fit, $\beta={fit.beta:.4f}$")
            ax.set_xlabel(r"$\theta$")
            ax.set_ylabel(label)
            _pi_ticks(ax)
            ax.legend(frameon=False)
        fig.suptitle(f"r = {radius_sweep.r:g}")
        fig.tight_layout()
        _save(fig, path)


def plot_beta(trend, path):
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4.5, 3.2))
        ax.plot(trend.r_values, trend.beta_legs, "o-", label=r"$\beta_\mathrm{legs}$")
        ax.plot(trend.r_values, trend.beta_corners, "s-", label=r"$\beta_\mathrm{corners}$")
        ax.set_xscale("log", base=2)
        ax.set_xlabel("r")
        ax.set_ylabel(r"$\beta$")
        ax.legend(frameon=False)
        fig.tight_layout()
        _save(fig, path)


def plot_fit_error(trend, path):
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4.5, 3.2))
        ax.plot(trend.r_values, [f.nmse for f in trend.fits_legs], "o-", label="legs")
        ax.plot(trend.r_values, [f.nmse for f in trend.fits_corners], "s-", label="corners")
        ax.set_xscale("log", base=2)
        ax.set_yscale("log")
        ax.set_xlabel("r")
        ax.set_ylabel("normalized MSE")
        ax.legend(frameon=False)
        fig.tight_layout()
        _save(fig, path)


def plot_analytic(rows, path):
    """Skip estimators on a common scale: per-quadrant orientation integral."""
    theta = np.array([r.theta for r in rows])
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4.5, 3.2))
        ax.plot(theta, [r.pskip_closed for r in rows], "-", label="closed form")
        ax.plot(theta, [r.pskip_quad for r in rows], "--", label="quadrature")
        mc = np.array([r.mc_skip_freq for r in rows]) * (math.pi / 2)
        ax.plot(theta, mc, "o", mfc="none", label=r"grid frequency $\times\,\pi/2$")
        ax.set_xlabel(r"$\theta$")
        ax.set_ylabel("skip measure")
        _pi_ticks(ax)
        ax.legend(frameon=False)
        fig.tight_layout()
        _save(fig, path)
