"""Least-squares fits of averaged counts to ``alpha + beta * (pi - theta) * cot(theta)``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DEFAULT_FIT_WINDOW = (0.15 * math.pi, 0.99 * math.pi)


class RankDeficientError(ValueError):
    pass


def regressor(theta):
    """``(pi - theta) * cot(theta)``, with its limit -1 substituted at ``theta = pi``."""
    t = np.asarray(theta, dtype=float)
    if np.any(~np.isfinite(t)) or np.any(t <= 0) or np.any(t > math.pi):
        raise ValueError(f"regressor needs 0 < theta <= pi, got {theta}")
    at_pi = t == math.pi
    safe = np.where(at_pi, math.pi / 2, t)
    out = np.where(at_pi, -1.0, (math.pi - safe) / np.tan(safe))
    return float(out) if out.ndim == 0 else out


@dataclass
class FitResult:
    alpha: float
    beta: float
    nmse: float
    theta_range_used: tuple[float, float]
    n_points: int

    def predict(self, theta):
        return self.alpha + self.beta * regressor(theta)


def fit_corner_model(points) -> FitResult:
    """Fit ``y = alpha + beta * regressor(theta)`` by plain linear least squares.

    ``points`` is an iterable of ``(theta, y)``. ``nmse`` is the mean squared
    residual over the squared data range (0 for flat data).
    """
    pts = np.asarray(list(points), dtype=float).reshape(-1, 2)
    if len(pts) < 2:
        raise ValueError("need at least two points to fit")
    theta, y = pts[:, 0], pts[:, 1]
    g = np.atleast_1d(regressor(theta))
    if np.ptp(g) == 0:
        raise RankDeficientError("all regressor values are identical")
    design = np.column_stack([np.ones_like(g), g])
    (alpha, beta), *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ np.array([alpha, beta])
    span = np.ptp(y)
    nmse = float(np.mean(resid ** 2) / span ** 2) if span > 0 else 0.0
    return FitResult(float(alpha), float(beta), nmse,
                     (float(theta.min()), float(theta.max())), len(pts))


def fit_window(theta, y, window=DEFAULT_FIT_WINDOW) -> FitResult:
    """Fit only the points with ``window[0] <= theta <= window[1]``."""
    theta, y = np.asarray(theta, float), np.asarray(y, float)
    keep = (theta >= window[0]) & (theta <= window[1])
    return fit_corner_model(zip(theta[keep], y[keep]))


@dataclass
class BetaTrend:
    r_values: list[float]
    beta_legs: list[float]
    beta_corners: list[float]
    fits_legs: list[FitResult]
    fits_corners: list[FitResult]

    @staticmethod
    def _spread(betas) -> float:
        b = np.abs(np.asarray(betas, dtype=float))
        return float(b.std() / b.mean())

    @property
    def relative_spread_legs(self) -> float:
        return self._spread(self.beta_legs)

    @property
    def relative_spread_corners(self) -> float:
        return self._spread(self.beta_corners)


def beta_vs_radius(sweep, window=DEFAULT_FIT_WINDOW) -> BetaTrend:
    """Fit every radius of a sweep and collect the corner coefficients.

    ``sweep`` is a ``SweepResult`` or any mapping ``r -> object`` exposing
    ``theta``, ``mean_legs`` and ``mean_corners``.
    """
    radii = sweep.radii if hasattr(sweep, "radii") else sweep
    if len(radii) < 2:
        raise ValueError("need sweeps at two or more radii")
    rs, fl, fc = [], [], []
    for r in sorted(radii):
        data = radii[r]
        rs.append(float(r))
        fl.append(fit_window(data.theta, data.mean_legs, window))
        fc.append(fit_window(data.theta, data.mean_corners, window))
    return BetaTrend(rs, [f.beta for f in fl], [f.beta for f in fc], fl, fc)
