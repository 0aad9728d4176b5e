import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cornerlaw.fitting import (
    BetaTrend,
    RankDeficientError,
    beta_vs_radius,
    fit_corner_model,
    fit_window,
    regressor,
)
from cornerlaw.sweep import SweepSpec, run_sweep

THETAS = np.linspace(0.15 * math.pi, 0.99 * math.pi, 20)


class Series:
    def __init__(self, theta, legs, corners):
        self.theta, self.mean_legs, self.mean_corners = theta, legs, corners


def test_regressor_values():
    assert regressor(math.pi / 2) == pytest.approx(0.0, abs=1e-15)
    assert regressor(math.pi) == -1.0
    assert regressor(math.pi / 4) == pytest.approx(3 * math.pi / 4)
    np.testing.assert_allclose(regressor(np.array([math.pi / 2, math.pi])), [0, -1], atol=1e-15)


def test_regressor_approaches_limit_near_pi():
    assert regressor(math.pi - 1e-6) == pytest.approx(-1.0, abs=1e-9)


@pytest.mark.parametrize("bad", [0.0, -0.1, math.pi + 1e-9, math.nan])
def test_regressor_domain(bad):
    with pytest.raises(ValueError):
        regressor(bad)


def test_exact_model_recovered():
    y = 2.0 + 0.5 * regressor(THETAS)
    fit = fit_corner_model(zip(THETAS, y))
    assert fit.alpha == pytest.approx(2.0, rel=1e-12)
    assert fit.beta == pytest.approx(0.5, rel=1e-12)
    assert fit.nmse < 1e-28
    assert fit.n_points == 20
    assert fit.theta_range_used == (THETAS[0], THETAS[-1])


def test_flat_data_has_zero_error():
    fit = fit_corner_model((t, 7.0) for t in THETAS)
    assert fit.alpha == pytest.approx(7.0, rel=1e-12)
    assert fit.beta == pytest.approx(0.0, abs=1e-12)
    assert fit.nmse == 0.0


def test_identical_regressors_rejected():
    with pytest.raises(RankDeficientError):
        fit_corner_model([(1.0, 1.0), (1.0, 2.0), (1.0, 3.0)])
    with pytest.raises(ValueError):
        fit_corner_model([(1.0, 1.0)])


def test_matches_normal_equations_on_real_sweep():
    sweep = run_sweep(SweepSpec(r_list=(4.0,)))[4]
    fit = fit_window(sweep.theta, sweep.mean_legs)
    keep = (sweep.theta >= 0.15 * math.pi) & (sweep.theta <= 0.99 * math.pi)
    g, y = regressor(sweep.theta[keep]), sweep.mean_legs[keep]
    n = len(g)
    # Cramer's rule on the 2x2 normal equations
    sg, sy, sgg, sgy = g.sum(), y.sum(), (g * g).sum(), (g * y).sum()
    det = n * sgg - sg * sg
    beta = (n * sgy - sg * sy) / det
    alpha = (sy - beta * sg) / n
    assert math.isfinite(fit.nmse)
    assert fit.alpha == pytest.approx(alpha, rel=1e-10)
    assert fit.beta == pytest.approx(beta, rel=1e-10)


def test_window_selects_points():
    theta = np.linspace(0.05 * math.pi, math.pi, 40)
    fit = fit_window(theta, 1 + regressor(theta), (0.5 * math.pi, math.pi))
    assert fit.theta_range_used[0] >= 0.5 * math.pi
    assert fit.n_points == int(np.sum(theta >= 0.5 * math.pi))


def test_trend_spread_zero_for_radius_independent_beta():
    radii = (4.0, 8.0, 16.0, 32.0)
    series = {r: Series(THETAS, 3 * r - 0.3 * regressor(THETAS), r + 0.05 * regressor(THETAS))
              for r in radii}
    trend = beta_vs_radius(series)
    assert trend.relative_spread_legs == pytest.approx(0.0, abs=1e-10)
    assert trend.relative_spread_corners == pytest.approx(0.0, abs=1e-10)
    assert trend.r_values == list(radii)


def test_trend_spread_tracks_radius_dependent_beta():
    radii = np.array([4.0, 8.0, 16.0, 32.0])
    series = {r: Series(THETAS, r * regressor(THETAS), r * regressor(THETAS)) for r in radii}
    trend = beta_vs_radius(series)
    assert trend.relative_spread_legs == pytest.approx(radii.std() / radii.mean(), rel=1e-9)


def test_trend_needs_two_radii():
    with pytest.raises(ValueError):
        beta_vs_radius({4.0: Series(THETAS, THETAS, THETAS)})


def test_spread_definition():
    trend = BetaTrend([1, 2], [-1.0, -3.0], [1.0, 1.0], [], [])
    assert trend.relative_spread_legs == pytest.approx(0.5)
    assert trend.relative_spread_corners == 0.0


coefs = st.floats(-50, 50, allow_nan=False)


@settings(max_examples=50, deadline=None)
@given(alpha=coefs, beta=coefs, scale=st.floats(0.01, 100), seed=st.integers(0, 2**32 - 1))
def test_affine_equivariance(alpha, beta, scale, seed):
    noise = np.random.default_rng(seed).standard_normal(len(THETAS))
    y = alpha + beta * regressor(THETAS) + noise
    a = fit_corner_model(zip(THETAS, y))
    b = fit_corner_model(zip(THETAS, scale * y))
    assert b.alpha == pytest.approx(scale * a.alpha, rel=1e-9, abs=1e-9 * scale)
    assert b.beta == pytest.approx(scale * a.beta, rel=1e-9, abs=1e-9 * scale)
    # nmse is scale-free because the range scales with y
    assert b.nmse == pytest.approx(a.nmse, rel=1e-8)


@settings(max_examples=50, deadline=None)
@given(alpha=coefs, beta=coefs, seed=st.integers(0, 2**32 - 1))
def test_residuals_orthogonal_to_design(alpha, beta, seed):
    noise = np.random.default_rng(seed).standard_normal(len(THETAS))
    g = regressor(THETAS)
    y = alpha + beta * g + noise
    fit = fit_corner_model(zip(THETAS, y))
    resid = y - fit.predict(THETAS)
    assert abs(resid.sum()) < 1e-9
    assert abs(resid @ g) < 1e-9


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_nmse_monotone_in_noise_scale(seed):
    noise = np.random.default_rng(seed).standard_normal(len(THETAS))
    base = 1.0 - 0.3 * regressor(THETAS)
    errors = [fit_corner_model(zip(THETAS, base + s * noise)).nmse
              for s in (1e-1, 1e-2, 1e-3, 1e-4)]
    assert all(a > b for a, b in zip(errors, errors[1:]))
