"""Closed forms for the corner term and the apex-cell skip/corner probabilities.

Each closed form has an independent numerical counterpart (adaptive
quadrature of the per-orientation integrand) and a geometric Monte Carlo
counterpart in :mod:`cornerlaw.sweep`. They are tabulated side by side by
:func:`compare_estimators`; where the closed form and its quadrature disagree
the geometric frequency decides.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .fitting import regressor

# Below this opening angle the neighbouring plaquette can also be skipped.
THETA_CRITICAL = 2.0 * math.atan(0.5)
DEFAULT_TOL = 1e-8


class QuadratureError(RuntimeError):
    def __init__(self, message, estimate, error):
        super().__init__(f"{message} (estimate {estimate!r}, error {error:.3g})")
        self.estimate = estimate
        self.error = error


class PoleError(ValueError):
    """Integrand evaluated on a cotangent pole or outside its window."""


class OutOfValidityWarning(UserWarning):
    pass


# 7-point Gauss / 15-point Kronrod nodes and weights on [-1, 1]
_XK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
_KRONROD = np.concatenate([_WK[:-1], _WK[::-1]])
_GAUSS = np.zeros(15)
_GAUSS[1::2] = np.concatenate([_WG[:3], _WG[::-1]])


def _gk15(f, a, b):
    half, mid = 0.5 * (b - a), 0.5 * (a + b)
    fx = np.array([f(mid + half * x) for x in _NODES])
    k = half * np.dot(_KRONROD, fx)
    g = half * np.dot(_GAUSS, fx)
    return k, abs(k - g)


def adaptive_quad(f, a: float, b: float, tol: float = DEFAULT_TOL, max_intervals: int = 2000):
    """Integrate ``f`` over ``[a, b]`` by Gauss-Kronrod bisection.

    The worst subinterval is split until the summed error estimate drops
    below ``tol``. Returns ``(value, error_estimate)``; raises
    :class:`QuadratureError` if the interval budget runs out. Nodes never touch
    the endpoints, so integrable endpoint singularities are tolerated.
    """
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    if a == b:
        return 0.0, 0.0
    pieces = [(a, b, *_gk15(f, a, b))]
    while True:
        total = math.fsum(p[2] for p in pieces)
        err = math.fsum(p[3] for p in pieces)
        if err <= tol:
            return total, err
        if len(pieces) >= max_intervals or not math.isfinite(err):
            raise QuadratureError("quadrature did not converge", total, err)
        worst = max(range(len(pieces)), key=lambda i: pieces[i][3])
        lo, hi, _, _ = pieces.pop(worst)
        m = 0.5 * (lo + hi)
        if m <= lo or m >= hi:
            raise QuadratureError("interval collapsed to machine precision", total, err)
        pieces.append((lo, m, *_gk15(f, lo, m)))
        pieces.append((m, hi, *_gk15(f, m, hi)))


def b_shape(theta: float) -> float:
    """Universal corner-term shape ``-(1 + (pi - theta) cot theta)``, 0 at pi."""
    if not 0.0 < theta <= math.pi:
        raise ValueError(f"corner shape needs 0 < theta <= pi, got {theta}")
    return -(1.0 + regressor(theta))


def _window_phase(theta: float, phi: float) -> float:
    return math.fmod(phi, math.pi / 2) % (math.pi / 2)


def pskip_phi(theta: float, phi: float) -> float:
    """Apex-cell skip area for one orientation; 0 outside the window.

    The window is ``(theta - pi/2, pi/2)`` for ``phi`` reduced modulo pi/2.
    """
    if not 0.0 < theta < math.pi:
        raise ValueError(f"need 0 < theta < pi, got {theta}")
    m = _window_phase(theta, phi)
    if not theta - math.pi / 2 < m < math.pi / 2:
        return 0.0
    denom = math.tan(theta - m) + math.tan(m)
    if not math.isfinite(denom) or denom <= 0:
        return 0.0
    return 1.0 / (2.0 * denom)


def pskip_closed(theta: float) -> float:
    """``(1 - (pi - theta) cot theta) / 4``; limit 1/2 at pi.

    Warns with :class:`OutOfValidityWarning` for ``theta <= THETA_CRITICAL``.
    """
    if not 0.0 < theta <= math.pi:
        raise ValueError(f"need 0 < theta <= pi, got {theta}")
    if theta <= THETA_CRITICAL:
        warnings.warn(f"theta={theta:.6g} is below 2*atan(1/2); closed form not valid",
                      OutOfValidityWarning, stacklevel=2)
    return 0.25 * (1.0 - regressor(theta))


def pskip_quadrature(theta: float, tol: float = DEFAULT_TOL) -> float:
    """Integral of :func:`pskip_phi` over the window ``(theta - pi/2, pi/2)``."""
    if not 0.0 < theta <= math.pi:
        raise ValueError(f"need 0 < theta <= pi, got {theta}")
    if theta == math.pi:
        return 0.0
    value, _ = adaptive_quad(lambda p: pskip_phi(theta, p), theta - math.pi / 2, math.pi / 2, tol)
    return value


def pcorner_phi(theta: float, phi: float) -> float:
    """``cot(phi)/2 + cot(theta - phi)/2 - 2 pskip_phi``, inside the open window."""
    if not 0.0 < theta < math.pi:
        raise ValueError(f"need 0 < theta < pi, got {theta}")
    m = _window_phase(theta, phi)
    if not (theta - math.pi / 2 < m < math.pi / 2):
        raise PoleError(f"phi={phi} lies outside the window ({theta - math.pi / 2}, {math.pi / 2})")
    s1, s2 = math.sin(m), math.sin(theta - m)
    if s1 == 0.0 or s2 == 0.0:
        raise PoleError(f"cotangent pole at theta={theta}, phi={phi}")
    return 0.5 * math.cos(m) / s1 + 0.5 * math.cos(theta - m) / s2 - 2.0 * pskip_phi(theta, m)


def _check_corner_domain(theta: float) -> None:
    if not math.pi / 2 < theta <= math.pi:
        raise ValueError(f"corner closed form needs pi/2 < theta <= pi, got {theta}")


def pcorner_closed(theta: float) -> float:
    _check_corner_domain(theta)
    return math.log(math.cos(math.pi - theta)) - 2.0 * pskip_closed(theta)


def pcorner_approx(theta: float) -> float:
    _check_corner_domain(theta)
    return -2.0 * pskip_closed(theta)


def pcorner_quadrature(theta: float, tol: float = DEFAULT_TOL) -> float:
    _check_corner_domain(theta)
    if theta == math.pi:
        return 0.0
    value, _ = adaptive_quad(lambda p: pcorner_phi(theta, p), theta - math.pi / 2, math.pi / 2, tol)
    return value


@dataclass
class AnalyticEval:
    theta: float
    pskip_closed: float
    pskip_quad: float
    pcorner_closed: float
    pcorner_quad: float
    pcorner_approx: float
    b_shape: float
    mc_skip_freq: float = math.nan
    mc_corner_rate: float = math.nan
    valid: bool = True
    error: str = ""

    @property
    def skip_discrepancy(self) -> float:
        return abs(self.pskip_closed - self.pskip_quad)

    @property
    def corner_discrepancy(self) -> float:
        return abs(self.pcorner_closed - self.pcorner_quad)


def _attempt(fn, *args, errors: list):
    try:
        return fn(*args)
    except (ValueError, QuadratureError) as exc:
        errors.append(f"{fn.__name__}: {exc}")
        return math.nan


def evaluate(theta: float, tol: float = DEFAULT_TOL, phi_steps: int = 0,
             apex_steps: int = 0) -> AnalyticEval:
    """All estimators at one ``theta``; failures become NaN plus an error note.

    Monte Carlo columns are filled only when both grid sizes are positive.
    """
    from .sweep import estimate_corner_rate, estimate_skip_probability

    errors: list[str] = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", OutOfValidityWarning)
        row = AnalyticEval(
            theta=theta,
            pskip_closed=_attempt(pskip_closed, theta, errors=errors),
            pskip_quad=_attempt(pskip_quadrature, theta, tol, errors=errors),
            pcorner_closed=_attempt(pcorner_closed, theta, errors=errors),
            pcorner_quad=_attempt(pcorner_quadrature, theta, tol, errors=errors),
            pcorner_approx=_attempt(pcorner_approx, theta, errors=errors),
            b_shape=_attempt(b_shape, theta, errors=errors),
        )
    row.valid = THETA_CRITICAL < theta <= math.pi
    if phi_steps > 0 and apex_steps > 0:
        row.mc_skip_freq = _attempt(estimate_skip_probability, theta, phi_steps, apex_steps,
                                    errors=errors)
        row.mc_corner_rate = _attempt(estimate_corner_rate, theta, phi_steps, apex_steps,
                                      errors=errors)
    row.error = "; ".join(errors)
    return row


def compare_estimators(thetas, phi_steps: int = 100, apex_steps: int = 10,
                       tol: float = DEFAULT_TOL) -> list[AnalyticEval]:
    """Closed forms, quadratures and grid frequencies for every ``theta``.

    A failing estimator leaves NaN in its column and a note in ``error``;
    the remaining rows are still computed.
    """
    return [evaluate(float(t), tol, phi_steps, apex_steps) for t in thetas]
