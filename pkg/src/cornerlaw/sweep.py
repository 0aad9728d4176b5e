"""Orientation- and apex-averaged counts over a grid of opening angles.

For a fixed apex and orientation every site enters A once ``theta`` exceeds its
relative angle, so a bond is cut for ``theta`` in ``(min, max]`` of its two
endpoint angles and a plaquette's turn count is a step function of the sorted
corner angles. Counting those breakpoints against the sorted theta grid gives
the counts for every theta at once, in exact integer arithmetic.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .counting import cell_membership, lattice_patch, plaquette_corner_count
from .geometry import TWO_PI, relative_angles, wedge_threshold

# Site-visits (samples x system sites, summed over radii) allowed per sweep.
DEFAULT_WORK_LIMIT = 5e9


class CapacityError(RuntimeError):
    """Requested sweep exceeds the work bound; raised before any computation."""


def default_theta_grid(lo: float = 0.02 * math.pi, hi: float = 0.99 * math.pi,
                       steps: int = 60) -> list[float]:
    return [float(t) for t in np.linspace(lo, hi, steps)]


@dataclass(frozen=True)
class SweepSpec:
    theta_grid: tuple[float, ...] = tuple(default_theta_grid())
    phi_steps: int = 100
    apex_steps: int = 10
    r_list: tuple[float, ...] = (4.0, 8.0, 16.0, 32.0)
    # average phi over [0, pi/2) only; equal to the full-circle average by C4 symmetry
    fundamental_domain: bool = False

    def __post_init__(self):
        object.__setattr__(self, "theta_grid", tuple(float(t) for t in self.theta_grid))
        object.__setattr__(self, "r_list", tuple(float(r) for r in self.r_list))
        if int(self.phi_steps) != self.phi_steps or self.phi_steps < 1:
            raise ValueError(f"phi_steps must be a positive integer, got {self.phi_steps}")
        if int(self.apex_steps) != self.apex_steps or self.apex_steps < 1:
            raise ValueError(f"apex_steps must be a positive integer, got {self.apex_steps}")
        if not self.theta_grid:
            raise ValueError("theta grid is empty")
        for t in self.theta_grid:
            if not (math.isfinite(t) and 0.0 <= t <= math.pi):
                raise ValueError(f"theta values must lie in [0, pi], got {t}")
        if not self.r_list:
            raise ValueError("radius list is empty")
        for r in self.r_list:
            if not (math.isfinite(r) and r > 1):
                raise ValueError(f"radii must exceed 1, got {r}")

    @property
    def phis(self) -> np.ndarray:
        span = math.pi / 2 if self.fundamental_domain else TWO_PI
        return span * np.arange(self.phi_steps) / self.phi_steps

    @property
    def apex_grid(self) -> list[tuple[float, float]]:
        """Half-step apex offsets, which keep the apex off lattice lines."""
        n = self.apex_steps
        ticks = [(i + 0.5) / n for i in range(n)]
        return [(u, v) for v in ticks for u in ticks]

    @property
    def samples_per_radius(self) -> int:
        return self.phi_steps * self.apex_steps ** 2

    def estimated_work(self) -> float:
        return self.samples_per_radius * sum(math.pi * (r + 1.5) ** 2 for r in self.r_list)


@dataclass
class RadiusSweep:
    """Exact totals at one radius; means are derived from them."""

    r: float
    theta: np.ndarray
    total_legs: np.ndarray
    total_corners: np.ndarray
    total_legs_sq: np.ndarray
    total_corners_sq: np.ndarray
    sample_count: int

    @property
    def mean_legs(self) -> np.ndarray:
        return self.total_legs / self.sample_count

    @property
    def mean_corners(self) -> np.ndarray:
        return self.total_corners / self.sample_count

    def std_error(self, which: str = "legs") -> np.ndarray:
        """Standard error of the mean over the sample grid."""
        tot = self.total_legs if which == "legs" else self.total_corners
        sq = self.total_legs_sq if which == "legs" else self.total_corners_sq
        n = self.sample_count
        var = (sq / n - (tot / n) ** 2) * n / max(n - 1, 1)
        return np.sqrt(np.maximum(var, 0.0) / n)


@dataclass
class SweepResult:
    spec: SweepSpec
    radii: dict[float, RadiusSweep] = field(default_factory=dict)

    def __getitem__(self, r) -> RadiusSweep:
        return self.radii[float(r)]

    def rows(self):
        """Yield ``(r, theta, mean_legs, mean_corners, n_samples)`` per grid point."""
        for r, rs in self.radii.items():
            for k, t in enumerate(rs.theta):
                yield r, float(t), float(rs.mean_legs[k]), float(rs.mean_corners[k]), rs.sample_count


def _breakpoint_counts(values: np.ndarray, weights, thetas: np.ndarray) -> np.ndarray:
    """Per row of ``values``: sum of weights over entries strictly below each theta.

    ``thetas`` must be sorted. Returns an int64 array of shape ``(rows, len(thetas))``.
    """
    rows, T = values.shape[0], len(thetas)
    idx = np.searchsorted(thetas, values.reshape(rows, -1), side="right")
    codes = (idx + (T + 1) * np.arange(rows)[:, None]).ravel()
    w = None if weights is None else np.broadcast_to(weights, idx.shape).ravel()
    hist = np.bincount(codes, weights=w, minlength=rows * (T + 1)).reshape(rows, T + 1)
    return np.rint(np.cumsum(hist, axis=1)[:, :T]).astype(np.int64)


def sample_counts(apex_offset, radius: float, phis, thetas) -> tuple[np.ndarray, np.ndarray]:
    """Exact ``(n_legs, n_corners)`` for every (phi, theta) pair at one apex.

    ``thetas`` must be sorted ascending. Both outputs have shape
    ``(len(phis), len(thetas))``.
    """
    phis = np.asarray(phis, dtype=float)
    thetas = wedge_threshold(thetas)
    patch = lattice_patch(apex_offset, radius)
    F, T = len(phis), len(thetas)
    if patch.n_sites == 0:
        zero = np.zeros((F, T), dtype=np.int64)
        return zero, zero.copy()

    u, v = apex_offset
    psi = relative_angles((patch.xs - u)[None, :], (patch.ys - v)[None, :], phis[:, None])

    legs = np.zeros((F, T), dtype=np.int64)
    if len(patch.bonds):
        ends = psi[:, patch.bonds]  # (F, B, 2)
        lo, hi = ends.min(axis=2), ends.max(axis=2)
        legs = _breakpoint_counts(lo, None, thetas) - _breakpoint_counts(hi, None, thetas)

    corners = np.zeros((F, T), dtype=np.int64)
    if len(patch.plaquettes):
        quad = psi[:, patch.plaquettes]  # (F, P, 4)
        order = np.argsort(quad, axis=2, kind="stable")
        ranked = np.take_along_axis(quad, order, axis=2)
        # the first two corners to enter A are diagonal partners iff same parity
        sign = np.where(order[..., 0] % 2 == order[..., 1] % 2, 1, -1)
        corners = (_breakpoint_counts(ranked[..., 0], None, thetas)
                   - _breakpoint_counts(ranked[..., 3], None, thetas)
                   + _breakpoint_counts(ranked[..., 1], sign, thetas)
                   - _breakpoint_counts(ranked[..., 2], sign, thetas))
    return legs, corners


def _apex_chunk(args):
    apexes, radius, phis, thetas = args
    T = len(thetas)
    acc = np.zeros((4, T), dtype=np.int64)
    for apex in apexes:
        legs, corners = sample_counts(apex, radius, phis, thetas)
        acc[0] += legs.sum(axis=0)
        acc[1] += corners.sum(axis=0)
        acc[2] += (legs * legs).sum(axis=0)
        acc[3] += (corners * corners).sum(axis=0)
    return acc


def run_sweep(spec: SweepSpec, workers: int = 1,
              work_limit: float = DEFAULT_WORK_LIMIT) -> SweepResult:
    """Average exact counts over the (phi, apex) grid for every radius and theta.

    Work is split over apex positions; the reduction is an integer sum, so the
    result does not depend on ``workers``.
    """
    work = spec.estimated_work()
    if work > work_limit:
        raise CapacityError(f"sweep needs ~{work:.3g} site visits, limit is {work_limit:.3g}")

    theta = np.asarray(spec.theta_grid)
    order = np.argsort(theta, kind="stable")
    thetas_sorted = theta[order]
    phis = spec.phis
    apexes = spec.apex_grid
    n_chunks = max(1, min(len(apexes), 4 * workers))
    chunks = [apexes[i::n_chunks] for i in range(n_chunks)]

    result = SweepResult(spec)
    pool = ProcessPoolExecutor(workers) if workers > 1 else None
    try:
        for r in spec.r_list:
            jobs = [(c, r, phis, thetas_sorted) for c in chunks]
            parts = pool.map(_apex_chunk, jobs) if pool else map(_apex_chunk, jobs)
            acc = np.zeros((4, len(theta)), dtype=np.int64)
            for part in parts:
                acc += part
            unsorted = np.empty_like(acc)
            unsorted[:, order] = acc
            result.radii[r] = RadiusSweep(
                r=r, theta=theta.copy(),
                total_legs=unsorted[0], total_corners=unsorted[1],
                total_legs_sq=unsorted[2], total_corners_sq=unsorted[3],
                sample_count=spec.samples_per_radius,
            )
    finally:
        if pool:
            pool.shutdown()
    return result


def _local_grid(phi_steps: int, apex_steps: int):
    phis = TWO_PI * np.arange(phi_steps) / phi_steps
    ticks = (np.arange(apex_steps) + 0.5) / apex_steps
    # axes: (phi, v, u)
    return phis[:, None, None], ticks[None, :, None], ticks[None, None, :]


def estimate_skip_probability(theta: float, phi_steps: int = 100, apex_steps: int = 10) -> float:
    """Fraction of (phi, apex) grid samples whose apex cell contributes no A site."""
    if not 0.0 < theta <= math.pi:
        raise ValueError(f"need 0 < theta <= pi, got {theta}")
    phi, v, u = _local_grid(phi_steps, apex_steps)
    in_a = cell_membership(theta, phi, (u, v))
    return float((~in_a.any(axis=-1)).mean())


def estimate_corner_rate(theta: float, phi_steps: int = 100, apex_steps: int = 10) -> float:
    """Mean corner count of the apex cell over the (phi, apex) grid."""
    if not 0.0 < theta <= math.pi:
        raise ValueError(f"need 0 < theta <= pi, got {theta}")
    phi, v, u = _local_grid(phi_steps, apex_steps)
    return float(plaquette_corner_count(cell_membership(theta, phi, (u, v))).mean())
