"""Wedge bipartition geometry on the unit square lattice.

The system is the set of integer lattice sites within Euclidean distance
``r`` of the apex. Subsystem A is the wedge of opening ``theta`` whose first
edge points along ``phi``; angular membership is half-open, ``[phi, phi+theta)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

TWO_PI = 2.0 * math.pi
# Angular ties (a site exactly on a wedge edge) are decided as if the site sat
# this far inside the first edge, so rounding noise cannot flip them.
ANGLE_EPS = 1e-12


class Site(NamedTuple):
    x: int
    y: int


class Bond(NamedTuple):
    """Nearest-neighbour bond, endpoints in canonical (lexicographic) order."""

    a: Site
    b: Site

    @classmethod
    def between(cls, s: Site, t: Site) -> "Bond":
        s, t = Site(*s), Site(*t)
        if abs(s.x - t.x) + abs(s.y - t.y) != 1:
            raise ValueError(f"sites {s} and {t} are not nearest neighbours")
        return cls(s, t) if s <= t else cls(t, s)


def normalize_angle(raw):
    """Reduce an angle (scalar or array) into ``[0, 2*pi)``."""
    arr = np.asarray(raw, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"angle must be finite, got {raw!r}")
    out = np.mod(arr, TWO_PI)
    # np.mod can round a tiny negative input up to exactly 2*pi
    out = np.where(out >= TWO_PI, 0.0, out)
    if out.ndim == 0:
        return float(out)
    return out


def relative_angles(dx, dy, phi: float):
    """Angle of the displacement ``(dx, dy)`` measured from the wedge's first edge.

    Shared by the scalar predicate and the vectorized sweep kernel so that
    both make bit-identical membership decisions. Angles within ``ANGLE_EPS``
    below 2*pi are snapped to 0 (the site lies on the first edge).
    """
    psi = normalize_angle(np.arctan2(dy, dx) - phi)
    out = np.where(psi > TWO_PI - ANGLE_EPS, 0.0, psi)
    return float(out) if out.ndim == 0 else out


def wedge_threshold(theta):
    """Relative angles strictly below this value are inside the wedge."""
    return np.asarray(theta, dtype=float) - ANGLE_EPS


@dataclass(frozen=True)
class SectorConfig:
    """Geometry of one wedge bipartition.

    ``apex_offset`` is the apex position inside the unit cell; ``theta`` may
    exceed pi (up to 2*pi) so that the complement wedge is expressible.
    """

    apex_offset: tuple[float, float] = (0.5, 0.5)
    phi: float = 0.0
    theta: float = math.pi
    radius: float = 4.0
    spacing: float = 1.0

    def __post_init__(self):
        u, v = (float(c) for c in self.apex_offset)
        if not (math.isfinite(u) and math.isfinite(v)):
            raise ValueError("apex offset must be finite")
        if not (0.0 <= u < 1.0 and 0.0 <= v < 1.0):
            raise ValueError(f"apex offset must lie in [0, 1)^2, got {(u, v)}")
        if not math.isfinite(self.theta) or not 0.0 <= self.theta <= TWO_PI:
            raise ValueError(f"opening angle must lie in [0, 2pi], got {self.theta}")
        if not math.isfinite(self.radius) or self.radius <= 0:
            raise ValueError(f"radius must be positive, got {self.radius}")
        if self.spacing != 1.0:
            raise ValueError("lattice spacing is fixed to 1")
        object.__setattr__(self, "apex_offset", (u, v))
        object.__setattr__(self, "phi", normalize_angle(self.phi))
        object.__setattr__(self, "theta", float(self.theta))
        object.__setattr__(self, "radius", float(self.radius))

    def replace(self, **changes) -> "SectorConfig":
        fields = dict(apex_offset=self.apex_offset, phi=self.phi, theta=self.theta,
                      radius=self.radius)
        fields.update(changes)
        return SectorConfig(**fields)


def site_in_system(site, config: SectorConfig) -> bool:
    u, v = config.apex_offset
    dx, dy = site[0] - u, site[1] - v
    return dx * dx + dy * dy <= config.radius * config.radius


def site_in_sector(site, config: SectorConfig) -> bool:
    """True iff ``site`` lies in the disc and inside the half-open wedge."""
    if not site_in_system(site, config):
        return False
    u, v = config.apex_offset
    return bool(relative_angles(site[0] - u, site[1] - v, config.phi) < wedge_threshold(config.theta))


def system_grid(apex_offset, radius: float) -> tuple[np.ndarray, np.ndarray]:
    """Integer coordinates ``(xs, ys)`` of all system sites, row-major order."""
    u, v = apex_offset
    r2 = radius * radius
    ys = np.arange(math.floor(v - radius), math.ceil(v + radius) + 1)
    xs = np.arange(math.floor(u - radius), math.ceil(u + radius) + 1)
    gy, gx = np.meshgrid(ys, xs, indexing="ij")
    dx, dy = gx - u, gy - v
    inside = dx * dx + dy * dy <= r2
    return gx[inside], gy[inside]


def enumerate_system_sites(config: SectorConfig) -> list[Site]:
    xs, ys = system_grid(config.apex_offset, config.radius)
    return [Site(int(x), int(y)) for x, y in zip(xs, ys)]
