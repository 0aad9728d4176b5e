"""Exact counts of cut bonds and dual-boundary corners for a wedge bipartition."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .geometry import Bond, SectorConfig, Site, relative_angles, system_grid, wedge_threshold

# Unit-cell corners in cyclic order around the plaquette (ll, lr, ur, ul);
# diagonal partners are two steps apart.
CELL_CORNERS = ((0, 0), (1, 0), (1, 1), (0, 1))


@dataclass
class BipartitionResult:
    n_legs: int
    n_corners: int
    cut_bonds: list[Bond] = field(default_factory=list)
    corner_plaquettes: list[tuple[int, int]] = field(default_factory=list)
    a_size: int = 0


@dataclass(frozen=True)
class LatticePatch:
    """Sites, bonds and complete plaquettes of the disc around one apex.

    ``bonds`` holds index pairs into the site arrays; ``plaquettes`` holds
    four site indices per plaquette in ``CELL_CORNERS`` order.
    """

    xs: np.ndarray
    ys: np.ndarray
    bonds: np.ndarray
    plaquettes: np.ndarray

    @property
    def n_sites(self) -> int:
        return len(self.xs)

    def angles(self, apex_offset) -> np.ndarray:
        u, v = apex_offset
        return np.arctan2(self.ys - v, self.xs - u)


@lru_cache(maxsize=256)
def _patch(apex_offset: tuple[float, float], radius: float) -> LatticePatch:
    xs, ys = system_grid(apex_offset, radius)
    if len(xs) == 0:
        empty = np.zeros((0, 2), dtype=np.int64)
        return LatticePatch(xs, ys, empty, np.zeros((0, 4), dtype=np.int64))
    x0, y0 = xs.min(), ys.min()
    w, h = xs.max() - x0 + 3, ys.max() - y0 + 3
    index = np.full((h, w), -1, dtype=np.int64)
    index[ys - y0, xs - x0] = np.arange(len(xs))

    here = index[ys - y0, xs - x0]
    right = index[ys - y0, xs - x0 + 1]
    up = index[ys - y0 + 1, xs - x0]
    diag = index[ys - y0 + 1, xs - x0 + 1]

    horizontal = np.stack([here, right], axis=1)[right >= 0]
    vertical = np.stack([here, up], axis=1)[up >= 0]
    # canonical Bond order is lexicographic on (x, y): left/lower endpoint first
    bonds = np.concatenate([vertical, horizontal])
    order = np.lexsort((ys[bonds[:, 1]], xs[bonds[:, 1]], ys[bonds[:, 0]], xs[bonds[:, 0]]))
    bonds = bonds[order]

    full = (right >= 0) & (up >= 0) & (diag >= 0)
    plaquettes = np.stack([here, right, diag, up], axis=1)[full]
    return LatticePatch(xs, ys, bonds, plaquettes)


def lattice_patch(apex_offset, radius: float) -> LatticePatch:
    u, v = apex_offset
    return _patch((float(u), float(v)), float(radius))


def plaquette_corner_count(in_a) -> np.ndarray:
    """Dual-boundary turns inside plaquettes, from A-membership of their corners.

    ``in_a`` has shape ``(..., 4)`` in ``CELL_CORNERS`` order. Uniform and
    straight two-two splits give 0, one-vs-three gives 1, diagonal gives 2.
    """
    in_a = np.asarray(in_a, dtype=bool)
    k = in_a.sum(axis=-1)
    diagonal = (k == 2) & (in_a[..., 0] == in_a[..., 2])
    return np.where((k == 1) | (k == 3), 1, np.where(diagonal, 2, 0))


def classify_sites(config: SectorConfig) -> tuple[set[Site], set[Site]]:
    patch = lattice_patch(config.apex_offset, config.radius)
    in_a = _membership(patch, config)
    a, b = set(), set()
    for x, y, flag in zip(patch.xs, patch.ys, in_a):
        (a if flag else b).add(Site(int(x), int(y)))
    return a, b


def _membership(patch: LatticePatch, config: SectorConfig) -> np.ndarray:
    psi = relative_angles(patch.xs - config.apex_offset[0],
                          patch.ys - config.apex_offset[1], config.phi)
    return np.asarray(psi) < wedge_threshold(config.theta)


def count_bipartition(config: SectorConfig) -> BipartitionResult:
    """Cut bonds and corner turns of the wedge, both computed exactly."""
    patch = lattice_patch(config.apex_offset, config.radius)
    in_a = _membership(patch, config)
    xs, ys = patch.xs, patch.ys

    cut = in_a[patch.bonds[:, 0]] != in_a[patch.bonds[:, 1]]
    cut_bonds = [
        Bond(Site(int(xs[i]), int(ys[i])), Site(int(xs[j]), int(ys[j])))
        for i, j in patch.bonds[cut]
    ]

    per_plaquette = plaquette_corner_count(in_a[patch.plaquettes])
    turning = np.nonzero(per_plaquette)[0]
    anchors = [(int(xs[patch.plaquettes[p, 0]]), int(ys[patch.plaquettes[p, 0]]))
               for p in turning]
    return BipartitionResult(
        n_legs=len(cut_bonds),
        n_corners=int(per_plaquette.sum()),
        cut_bonds=cut_bonds,
        corner_plaquettes=anchors,
        a_size=int(in_a.sum()),
    )


def count_cut_bonds(config: SectorConfig) -> BipartitionResult:
    return count_bipartition(config)


def count_corner_turns(config: SectorConfig) -> BipartitionResult:
    return count_bipartition(config)


def _check_local_theta(theta: float) -> None:
    if not 0.0 < theta <= math.pi:
        raise ValueError(f"local indicators need 0 < theta <= pi, got {theta}")


def cell_membership(theta, phi, apex_offset) -> np.ndarray:
    """A-membership of the apex cell's four corners, radius ignored.

    ``phi``, ``apex_offset`` components may be arrays (broadcast together);
    the result gains a trailing axis of length 4.
    """
    u, v = apex_offset
    u, v, phi = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float),
                                    np.asarray(phi, float))
    limit = wedge_threshold(theta)
    cols = [relative_angles(cx - u, cy - v, phi) < limit for cx, cy in CELL_CORNERS]
    return np.stack(cols, axis=-1)


def nearest_cell_skip_indicator(theta: float, phi: float, apex_offset) -> bool:
    """True iff the wedge picks up none of the four sites of its apex cell."""
    _check_local_theta(theta)
    return not bool(cell_membership(theta, phi, apex_offset).any())


def nearest_cell_corner_indicator(theta: float, phi: float, apex_offset) -> int:
    _check_local_theta(theta)
    return int(plaquette_corner_count(cell_membership(theta, phi, apex_offset)))


def grid_cut_bonds(L: int, a_sites) -> int:
    """Bonds of an open ``L x L`` grid with exactly one endpoint in A.

    Sites are row-major indices ``row * L + col``.
    """
    mask = np.zeros((L, L), dtype=bool)
    for s in a_sites:
        mask[divmod(int(s), L)] = True
    return int((mask[:, 1:] != mask[:, :-1]).sum() + (mask[1:, :] != mask[:-1, :]).sum())
