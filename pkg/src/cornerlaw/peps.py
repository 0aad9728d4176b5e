"""Exact contraction of small open-boundary PEPS and Schmidt-rank bounds.

Site tensors carry axes ``(physical, left, up, right, down)``. Grids are lists
of rows; the state vector is ordered row-major with the first site slowest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

DEFAULT_RANK_TOL = 1e-10
MAX_STATE_SIZE = 2 ** 16


@dataclass(frozen=True)
class PepsSpec:
    grid_size: int = 3
    physical_dim: int = 2
    bond_dim: int = 2
    seed: int = 0

    def __post_init__(self):
        if self.grid_size < 1 or self.physical_dim < 1 or self.bond_dim < 1:
            raise ValueError("grid size, physical and bond dimensions must be positive")
        if self.physical_dim ** (self.grid_size ** 2) > MAX_STATE_SIZE:
            raise ValueError(f"state of {self.grid_size}x{self.grid_size} sites with d="
                             f"{self.physical_dim} exceeds {MAX_STATE_SIZE} amplitudes")


def build_peps(spec: PepsSpec) -> list[list[np.ndarray]]:
    """One seeded Gaussian tensor replicated over an ``L x L`` open grid.

    Virtual legs facing the boundary are sliced down to dimension 1.
    """
    rng = np.random.default_rng(spec.seed)
    chi, L = spec.bond_dim, spec.grid_size
    tensor = rng.standard_normal((spec.physical_dim, chi, chi, chi, chi))
    grid = []
    for i in range(L):
        row = []
        for j in range(L):
            left = slice(0, 1) if j == 0 else slice(None)
            up = slice(0, 1) if i == 0 else slice(None)
            right = slice(0, 1) if j == L - 1 else slice(None)
            down = slice(0, 1) if i == L - 1 else slice(None)
            row.append(tensor[:, left, up, right, down].copy())
        grid.append(row)
    return grid


def contract_to_state(grid) -> np.ndarray:
    """Contract a rectangular tensor grid site by site into a unit-norm vector."""
    rows, cols = len(grid), len(grid[0])
    # psi axes: (physical so far, open vertical bond per column, open horizontal bond)
    psi = np.ones((1,) + (1,) * cols + (1,))
    for i in range(rows):
        for j in range(cols):
            t = grid[i][j]
            if psi.shape[1 + j] != t.shape[2] or psi.shape[-1] != t.shape[1]:
                raise ValueError(f"bond dimensions do not match at site ({i}, {j})")
            out = np.tensordot(psi, t, axes=([1 + j, 1 + cols], [2, 1]))
            # out axes: P, cols-1 vertical, p, right, down
            out = np.moveaxis(out, -1, 1 + j)          # down takes column j's slot
            out = np.moveaxis(out, -2, 1)              # physical next to P
            p_total = out.shape[0] * out.shape[1]
            psi = out.reshape((p_total,) + out.shape[2:])
        if psi.shape[-1] != 1:
            raise ValueError(f"row {i} has an open right boundary leg")
    if any(dim != 1 for dim in psi.shape[1:]):
        raise ValueError("bottom boundary legs are not of dimension 1")
    state = psi.reshape(-1)
    norm = np.linalg.norm(state)
    if norm == 0:
        raise ValueError("contracted state has zero norm")
    return state / norm


@dataclass
class SpectrumResult:
    eigenvalues: np.ndarray
    schmidt_rank: int
    s_vn: float
    renyi: dict[int, float] = field(default_factory=dict)


def _bipartite_matrix(state, a_sites, n_sites: int, d: int) -> np.ndarray:
    a = sorted({int(s) for s in a_sites})
    if not a or len(a) >= n_sites or a[0] < 0 or a[-1] >= n_sites:
        raise ValueError("subsystem must be a nonempty proper subset of the sites")
    b = [s for s in range(n_sites) if s not in a]
    psi = np.asarray(state).reshape((d,) * n_sites).transpose(a + b)
    return psi.reshape(d ** len(a), d ** len(b))


def spectrum_from_eigenvalues(eigenvalues, rank_tol: float = DEFAULT_RANK_TOL) -> SpectrumResult:
    lam = np.sort(np.asarray(eigenvalues, dtype=float))[::-1]
    rank = int(np.sum(lam > rank_tol * lam[0]))
    pos = lam[lam > 0]
    s_vn = float(-np.sum(pos * np.log(pos)))
    renyi = {n: float(-np.log(np.sum(pos ** n))) for n in (2, 3)}
    return SpectrumResult(lam, rank, s_vn, renyi)


def rdm_spectrum(state, a_sites, n_sites: int | None = None, d: int = 2,
                 rank_tol: float = DEFAULT_RANK_TOL) -> SpectrumResult:
    """Spectrum of the reduced density matrix of ``a_sites``.

    The Hermitian eigenproblem is solved on whichever side of the cut is
    smaller; the nonzero spectra of the two reduced density matrices coincide.
    """
    state = np.asarray(state)
    if n_sites is None:
        n_sites = round(math.log(state.size, d))
    m = _bipartite_matrix(state, a_sites, n_sites, d)
    rho = m @ m.conj().T if m.shape[0] <= m.shape[1] else m.conj().T @ m
    lam = np.linalg.eigvalsh(rho)
    return spectrum_from_eigenvalues(lam, rank_tol)


@dataclass
class BoundReport:
    cut_bonds: int
    schmidt_rank: int
    rank_bound: int
    s_vn: float
    s_vn_bound: float
    s2: float

    @property
    def rank_ok(self) -> bool:
        return self.schmidt_rank <= self.rank_bound

    @property
    def entropy_ok(self) -> bool:
        return self.s_vn <= self.s_vn_bound + 1e-9

    @property
    def passed(self) -> bool:
        return self.rank_ok and self.entropy_ok

    @property
    def rank_margin(self) -> int:
        return self.rank_bound - self.schmidt_rank


def verify_bound(spec: PepsSpec, a_sites, boundary_bonds: int, state=None,
                 rank_tol: float = DEFAULT_RANK_TOL) -> BoundReport:
    """Check ``rank <= chi**cut`` and ``S <= cut * log(chi)`` for one bipartition.

    Never raises on a violation; inspect ``passed`` on the report.
    """
    if state is None:
        state = contract_to_state(build_peps(spec))
    spec_res = rdm_spectrum(state, a_sites, spec.grid_size ** 2, spec.physical_dim, rank_tol)
    chi = spec.bond_dim
    return BoundReport(
        cut_bonds=boundary_bonds,
        schmidt_rank=spec_res.schmidt_rank,
        rank_bound=chi ** boundary_bonds,
        s_vn=spec_res.s_vn,
        s_vn_bound=boundary_bonds * math.log(chi),
        s2=spec_res.renyi[2],
    )


def sample_bipartitions(L: int, count: int, rng: np.random.Generator) -> list[list[int]]:
    """Left column, a corner site, then random nonempty proper subsets."""
    n = L * L
    masks = [[i * L for i in range(L)], [0]]
    while len(masks) < count:
        k = int(rng.integers(1, n))
        masks.append(sorted(int(s) for s in rng.choice(n, size=k, replace=False)))
    return masks[:count]
