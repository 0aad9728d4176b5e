import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cornerlaw.counting import grid_cut_bonds
from cornerlaw.peps import (
    PepsSpec,
    build_peps,
    contract_to_state,
    rdm_spectrum,
    sample_bipartitions,
    spectrum_from_eigenvalues,
    verify_bound,
)


def svd_spectrum(state, a_sites, n_sites, d=2):
    """Squared singular values of the A-by-B amplitude matrix."""
    a = sorted(a_sites)
    b = [s for s in range(n_sites) if s not in a]
    m = state.reshape((d,) * n_sites).transpose(a + b).reshape(d ** len(a), -1)
    return np.linalg.svd(m, compute_uv=False) ** 2


def bell_grid():
    # 1x2 grid; the shared bond carries the physical index
    left = np.zeros((2, 1, 1, 2, 1))
    right = np.zeros((2, 2, 1, 1, 1))
    for k in range(2):
        left[k, 0, 0, k, 0] = 1.0
        right[k, k, 0, 0, 0] = 1.0
    return [[left, right]]


def test_spec_validation():
    with pytest.raises(ValueError):
        PepsSpec(grid_size=5)
    with pytest.raises(ValueError):
        PepsSpec(bond_dim=0)
    PepsSpec(grid_size=4, physical_dim=2)


def test_build_is_deterministic_and_sliced():
    a = build_peps(PepsSpec(grid_size=2, seed=11))
    b = build_peps(PepsSpec(grid_size=2, seed=11))
    for ra, rb in zip(a, b):
        for ta, tb in zip(ra, rb):
            assert ta.tobytes() == tb.tobytes()
    assert [t.shape for row in a for t in row] == [
        (2, 1, 1, 2, 2), (2, 2, 1, 1, 2),
        (2, 1, 2, 2, 1), (2, 2, 2, 1, 1),
    ]


def test_contraction_matches_einsum_on_two_by_two():
    g = build_peps(PepsSpec(grid_size=2, seed=3))
    # legs: (p, left, up, right, down); h = horizontal, v = vertical bonds
    ref = np.einsum("aizhv,bhzjw,civkx,dkwjx->abcd", g[0][0], g[0][1], g[1][0], g[1][1],
                    optimize=True).reshape(-1)
    ref /= np.linalg.norm(ref)
    np.testing.assert_allclose(contract_to_state(g), ref, atol=1e-13)


def test_chi_one_is_product_state():
    spec = PepsSpec(grid_size=3, bond_dim=1, seed=5)
    grid = build_peps(spec)
    single = grid[0][0].reshape(-1)
    product = single
    for _ in range(8):
        product = np.kron(product, single)
    product /= np.linalg.norm(product)
    state = contract_to_state(grid)
    assert abs(abs(state @ product) - 1.0) < 1e-12
    res = rdm_spectrum(state, [0, 4])
    assert res.schmidt_rank == 1
    assert res.s_vn == pytest.approx(0.0, abs=1e-12)
    assert res.eigenvalues[0] == pytest.approx(1.0, abs=1e-12)


def test_bell_pair():
    state = contract_to_state(bell_grid())
    np.testing.assert_allclose(np.abs(state), [2 ** -0.5, 0, 0, 2 ** -0.5], atol=1e-15)
    res = rdm_spectrum(state, [0])
    np.testing.assert_allclose(res.eigenvalues, [0.5, 0.5], atol=1e-15)
    assert res.schmidt_rank == 2
    assert res.s_vn == pytest.approx(math.log(2), abs=1e-15)
    assert res.renyi[2] == pytest.approx(math.log(2), abs=1e-15)


def test_mismatched_bonds_rejected():
    g = build_peps(PepsSpec(grid_size=2, seed=0))
    g[0][1] = g[0][1][:, :1]
    with pytest.raises(ValueError):
        contract_to_state(g)
    zero = [[np.zeros((2, 1, 1, 1, 1))]]
    with pytest.raises(ValueError):
        contract_to_state(zero)


def test_left_column_matches_svd():
    state = contract_to_state(build_peps(PepsSpec(grid_size=3, bond_dim=2, seed=1)))
    res = rdm_spectrum(state, [0, 3, 6])
    ref = svd_spectrum(state, [0, 3, 6], 9)
    np.testing.assert_allclose(res.eigenvalues, ref, atol=1e-10)
    assert res.schmidt_rank <= 8


def test_bound_examples():
    spec = PepsSpec(grid_size=3, bond_dim=2, seed=1)
    column = verify_bound(spec, [0, 3, 6], grid_cut_bonds(3, [0, 3, 6]))
    assert column.cut_bonds == 3 and column.rank_bound == 8
    assert column.schmidt_rank <= 8 and column.s_vn <= 3 * math.log(2)
    assert column.passed
    corner = verify_bound(spec, [0], grid_cut_bonds(3, [0]))
    assert corner.cut_bonds == 2 and corner.rank_bound == 4 and corner.schmidt_rank <= 2
    flat = verify_bound(PepsSpec(grid_size=3, bond_dim=1, seed=1), [0, 3, 6], 3)
    assert flat.schmidt_rank == 1 and flat.rank_bound == 1 and flat.rank_margin == 0


def test_violation_is_reported_not_raised():
    # claiming no cut bonds forces a bound of 1, which an entangled state breaks
    report = verify_bound(PepsSpec(grid_size=2, bond_dim=2, seed=2), [0], 0)
    assert not report.rank_ok and not report.passed
    assert report.rank_margin < 0


def test_rdm_rejects_bad_subsets():
    state = contract_to_state(build_peps(PepsSpec(grid_size=2)))
    for bad in ([], [0, 1, 2, 3], [7]):
        with pytest.raises(ValueError):
            rdm_spectrum(state, bad)


def test_rank_tolerance_is_relative():
    res = spectrum_from_eigenvalues([0.5, 0.5, 1e-12, -1e-17])
    assert res.schmidt_rank == 2
    assert res.eigenvalues[0] == 0.5


def test_sample_bipartitions():
    masks = sample_bipartitions(3, 5, np.random.default_rng(0))
    assert masks[:2] == [[0, 3, 6], [0]]
    assert all(0 < len(m) < 9 for m in masks)
    assert masks == sample_bipartitions(3, 5, np.random.default_rng(0))


instances = st.tuples(st.sampled_from([2, 3, 4]), st.sampled_from([1, 2]),
                      st.integers(0, 2**63 - 1), st.integers(0, 2**32 - 1))


@settings(max_examples=25, deadline=None)
@given(instances)
def test_spectrum_invariants(case):
    L, chi, seed, pick = case
    n = L * L
    state = contract_to_state(build_peps(PepsSpec(grid_size=L, bond_dim=chi, seed=seed)))
    assert np.linalg.norm(state) == pytest.approx(1.0, abs=1e-12)
    rng = np.random.default_rng(pick)
    a = sorted(int(s) for s in rng.choice(n, size=int(rng.integers(1, n)), replace=False))
    b = [s for s in range(n) if s not in a]
    ra, rb = rdm_spectrum(state, a), rdm_spectrum(state, b)
    k = min(len(ra.eigenvalues), len(rb.eigenvalues))
    np.testing.assert_allclose(ra.eigenvalues[:k], rb.eigenvalues[:k], atol=1e-9)
    assert ra.eigenvalues.sum() == pytest.approx(1.0, abs=1e-9)
    assert ra.eigenvalues.min() >= -1e-9
    assert ra.renyi[2] <= ra.s_vn + 1e-12
    assert ra.s_vn <= math.log(ra.schmidt_rank) + 1e-9
    report = verify_bound(PepsSpec(grid_size=L, bond_dim=chi, seed=seed), a,
                          grid_cut_bonds(L, a), state=state)
    assert report.passed
