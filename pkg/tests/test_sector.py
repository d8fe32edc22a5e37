import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jchbound.errors import ComplexEigenvalueBeyondTolerance
from jchbound.model import ModelParams, mode_frequencies, sector_pairs
from jchbound.oracle import sector_project_spectrum
from jchbound.realspace import coefficient_gram, physical_norms, spurious_direction
from jchbound.sector import (
    SweepError,
    assemble_sector_matrix,
    sector_sweep,
    solve_sector,
    solve_sector_matrix,
)


@pytest.mark.parametrize("n, p, dim", [(4, 1, 8), (6, 2, 14), (6, 0, 14), (5, 0, 11), (50, 1, 100)])
def test_dimension(n, p, dim):
    m = assemble_sector_matrix(ModelParams(n, 0.0, 1.0, 1.0), p)
    assert m.dimension == dim
    assert m.entries.shape == (dim, dim)


def test_matrix_is_real_and_not_symmetric():
    h = assemble_sector_matrix(ModelParams(4, 0.0, 1.0, 1.0), 1).entries
    assert h.dtype == float
    assert not np.allclose(h, h.T)


def test_gram_times_matrix_is_symmetric():
    for n, p in [(4, 1), (6, 2), (7, 3)]:
        m = assemble_sector_matrix(ModelParams(n, 0.4, 1.0, 1.3), p)
        gh = coefficient_gram(m.pair_set) @ m.entries
        np.testing.assert_allclose(gh, gh.T, atol=1e-13)


def test_pair_block_structure():
    g = 0.7
    params = ModelParams(4, 0.0, 1.0, g)
    m = assemble_sector_matrix(params, 1)
    om = mode_frequencies(params)
    blk = m.block(0, 1)
    # alpha row couples to both photon-atom amplitudes
    np.testing.assert_allclose(blk[0], [om[0] + om[1], g, g, 0.0], atol=1e-15)
    np.testing.assert_allclose(blk[3], [0.0, g, g, 0.0], atol=1e-15)
    # the beta rows carry the -2g/N collective term on every gamma column
    assert blk[1, 3] == pytest.approx(g - 2 * g / 4)
    other_gamma = m.layout.index((2, 3, "gamma"))
    assert m.entries[m.layout.index((0, 1, "beta")), other_gamma] == pytest.approx(-2 * g / 4)


def test_zero_coupling_eigenvalues_are_bare_sums():
    params = ModelParams(6, 0.3, 1.0, 0.0)
    sol = solve_sector(params, 2)
    om = mode_frequencies(params)
    expected = []
    for k, j in sector_pairs(6, 2):
        expected.append(om[k] + om[j])
        expected.extend([om[k], om[j]] if k != j else [om[k]])
        expected.append(0.0)
    np.testing.assert_allclose(sol.eigenvalues, np.sort(expected), atol=1e-12)
    assert sol.spurious_flags.sum() == 1


def test_null_direction_is_an_exact_zero_eigenvector():
    for n, p in [(4, 1), (6, 0), (9, 4)]:
        m = assemble_sector_matrix(ModelParams(n, -0.5, 1.0, 2.0), p)
        null = spurious_direction(m.pair_set)
        assert np.abs(m.entries @ null).max() < 1e-14
        assert physical_norms(null[:, None], m.pair_set)[0] < 1e-14


@pytest.mark.parametrize("n", [4, 5, 6, 8])
def test_exactly_one_spurious_vector_per_sector(n):
    params = ModelParams(n, 0.0, 1.0, 2.0)
    for p in range(n):
        sol = solve_sector(params, p)
        assert sol.spurious_flags.sum() == 1
        assert sol.physical_norms[~sol.spurious_flags].min() > 1e-3
        i = np.flatnonzero(sol.spurious_flags)[0]
        assert sol.eigenvalues[i] == 0.0


def test_eigenpairs_satisfy_the_matrix_equation():
    m = assemble_sector_matrix(ModelParams(8, 0.5, 1.0, 5.0), 3)
    sol = solve_sector_matrix(m)
    resid = m.entries @ sol.vectors - sol.vectors * sol.eigenvalues
    assert np.abs(resid).max() < 1e-10
    np.testing.assert_allclose(np.linalg.norm(sol.vectors, axis=0), 1.0)


def test_zero_tunneling_reproduces_single_site_doublet():
    g = 1.5
    params = ModelParams(4, 0.0, 0.0, g, allow_zero_tunneling=True)
    phys = np.concatenate([solve_sector(params, p).physical_eigenvalues for p in range(4)])
    for target in (-np.sqrt(2) * g, np.sqrt(2) * g):
        # one single-site doublet member per sector
        assert np.sum(np.abs(phys - target) < 1e-12) == 4
    oracle = sector_project_spectrum(params).full
    np.testing.assert_allclose(np.sort(phys), oracle, atol=1e-12)


def test_reality_tolerance_is_enforced():
    m = assemble_sector_matrix(ModelParams(4, 0.0, 1.0, 1.0), 1)
    bad = m.entries.copy()
    bad[0, 4], bad[4, 0] = 3.0, -3.0
    broken = type(m)(m.params, m.sector, m.pair_set, bad, m.layout)
    with pytest.raises(ComplexEigenvalueBeyondTolerance):
        solve_sector_matrix(broken)


@settings(max_examples=15, deadline=None)
@given(
    n=st.integers(3, 9),
    delta=st.floats(-2, 2),
    g=st.floats(0.05, 6),
    p=st.integers(0, 20),
)
def test_mirror_sectors_share_spectra(n, delta, g, p):
    params = ModelParams(n, delta, 1.0, g)
    a = solve_sector(params, p % n).physical_eigenvalues
    b = solve_sector(params, (n - p) % n).physical_eigenvalues
    np.testing.assert_allclose(a, b, atol=1e-10)


def test_sweep_preserves_order_and_matches_single_solves():
    grid = [ModelParams(6, 0.0, 1.0, g) for g in (0.5, 2.0)]
    out = sector_sweep(grid, [3, 0, 5], workers=4)
    assert [(s.params.rabi, s.sector) for s in out] == [(0.5, 3), (0.5, 0), (0.5, 5), (2.0, 3), (2.0, 0), (2.0, 5)]
    for s in out:
        ref = solve_sector(s.params, s.sector)
        np.testing.assert_array_equal(s.eigenvalues, ref.eigenvalues)


def test_sweep_edge_cases():
    assert sector_sweep([ModelParams(4, 0.0, 1.0, 1.0)], []) == []
    with pytest.raises(ValueError):
        sector_sweep([], [0])


def test_sweep_reports_failing_item():
    with pytest.raises(SweepError) as info:
        sector_sweep([ModelParams(4, 0.0, 1.0, 1.0)], [0, 9], workers=1)
    assert info.value.sector == 9


def test_solutions_are_deterministic():
    params = ModelParams(12, 0.1, 1.0, 3.0)
    a, b = solve_sector(params, 5), solve_sector(params, 5)
    np.testing.assert_array_equal(a.eigenvalues, b.eigenvalues)
    np.testing.assert_array_equal(a.vectors, b.vectors)
