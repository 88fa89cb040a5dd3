import numpy as np
import pytest

from lodecomp.catalog import ghz_state, random_state, u_state, w_state
from lodecomp.spectral import (
    cluster_eigenvalues,
    fix_phases,
    local_spectrum,
    schmidt_decompose,
)
from lodecomp.tensor import StateTensor

# eigenvalues of [[2, 1], [1, 1]]/3, the reduced state of (|00>+|01>+|10>)/sqrt(3)
THREE_TERM_SCHMIDT_SQ = ((3 + np.sqrt(5)) / 6, (3 - np.sqrt(5)) / 6)


class TestClustering:
    def test_distinct_values_stay_apart(self):
        assert cluster_eigenvalues([0.5, 0.3, 0.2], 1e-8) == [[0], [1], [2]]

    def test_close_values_merge(self):
        got = cluster_eigenvalues([0.5, 0.25 + 1e-10, 0.25], 1e-8)
        assert got == [[0], [1, 2]]

    def test_chain_merges_transitively(self):
        # gaps each below threshold chain into one cluster
        got = cluster_eigenvalues([1.0, 1.0 - 1e-9, 1.0 - 2e-9], 1e-8)
        assert got == [[0, 1, 2]]

    def test_requires_descending(self):
        with pytest.raises(ValueError):
            cluster_eigenvalues([0.2, 0.5], 1e-8)

    def test_boundary_gap(self):
        # a gap exactly at t_deg merges; just above stays split
        assert len(cluster_eigenvalues([0.5, 0.5 - 1e-8], 1e-8)) == 1
        assert len(cluster_eigenvalues([0.5, 0.5 - 1.1e-8], 1e-8)) == 2


class TestFixPhases:
    def test_largest_entry_real_positive(self):
        cols = np.array([[1j, 0.0], [0.0, -1.0]])
        fixed = fix_phases(cols)
        assert fixed[0, 0] == pytest.approx(1.0)
        assert fixed[1, 1] == pytest.approx(1.0)

    def test_idempotent(self):
        rng = np.random.default_rng(2)
        cols = rng.standard_normal((4, 3)) + 1j * rng.standard_normal((4, 3))
        once = fix_phases(cols)
        assert np.allclose(fix_phases(once), once)

    def test_preserves_span(self):
        rng = np.random.default_rng(3)
        cols, _ = np.linalg.qr(rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2)))
        fixed = fix_phases(cols)
        assert np.allclose(np.abs(fixed.conj().T @ cols), np.eye(2), atol=1e-12)


class TestLocalSpectrum:
    def test_w_state_spectrum(self):
        spec = local_spectrum(w_state(), 0)
        assert np.allclose(spec.eigenvalues, [2 / 3, 1 / 3])
        assert spec.support_rank == 2
        assert not spec.is_support_degenerate

    def test_descending(self):
        rng = np.random.default_rng(5)
        state = random_state((3, 3, 3), seed=5)
        spec = local_spectrum(state, 1)
        assert np.all(np.diff(spec.eigenvalues) <= 1e-15)

    def test_support_rank_deficient(self):
        # the third subsystem of |U> is pure
        spec = local_spectrum(u_state(), 2)
        assert spec.support_rank == 1
        assert spec.support_basis.shape == (2, 1)

    def test_ghz_degenerate(self):
        spec = local_spectrum(ghz_state(), 0)
        assert spec.is_support_degenerate
        assert np.allclose(spec.eigenvalues, [0.5, 0.5])

    def test_eigenvectors_diagonalize(self):
        state = random_state((2, 4, 2), seed=9)
        spec = local_spectrum(state, 1)
        from lodecomp.tensor import partial_trace

        rho = partial_trace(state, [1]).matrix
        recon = spec.eigenvectors @ np.diag(spec.eigenvalues) @ spec.eigenvectors.conj().T
        assert np.allclose(recon, rho, atol=1e-12)


class TestSchmidt:
    def test_bell_degenerate(self):
        bell = StateTensor((2, 2), np.array([1, 0, 0, 1.0]))
        sd = schmidt_decompose(bell, [0])
        assert sd.rank == 2
        assert sd.degenerate
        assert np.allclose(sd.coefficients, [1 / np.sqrt(2)] * 2)

    def test_three_term_coefficients(self):
        state = StateTensor((2, 2), np.array([1, 1, 1, 0.0]))
        sd = schmidt_decompose(state, [0])
        assert np.allclose(np.sort(sd.coefficients**2)[::-1], THREE_TERM_SCHMIDT_SQ)
        assert not sd.degenerate

    def test_reconstruct(self):
        state = random_state((2, 3, 2), seed=11)
        sd = schmidt_decompose(state, [1])
        assert np.allclose(sd.reconstruct().amps, state.amps, atol=1e-12)

    def test_multi_subsystem_cut(self):
        state = random_state((2, 2, 2, 2), seed=12)
        sd = schmidt_decompose(state, [0, 2])
        assert np.allclose(sd.reconstruct().amps, state.amps, atol=1e-12)
        assert abs(float(np.sum(sd.coefficients**2)) - 1.0) < 1e-12

    def test_rank_deficient_cut(self):
        sd = schmidt_decompose(u_state(), [2])
        assert sd.rank == 1

    def test_coefficients_descending(self):
        state = random_state((4, 4), seed=13)
        sd = schmidt_decompose(state, [0])
        assert np.all(np.diff(sd.coefficients) <= 0)

    def test_cut_validation(self):
        state = random_state((2, 2, 2), seed=14)
        with pytest.raises(ValueError):
            schmidt_decompose(state, [])
        with pytest.raises(ValueError):
            schmidt_decompose(state, [0, 1, 2])
        with pytest.raises(ValueError):
            schmidt_decompose(state, [3])

    def test_deterministic_phases(self):
        state = random_state((3, 3), seed=15)
        a = schmidt_decompose(state, [0])
        b = schmidt_decompose(state, [0])
        assert np.array_equal(a.left_vectors, b.left_vectors)
        assert np.array_equal(a.right_vectors, b.right_vectors)
