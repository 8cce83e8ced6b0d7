import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qsnr import qcore
from qsnr.errors import DimensionMismatchError, NotAStateError, ValidationError

seeds = st.integers(0, 2**32 - 1)
dims = st.integers(2, 8)


def frob(m):
    return float(np.linalg.norm(m))


class TestEigHermitian:
    def test_diagonal_sorted(self):
        sd = qcore.eig_hermitian(np.diag([3.0, 1.0, 2.0]))
        np.testing.assert_allclose(sd.eigenvalues, [1, 2, 3])

    def test_pauli_x(self):
        sd = qcore.eig_hermitian(qcore.SIGMA_X)
        np.testing.assert_allclose(sd.eigenvalues, [-1, 1], atol=1e-15)
        r = 1 / np.sqrt(2)
        np.testing.assert_allclose(sd.eigenvectors[:, 0], [r, -r], atol=1e-15)
        np.testing.assert_allclose(sd.eigenvectors[:, 1], [r, r], atol=1e-15)

    def test_random_reconstruction_seed7(self):
        h = qcore.random_hermitian(6, 7)
        sd = qcore.eig_hermitian(h)
        assert frob(sd.reconstruct() - h) < 1e-10

    def test_degenerate_basis_is_coordinate_aligned(self):
        # identity rotated by a unitary is still identity: basis must be e_i
        sd = qcore.eig_hermitian(np.eye(3))
        np.testing.assert_allclose(sd.eigenvectors, np.eye(3))
        # doubly degenerate block spanned by e_0 and e_2
        sd = qcore.eig_hermitian(np.diag([1.0, 2.0, 1.0]))
        np.testing.assert_allclose(np.abs(sd.eigenvectors[:, 0]), [1, 0, 0], atol=1e-12)
        np.testing.assert_allclose(np.abs(sd.eigenvectors[:, 1]), [0, 0, 1], atol=1e-12)

    def test_degenerate_deterministic_under_input_rotation(self):
        u = qcore.random_unitary(4, 3)
        h = u @ np.diag([0.0, 0.0, 1.0, 1.0]) @ u.conj().T
        a = qcore.eig_hermitian(h)
        b = qcore.eig_hermitian(h.copy())
        np.testing.assert_array_equal(a.eigenvectors, b.eigenvectors)
        assert frob(a.reconstruct() - h) < 1e-10

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValidationError):
            qcore.eig_hermitian(np.array([[0, 1], [0, 0]]))

    @settings(max_examples=200, deadline=None)
    @given(dims, seeds)
    def test_invariants(self, d, seed):
        h = qcore.random_hermitian(d, seed)
        sd = qcore.eig_hermitian(h)
        assert np.all(np.diff(sd.eigenvalues) >= 0)
        v = sd.eigenvectors
        assert frob(v.conj().T @ v - np.eye(d)) < 1e-10
        assert frob(sd.reconstruct() - h) < 1e-10


class TestPsdSqrt:
    def test_maximally_mixed(self):
        np.testing.assert_allclose(qcore.psd_sqrt(np.eye(4) / 4), np.eye(4) / 2, atol=1e-15)

    def test_diagonal(self):
        np.testing.assert_allclose(
            qcore.psd_sqrt(np.diag([0.25, 0.75])), np.diag([0.5, np.sqrt(3) / 2]), atol=1e-15
        )

    def test_rank_deficient_seed3(self):
        rho = qcore.random_density(4, 2, 3)
        s = qcore.psd_sqrt(rho)
        assert frob(s @ s - rho) < 1e-10
        assert np.linalg.eigvalsh(s)[0] > -1e-12

    def test_rejects_negative_eigenvalue(self):
        with pytest.raises(NotAStateError):
            qcore.psd_sqrt(np.diag([1.1, -0.1]))

    def test_clamps_tiny_negative(self):
        s = qcore.psd_sqrt(np.diag([1 + 5e-13, -5e-13]))
        assert np.all(np.isfinite(s))

    @settings(max_examples=200, deadline=None)
    @given(dims, seeds, st.integers(1, 8))
    def test_square_reproduces(self, d, seed, rank):
        rho = qcore.random_density(d, min(rank, d), seed)
        s = qcore.psd_sqrt(rho)
        assert frob(s @ s - rho) < 1e-10


class TestTensorAndPartialTrace:
    def test_identities(self):
        np.testing.assert_array_equal(qcore.tensor(np.eye(2), np.eye(3)), np.eye(6))

    def test_projectors(self):
        p = np.diag([1.0, 0.0])
        np.testing.assert_array_equal(qcore.tensor(p, p), np.diag([1.0, 0, 0, 0]))

    def test_index_convention(self):
        # direct index expansion: block (i, j) of A (x) B equals A[i, j] * B
        t = qcore.tensor(qcore.SIGMA_X, qcore.SIGMA_Z)
        expected = np.zeros((4, 4), dtype=complex)
        for i in range(2):
            for j in range(2):
                expected[2 * i : 2 * i + 2, 2 * j : 2 * j + 2] = qcore.SIGMA_X[i, j] * qcore.SIGMA_Z
        np.testing.assert_array_equal(t, expected)
        z = np.zeros((2, 2))
        np.testing.assert_array_equal(t, np.block([[z, qcore.SIGMA_Z], [qcore.SIGMA_Z, z]]))

    def test_product_state(self):
        ra, rb = qcore.random_density(3, 3, 1), qcore.random_density(2, 2, 2)
        np.testing.assert_allclose(qcore.partial_trace(qcore.tensor(ra, rb), 3, 2, "A"), ra, atol=1e-12)
        np.testing.assert_allclose(qcore.partial_trace(qcore.tensor(ra, rb), 3, 2, "B"), rb, atol=1e-12)

    def test_bell_state(self):
        rho = qcore.ket_to_density([1, 0, 0, 1])
        np.testing.assert_allclose(qcore.partial_trace(rho, 2, 2, "A"), np.eye(2) / 2, atol=1e-15)

    def test_random_keep_b_seed9(self):
        rho = qcore.random_density(12, 12, 9)
        red = qcore.partial_trace(rho, 3, 4, "B")
        assert red.shape == (4, 4)
        assert abs(np.trace(red) - np.trace(rho)) < 1e-12
        assert np.linalg.eigvalsh(red)[0] > -1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            qcore.partial_trace(np.eye(5), 2, 2)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(1, 4), st.integers(1, 4), seeds)
    def test_product_roundtrip(self, da, db, seed):
        ra = qcore.random_density(da, da, seed)
        rb = qcore.random_density(db, db, seed + 1)
        red = qcore.partial_trace(qcore.tensor(ra, rb), da, db, "A")
        assert np.max(np.abs(red - ra)) < 1e-12


class TestExpectationAndCommutator:
    def test_identity(self):
        assert qcore.expectation(np.eye(3), qcore.random_density(3, 2, 0)) == pytest.approx(1.0, abs=1e-12)

    def test_three_level_state(self, three_level_triple):
        rho1, _, a = three_level_triple
        assert qcore.expectation(a, rho1) == pytest.approx(-1 / 6, abs=1e-15)

    def test_spectral_route_seed5(self):
        rho = qcore.random_density(5, 5, 5)
        a = qcore.random_hermitian(5, 5)
        sd = qcore.eig_hermitian(a)
        spectral = sum(
            w * np.real(v.conj() @ rho @ v) for w, v in zip(sd.eigenvalues, sd.eigenvectors.T)
        )
        assert qcore.expectation(a, rho) == pytest.approx(spectral, abs=1e-10)

    def test_dim_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            qcore.expectation(np.eye(2), np.eye(3) / 3)

    def test_self_commutator(self):
        a = qcore.random_hermitian(4, 1)
        np.testing.assert_allclose(qcore.commutator(a, a), 0, atol=1e-13)

    def test_pauli(self):
        np.testing.assert_array_equal(qcore.commutator(qcore.SIGMA_X, qcore.SIGMA_Z), -2j * qcore.SIGMA_Y)

    def test_anti_hermitian_seed2(self):
        c = qcore.commutator(qcore.random_hermitian(4, 2), qcore.random_hermitian(4, 3))
        assert np.max(np.abs(c + c.conj().T)) < 1e-12


class TestSampling:
    def test_dim_one(self):
        np.testing.assert_array_equal(qcore.random_density(1, 1, 0), [[1.0]])
        u = qcore.random_unitary(1, 0)
        assert abs(abs(u[0, 0]) - 1) < 1e-15

    def test_pure_purity(self):
        rho = qcore.random_density(4, 1, 1)
        assert np.real(np.trace(rho @ rho)) == pytest.approx(1.0, abs=1e-10)

    def test_determinism(self):
        np.testing.assert_array_equal(qcore.random_density(3, 3, 1), qcore.random_density(3, 3, 1))
        np.testing.assert_array_equal(qcore.random_unitary(5, 4), qcore.random_unitary(5, 4))

    def test_unitarity_seed4(self):
        u = qcore.random_unitary(5, 4)
        assert frob(u @ u.conj().T - np.eye(5)) < 1e-10

    def test_rank_out_of_range(self):
        with pytest.raises(ValidationError):
            qcore.random_density(3, 4, 0)
        with pytest.raises(ValidationError):
            qcore.random_density(3, 0, 0)

    def test_requested_rank(self):
        for rank in range(1, 6):
            w = np.linalg.eigvalsh(qcore.random_density(5, rank, rank))
            assert np.sum(w > 1e-10) == rank

    def test_residuals_on_1000_instances(self):
        for i in range(1000):
            d = 2 + i % 7
            rho = qcore.random_density(d, 1 + i % d, i)
            assert qcore.hermiticity_residual(rho) <= 1e-12
            assert abs(np.trace(rho) - 1) <= 1e-12
            assert np.linalg.eigvalsh(rho)[0] >= -1e-12
            u = qcore.random_unitary(d, i)
            assert frob(u @ u.conj().T - np.eye(d)) < 1e-10
            h = qcore.random_hermitian(d, i)
            assert frob(qcore.eig_hermitian(h).reconstruct() - h) < 1e-10

    def test_haar_first_moment(self):
        # E|U_00|^2 = 1/d for Haar unitaries
        d = 3
        vals = [abs(qcore.random_unitary(d, s)[0, 0]) ** 2 for s in range(3000)]
        assert np.mean(vals) == pytest.approx(1 / d, abs=0.02)


class TestValidation:
    def test_not_unit_trace(self):
        with pytest.raises(NotAStateError):
            qcore.as_density(np.eye(2))

    def test_not_hermitian(self):
        with pytest.raises(NotAStateError):
            qcore.as_density(np.array([[0.5, 0.1], [0.0, 0.5]]))

    def test_read_only(self):
        rho = qcore.as_density(np.eye(2) / 2)
        with pytest.raises(ValueError):
            rho[0, 0] = 1
