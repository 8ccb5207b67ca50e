import numpy as np
import pytest
from numpy.testing import assert_allclose

from drifthodge import matcore
from drifthodge.errors import ConvergenceFailure, PreconditionError

from golden import ROTATION_G, SINGULAR_G, TRI3_G


class TestKronVec:
    def test_kron_identity_left(self):
        g = np.array([[0.0, 1.0], [-2.0, -3.0]])
        expected = np.array(
            [[0, 1, 0, 0], [-2, -3, 0, 0], [0, 0, 0, 1], [0, 0, -2, -3]], dtype=float
        )
        assert_allclose(matcore.kron(np.eye(2), g), expected)

    def test_kron_identity_right(self):
        g = np.array([[0.0, 1.0], [-2.0, -3.0]])
        expected = np.array(
            [[0, 0, 1, 0], [0, 0, 0, 1], [-2, 0, -3, 0], [0, -2, 0, -3]], dtype=float
        )
        assert_allclose(matcore.kron(g, np.eye(2)), expected)

    def test_kron_scalar_factor(self):
        a = np.arange(6.0).reshape(2, 3)
        assert_allclose(matcore.kron(a, np.array([[1.0]])), a)

    def test_vec_column_stacking(self):
        assert_allclose(matcore.vec(np.array([[1.0, 2.0], [3.0, 4.0]])), [1, 3, 2, 4])

    def test_vec_scaled(self):
        assert_allclose(matcore.vec(-2.0 * np.array([[2.0, 1.0], [1.0, 1.0]])),
                        [-4, -2, -2, -2])

    def test_vec_zero(self):
        assert_allclose(matcore.vec(np.zeros((3, 3))), np.zeros(9))

    def test_vec_unvec_roundtrip(self):
        rng = np.random.default_rng(0)
        x = rng.standard_normal((4, 4))
        assert_allclose(matcore.unvec(matcore.vec(x), 4, 4), x)


class TestEigenvalues:
    def test_hurwitz_spectrum(self):
        g = np.array([[0.0, 1.0], [-2.0, -3.0]])
        spec = matcore.eigenvalues(g)
        assert_allclose(sorted(spec.values.real), [-2, -1], atol=1e-12)
        assert_allclose(spec.values.imag, 0, atol=1e-12)
        assert matcore.spectral_abscissa(g) == pytest.approx(-1.0, abs=1e-12)
        assert matcore.is_hurwitz(g)

    def test_rotation_spectrum(self):
        spec = matcore.eigenvalues(ROTATION_G)
        assert_allclose(sorted(spec.values.imag), [-4, 4], atol=1e-12)
        assert_allclose(spec.values.real, 0, atol=1e-12)
        assert matcore.spectral_abscissa(ROTATION_G) == pytest.approx(0.0, abs=1e-12)
        assert not matcore.is_hurwitz(ROTATION_G)

    def test_triangular_spectrum(self):
        spec = matcore.eigenvalues(TRI3_G)
        assert_allclose(sorted(spec.values.real), [-5, -2, 1], atol=1e-12)
        assert matcore.spectral_abscissa(TRI3_G) == pytest.approx(1.0, abs=1e-12)

    def test_sorted_deterministically(self):
        spec = matcore.eigenvalues(ROTATION_G)
        assert spec.values[0].imag < spec.values[1].imag
        assert spec.is_conjugation_closed()


class TestSchur:
    def test_diagonal_input(self):
        g = np.diag([3.0, -1.0, 2.0])
        sf = matcore.real_schur(g)
        assert sf.block_sizes == (1, 1, 1)
        assert_allclose(sorted(np.diag(sf.r)), [-1, 2, 3], atol=1e-12)
        assert_allclose(sf.u @ sf.r @ sf.u.T, g, atol=1e-12)

    def test_rotation_single_block(self):
        sf = matcore.real_schur(ROTATION_G)
        assert sf.block_sizes == (2,)
        assert_allclose(sf.u @ sf.r @ sf.u.T, ROTATION_G, atol=1e-12)

    def test_random_reconstruction(self):
        rng = np.random.default_rng(5)
        g = rng.standard_normal((5, 5))
        sf = matcore.real_schur(g)
        assert np.linalg.norm(sf.u @ sf.r @ sf.u.T - g) < 1e-10 * np.linalg.norm(g)
        assert np.linalg.norm(sf.u.T @ sf.u - np.eye(5)) < matcore.EPS_ORTH

    def test_schur_eigenvalues_match(self):
        rng = np.random.default_rng(6)
        g = rng.standard_normal((6, 6))
        sf = matcore.real_schur(g)
        got = sorted(matcore.schur_eigenvalues(sf), key=lambda z: (z.real, z.imag))
        want = sorted(np.linalg.eigvals(g), key=lambda z: (z.real, z.imag))
        assert_allclose(got, want, atol=1e-8)


class TestReorderSchur:
    def test_zero_eigenvalue_to_front(self):
        sf = matcore.real_schur(SINGULAR_G)
        out, k = matcore.reorder_schur(sf, lambda lam: abs(lam) < 1e-8)
        assert k == 1
        # Verified against the hand computation U^T G U with the unit
        # eigenvector of 0 leading.
        assert_allclose(out.r, [[0.0, -3.0], [0.0, -4.0]], atol=1e-12)
        u0 = np.array([1.0, 2.0]) / np.sqrt(5.0)
        u1 = np.array([-2.0, 1.0]) / np.sqrt(5.0)
        assert min(np.linalg.norm(out.u[:, 0] - u0), np.linalg.norm(out.u[:, 0] + u0)) < 1e-12
        assert min(np.linalg.norm(out.u[:, 1] - u1), np.linalg.norm(out.u[:, 1] + u1)) < 1e-12
        assert_allclose(out.u.T @ SINGULAR_G @ out.u, out.r, atol=1e-12)

    def test_full_selection_is_noop(self):
        sf = matcore.real_schur(SINGULAR_G)
        out, k = matcore.reorder_schur(sf, lambda lam: True)
        assert k == 2
        assert_allclose(out.r, sf.r, atol=1e-12)
        assert_allclose(out.u, sf.u, atol=1e-12)

    def test_random_negative_real_part_selection(self):
        rng = np.random.default_rng(11)
        g = rng.standard_normal((4, 4))
        sf = matcore.real_schur(g)
        out, k = matcore.reorder_schur(sf, lambda lam: lam.real < 0)
        want = sorted(lam for lam in np.linalg.eigvals(g) if lam.real < 0)
        leading = out.r[:k, :k]
        got = sorted(np.linalg.eigvals(leading))
        assert len(got) == len(want)
        assert_allclose(
            np.array(got, dtype=complex), np.array(want, dtype=complex), atol=1e-8
        )
        assert np.linalg.norm(out.r[k:, :k]) <= matcore.EPS_SCHUR * np.linalg.norm(g)
        assert np.linalg.norm(out.u.T @ out.u - np.eye(4)) < matcore.EPS_ORTH

    def test_splitting_conjugate_pair_rejected(self):
        sf = matcore.real_schur(ROTATION_G)
        with pytest.raises(PreconditionError):
            matcore.reorder_schur(sf, lambda lam: lam.imag > 0)


class TestExpm:
    def test_zero(self):
        assert_allclose(matcore.expm(np.zeros((3, 3))), np.eye(3))

    def test_diagonal(self):
        assert_allclose(
            matcore.expm(np.diag([-1.0, -2.0])),
            np.diag([np.exp(-1.0), np.exp(-2.0)]),
            rtol=1e-14,
        )

    def test_rotation_against_series_oracle(self):
        theta = np.pi / 3.0
        m = np.array([[0.0, -theta], [theta, 0.0]])
        series = np.zeros((2, 2))
        term = np.eye(2)
        for k in range(1, 31):
            series += term
            term = term @ m / k
        assert_allclose(matcore.expm(m), series, atol=1e-14)
        assert_allclose(
            matcore.expm(m),
            [[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]],
            atol=1e-14,
        )

    def test_inverse_identity(self):
        rng = np.random.default_rng(2)
        m = rng.standard_normal((4, 4))
        m *= 40.0 / np.linalg.norm(m)
        prod = matcore.expm(m) @ matcore.expm(-m)
        assert np.linalg.norm(prod - np.eye(4)) <= 1e-10


class TestSqrtmSpd:
    def test_identity(self):
        assert_allclose(matcore.sqrtm_spd(np.eye(3)), np.eye(3))

    def test_diagonal(self):
        assert_allclose(matcore.sqrtm_spd(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]))

    def test_multiply_back(self):
        a = np.array([[2.0, 1.0], [1.0, 1.0]])
        r = matcore.sqrtm_spd(a)
        assert np.allclose(r, r.T)
        assert np.linalg.norm(r @ r - a) <= 1e-12 * np.linalg.norm(a)

    def test_rejects_non_spd(self):
        with pytest.raises(PreconditionError):
            matcore.sqrtm_spd(np.array([[1.0, 0.0], [0.0, -1.0]]))
        with pytest.raises(PreconditionError):
            matcore.sqrtm_spd(np.array([[1.0, 2.0], [0.0, 1.0]]))


class TestProperties:
    def test_vectorization_identity(self):
        rng = np.random.default_rng(100)
        for _ in range(30):
            d = int(rng.integers(2, 6))
            a, x, b = (rng.standard_normal((d, d)) for _ in range(3))
            lhs = matcore.vec(a @ x @ b)
            rhs = matcore.kron(b.T, a) @ matcore.vec(x)
            scale = np.linalg.norm(a) * np.linalg.norm(x) * np.linalg.norm(b)
            assert np.linalg.norm(lhs - rhs) <= 1e-12 * scale

    def test_mixed_product(self):
        rng = np.random.default_rng(101)
        for _ in range(30):
            d = int(rng.integers(2, 5))
            a, b, c, e = (rng.standard_normal((d, d)) for _ in range(4))
            lhs = matcore.kron(a, b) @ matcore.kron(c, e)
            rhs = matcore.kron(a @ c, b @ e)
            scale = max(np.linalg.norm(lhs), 1.0)
            assert np.linalg.norm(lhs - rhs) <= 1e-12 * scale

    def test_schur_invariants_random(self):
        rng = np.random.default_rng(102)
        for _ in range(30):
            d = int(rng.integers(2, 9))
            g = rng.standard_normal((d, d)) * rng.uniform(0.5, 5.0)
            sf = matcore.real_schur(g)
            ng = np.linalg.norm(g)
            assert np.linalg.norm(sf.u.T @ sf.u - np.eye(d)) <= matcore.EPS_ORTH
            assert np.linalg.norm(sf.u.T @ g @ sf.u - sf.r) <= matcore.EPS_SCHUR * ng
            # everything strictly below the declared diagonal blocks vanishes
            mask = np.tril(np.ones((d, d), dtype=bool), -1)
            i = 0
            for size in sf.block_sizes:
                if size == 2:
                    mask[i + 1, i] = False
                i += size
            assert np.abs(sf.r[mask]).max(initial=0.0) <= matcore.EPS_SCHUR * ng

    def test_abscissa_orthogonal_invariance(self):
        rng = np.random.default_rng(103)
        for _ in range(30):
            d = int(rng.integers(2, 7))
            g = rng.standard_normal((d, d))
            q, _ = np.linalg.qr(rng.standard_normal((d, d)))
            assert abs(
                matcore.spectral_abscissa(g) - matcore.spectral_abscissa(q.T @ g @ q)
            ) <= 1e-10
