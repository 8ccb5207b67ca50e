import numpy as np
import pytest
from numpy.testing import assert_allclose

from drifthodge import matcore, riccati
from drifthodge.errors import DivergentIntegral, NoUniqueLyapunovSolution, PreconditionError

from golden import (
    HURWITZ_A,
    HURWITZ_G,
    HURWITZ_P,
    HURWITZ_S,
    QUAD_A,
    QUAD_G,
    QUAD_S,
    ROTATION_G,
    SINGULAR_G,
    SINGULAR_S,
    TRI3_G,
    TRI3_P,
    random_hurwitz_pair,
)


def scalar_system_residuals(s, g, a):
    """The entrywise equations equivalent to the matrix Riccati system."""
    h = g - a @ s
    d = g.shape[0]
    out = [sum(s[i, j] * h[i, j] for i in range(d)) for j in range(d)]
    for j in range(d):
        for k in range(j + 1, d):
            out.append(sum(s[i, j] * h[i, k] + s[i, k] * h[i, j] for i in range(d)))
    out.append(np.trace(h))
    return np.array(out)


class TestSpectrumSplit:
    def test_no_pairs(self):
        split = riccati.spectrum_split(matcore.eigenvalues(TRI3_G))
        assert split.sigma0 == ()
        assert len(split.sigma1) == 3

    def test_imaginary_pair(self):
        split = riccati.spectrum_split(matcore.eigenvalues(ROTATION_G))
        assert len(split.sigma0) == 2
        assert split.sigma1 == ()

    def test_zero_eigenvalue(self):
        spec = matcore.eigenvalues(SINGULAR_G)
        split = riccati.spectrum_split(spec)
        assert len(split.sigma0) == 1
        assert abs(spec.values[split.sigma0[0]]) < 1e-10
        assert len(split.sigma1) == 1
        assert spec.values[split.sigma1[0]].real == pytest.approx(-4.0, abs=1e-10)

    def test_real_pair(self):
        spec = matcore.eigenvalues(np.diag([2.0, -2.0, 3.0]))
        split = riccati.spectrum_split(spec)
        assert len(split.sigma0) == 2
        assert len(split.sigma1) == 1
        assert abs(sum(spec.values[i] for i in split.sigma0)) < 1e-10


class TestLyapunovKron:
    def test_hurwitz_pair(self):
        p = riccati.solve_lyapunov_kron(HURWITZ_G, HURWITZ_A)
        assert_allclose(p, HURWITZ_P, atol=1e-12)

    def test_triangular_3x3(self):
        p = riccati.solve_lyapunov_kron(TRI3_G, np.eye(3))
        assert_allclose(p, TRI3_P, atol=1e-10)

    def test_trivial_diagonal(self):
        assert_allclose(riccati.solve_lyapunov_kron(-np.eye(3), np.eye(3)), np.eye(3),
                        atol=1e-13)

    def test_rotation_has_no_solution(self):
        with pytest.raises(NoUniqueLyapunovSolution) as err:
            riccati.solve_lyapunov_kron(ROTATION_G, np.eye(2))
        lam1, lam2 = err.value.pair
        assert abs(lam1 + lam2) < 1e-8

    def test_residual_contract(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            g, a = random_hurwitz_pair(rng)
            p = riccati.solve_lyapunov_kron(g, a)
            assert np.linalg.norm(g @ p + p @ g.T + 2 * a) <= 1e-10 * np.linalg.norm(a)
            assert np.allclose(p, p.T)


class TestLyapunovIntegral:
    def test_hurwitz_pair(self):
        p = riccati.solve_lyapunov_integral(HURWITZ_G, HURWITZ_A, tol=1e-13)
        assert_allclose(p, HURWITZ_P, atol=1e-11)

    def test_trivial_diagonal(self):
        assert_allclose(
            riccati.solve_lyapunov_integral(-np.eye(2), np.eye(2), tol=1e-13),
            np.eye(2), atol=1e-11,
        )

    def test_divergent_for_unstable(self):
        with pytest.raises(DivergentIntegral):
            riccati.solve_lyapunov_integral(TRI3_G, np.eye(3))


class TestClosed2x2:
    def test_rotation_gives_zero(self):
        sol = riccati.solve_riccati_2x2(ROTATION_G, np.eye(2))
        assert_allclose(sol.s, np.zeros((2, 2)), atol=1e-14)
        assert sol.eq_residual == 0.0 and sol.trace_residual == 0.0

    def test_singular_rank_one(self):
        sol = riccati.solve_riccati_2x2(SINGULAR_G, np.eye(2))
        assert_allclose(sol.s, SINGULAR_S, atol=1e-12)

    def test_hurwitz_pair(self):
        sol = riccati.solve_riccati_2x2(HURWITZ_G, HURWITZ_A)
        assert_allclose(sol.s, HURWITZ_S, atol=1e-12)
        assert sol.hurwitz and sol.s_negative_definite

    def test_quadratic_example_is_a_inv_g(self):
        sol = riccati.solve_riccati_2x2(QUAD_G, QUAD_A)
        assert_allclose(sol.s, QUAD_S, atol=1e-12)
        assert_allclose(sol.s, np.linalg.solve(QUAD_A, QUAD_G), atol=1e-12)

    def test_diagonal_rank_one_branches(self):
        sol = riccati.solve_riccati_2x2(np.diag([3.0, 0.0]), np.diag([2.0, 1.0]))
        assert_allclose(sol.s, np.diag([1.5, 0.0]), atol=1e-13)
        sol = riccati.solve_riccati_2x2(np.diag([0.0, 3.0]), np.diag([2.0, 4.0]))
        assert_allclose(sol.s, np.diag([0.0, 0.75]), atol=1e-13)

    def test_rejects_non_spd_diffusion(self):
        with pytest.raises(PreconditionError):
            riccati.solve_riccati_2x2(HURWITZ_G, np.array([[1.0, 2.0], [2.0, 1.0]]))


class TestSchurGeneral:
    def test_rotation_zero_block_only(self):
        sol = riccati.solve_riccati_general(ROTATION_G, np.eye(2))
        assert_allclose(sol.s, np.zeros((2, 2)), atol=1e-14)
        assert sol.method == "schur_general"

    def test_singular_matches_closed_form(self):
        sol = riccati.solve_riccati_general(SINGULAR_G, np.eye(2))
        assert_allclose(sol.s, SINGULAR_S, atol=1e-12)
        scale = max(1.0, np.linalg.norm(sol.s))
        assert sol.eq_residual <= 1e-10 * scale
        assert sol.trace_residual <= 1e-10 * scale

    def test_hurwitz_matches_closed_form(self):
        sol = riccati.solve_riccati_general(HURWITZ_G, HURWITZ_A)
        assert_allclose(sol.s, HURWITZ_S, atol=1e-9)

    def test_zero_trace_one_dim(self):
        sol = riccati.solve_riccati_general(np.array([[0.0]]), np.array([[2.0]]))
        assert_allclose(sol.s, [[0.0]], atol=1e-14)
        sol = riccati.solve_riccati_general(np.array([[-3.0]]), np.array([[2.0]]))
        assert_allclose(sol.s, [[-1.5]], atol=1e-13)


class TestResidual:
    def test_paper_solution_certifies(self):
        eq, tr = riccati.riccati_residual(HURWITZ_S, HURWITZ_G, HURWITZ_A)
        scale = max(1.0, np.linalg.norm(HURWITZ_S))
        assert eq <= 1e-12 * scale
        assert tr <= 1e-12 * scale

    def test_zero_s_zero_trace(self):
        eq, tr = riccati.riccati_residual(np.zeros((2, 2)), ROTATION_G, np.eye(2))
        assert eq == 0.0 and tr == 0.0

    def test_zero_s_nonzero_trace(self):
        eq, tr = riccati.riccati_residual(np.zeros((2, 2)), HURWITZ_G, HURWITZ_A)
        assert eq == 0.0
        assert tr == pytest.approx(3.0, abs=1e-14)


class TestDispatch:
    def test_auto_prefers_closed_form_in_2d(self):
        assert riccati.solve_riccati(HURWITZ_G, HURWITZ_A).method == "closed2x2"

    def test_auto_kron_above_2d(self):
        assert riccati.solve_riccati(TRI3_G, np.eye(3)).method == "kron"

    def test_auto_schur_when_sigma0_nonempty(self):
        g = np.zeros((3, 3))
        g[:2, :2] = ROTATION_G
        g[2, 2] = -1.0
        assert riccati.solve_riccati(g, np.eye(3)).method == "schur_general"

    def test_unknown_method_rejected(self):
        with pytest.raises(PreconditionError):
            riccati.solve_riccati(HURWITZ_G, HURWITZ_A, method="magic")


class TestProperties:
    def test_cross_method_agreement(self):
        rng = np.random.default_rng(2024)
        for _ in range(25):
            g, a = random_hurwitz_pair(rng)
            sols = [
                riccati.solve_riccati(g, a, method="kron"),
                riccati.solve_riccati(g, a, method="integral"),
                riccati.solve_riccati(g, a, method="schur"),
            ]
            if g.shape[0] == 2:
                sols.append(riccati.solve_riccati_2x2(g, a))
            ref = sols[0].s
            scale = np.linalg.norm(ref)
            for sol in sols[1:]:
                assert np.linalg.norm(sol.s - ref) <= 1e-7 * scale

    def test_certificates(self):
        rng = np.random.default_rng(77)
        for _ in range(20):
            g, a = random_hurwitz_pair(rng)
            for method in ("kron", "schur"):
                sol = riccati.solve_riccati(g, a, method=method)
                ns, ng, na = (np.linalg.norm(m) for m in (sol.s, g, a))
                assert sol.eq_residual <= 1e-8 * (ns * ns * na + ns * ng)
                assert sol.trace_residual <= 1e-8 * (ng + na * ns)

    def test_lyapunov_riccati_equivalence(self):
        rng = np.random.default_rng(9)
        for _ in range(20):
            g, a = random_hurwitz_pair(rng)
            p = riccati.solve_lyapunov_kron(g, a)
            s = np.linalg.inv(-p)
            eq, tr = riccati.riccati_residual(s, g, a)
            scale = max(1.0, np.linalg.norm(s) ** 2 * np.linalg.norm(a))
            assert eq <= 1e-9 * scale
            assert tr <= 1e-9 * scale

    def test_negative_definite_for_hurwitz(self):
        rng = np.random.default_rng(13)
        for _ in range(20):
            g, a = random_hurwitz_pair(rng)
            for method in ("kron", "integral", "schur"):
                sol = riccati.solve_riccati(g, a, method=method)
                assert sol.s_negative_definite
                assert np.linalg.eigvalsh(sol.s).max() < 0

    def test_scalar_system_equivalence(self):
        rng = np.random.default_rng(31)
        for _ in range(15):
            d = int(rng.integers(2, 5))
            g, a = random_hurwitz_pair(rng, d)
            s = riccati.solve_riccati(g, a, method="kron").s
            scale = max(1.0, np.linalg.norm(s) * np.linalg.norm(g - a @ s))
            assert np.abs(scalar_system_residuals(s, g, a)).max() <= 1e-10 * scale
            # conversely: a perturbed S violates both forms together
            bad = s + 0.1 * np.eye(d)
            eq, tr = riccati.riccati_residual(bad, g, a)
            assert np.abs(scalar_system_residuals(bad, g, a)).max() > 1e-6
            assert eq + tr > 1e-6
