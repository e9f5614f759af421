import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from onebitphase.numkit import (
    align_phase,
    cgls,
    dense_top_eigenvector,
    dft,
    dist_sq,
    idft,
    inner,
    phase_op,
    power_iteration,
)


def _random_complex(rng, n):
    return (rng.standard_normal(n) + 1j * rng.standard_normal(n)) * np.sqrt(0.5)


class TestInner:
    def test_worked_example(self):
        assert inner([1 + 2j, 3], [2, 1 - 1j]) == 5 - 7j

    def test_conjugate_linear_in_first_argument(self):
        rng = np.random.default_rng(0)
        a = _random_complex(rng, 6)
        x = _random_complex(rng, 6)
        alpha = 0.7 - 1.3j
        assert inner(alpha * a, x) == pytest.approx(np.conj(alpha) * inner(a, x))
        assert inner(a, alpha * x) == pytest.approx(alpha * inner(a, x))

    def test_self_inner_is_squared_norm(self):
        rng = np.random.default_rng(1)
        a = _random_complex(rng, 9)
        assert inner(a, a) == pytest.approx(np.linalg.norm(a) ** 2)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            inner([1.0, 2.0], [1.0, 2.0, 3.0])

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            inner([np.nan, 1.0], [1.0, 2.0])


class TestPhaseOp:
    def test_worked_example(self):
        out = phase_op(np.array([3 + 4j]))
        assert out[0] == pytest.approx(0.6 + 0.8j)

    def test_zero_maps_to_one(self):
        out = phase_op(np.array([0.0, 1e-320, 2.0]))
        assert out[0] == 1.0 + 0.0j
        assert out[1] == 1.0 + 0.0j
        assert out[2] == 1.0 + 0.0j

    @given(
        st.complex_numbers(
            min_magnitude=1e-200, max_magnitude=1e200, allow_nan=False
        )
    )
    def test_unit_modulus(self, z):
        assert abs(phase_op(np.array([z]))[0]) == pytest.approx(1.0)

    def test_recomposition(self):
        rng = np.random.default_rng(2)
        z = _random_complex(rng, 20)
        np.testing.assert_allclose(phase_op(z) * np.abs(z), z, atol=1e-12)


class TestPowerIteration:
    def test_diagonal_example(self):
        mat = np.diag([3.0, 1.0]).astype(complex)
        eigval, vec, iters = power_iteration(lambda r: mat @ r, 2, tol=1e-10, seed=0)
        assert eigval == pytest.approx(3.0, abs=1e-6)
        assert abs(vec[0]) == pytest.approx(1.0, abs=1e-6)
        assert iters >= 1

    def test_rank_one(self):
        rng = np.random.default_rng(3)
        a = _random_complex(rng, 7)

        def matvec(r):
            return a * np.vdot(a, r)

        eigval, vec, _ = power_iteration(matvec, 7, tol=1e-12, seed=1)
        assert eigval == pytest.approx(np.linalg.norm(a) ** 2, rel=1e-8)
        assert dist_sq(vec, a) < 1e-12

    def test_negative_dominant_eigenvalue_still_converges(self):
        mat = np.diag([-3.0, 1.0]).astype(complex)
        eigval, vec, _ = power_iteration(lambda r: mat @ r, 2, tol=1e-10, seed=0)
        # sign-alternating iterates are caught by the +/- stopping rule
        assert eigval == pytest.approx(3.0, abs=1e-6)
        assert abs(vec[0]) == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_matches_dense_oracle(self, seed):
        rng = np.random.default_rng(seed)
        basis, _ = np.linalg.qr(_random_complex(rng, 64).reshape(8, 8))
        eigs = np.array([1.0, 0.7, 0.5, 0.4, 0.3, 0.2, 0.1, 0.05])
        mat = (basis * eigs) @ basis.conj().T
        eigval, vec, _ = power_iteration(lambda r: mat @ r, 8, tol=1e-12, seed=seed)
        w, v = np.linalg.eigh(mat)
        assert eigval == pytest.approx(w[-1], rel=1e-8)
        assert dist_sq(vec, v[:, -1]) < 1e-10

    @pytest.mark.parametrize("seed", [5, 6, 7])
    def test_residual_bound_on_gapped_psd(self, seed):
        rng = np.random.default_rng(seed)
        n = 12
        basis, _ = np.linalg.qr(_random_complex(rng, n * n).reshape(n, n))
        eigs = np.concatenate([[1.0], rng.uniform(0.0, 0.9, n - 1)])
        mat = (basis * eigs) @ basis.conj().T
        tol = 1e-8
        eigval, vec, _ = power_iteration(lambda r: mat @ r, n, tol=tol, seed=seed)
        residual = np.linalg.norm(mat @ vec - eigval * vec)
        assert residual <= 10 * tol * max(eigval, 1.0)

    def test_non_finite_matvec_raises(self):
        def matvec(r):
            return r * np.nan

        with pytest.raises(RuntimeError):
            power_iteration(matvec, 3, seed=0)

    def test_zero_matvec_raises_after_restarts(self):
        with pytest.raises(RuntimeError):
            power_iteration(lambda r: np.zeros_like(r), 3, seed=0)

    def test_max_iters_bounds_work(self):
        mat = np.diag([1.0, 0.999]).astype(complex)
        _, _, iters = power_iteration(lambda r: mat @ r, 2, tol=0.0, max_iters=17, seed=0)
        assert iters == 17


class TestCgls:
    def test_overdetermined_example(self):
        rows = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, -1.0]])
        rhs = np.array([1.0, 1.0, 2.0, 0.0], dtype=complex)
        x, info = cgls(lambda v: rows @ v, lambda y: rows.T @ y, rhs)
        assert info == 0
        np.testing.assert_allclose(x, [1.0, 1.0], atol=1e-10)

    def test_identity_system(self):
        rhs = np.array([1.0 + 2j, -3.0], dtype=complex)
        x, info = cgls(lambda v: v, lambda y: y, rhs)
        assert info == 0
        np.testing.assert_allclose(x, rhs, atol=1e-12)

    @pytest.mark.parametrize("seed", [0, 1])
    def test_full_rank_square_system_exact(self, seed):
        rng = np.random.default_rng(seed)
        n = 10
        mat = _random_complex(rng, n * n).reshape(n, n) + 2.0 * np.eye(n)
        x_true = _random_complex(rng, n)
        rhs = mat @ x_true
        x, info = cgls(lambda v: mat @ v, lambda y: mat.conj().T @ y, rhs, tol=1e-13)
        assert info == 0
        np.testing.assert_allclose(x, x_true, atol=1e-7)

    def test_warm_start_at_solution_converges_immediately(self):
        rows = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, -1.0]])
        rhs = np.array([1.0, 1.0, 2.0, 0.0], dtype=complex)
        x, info = cgls(
            lambda v: rows @ v,
            lambda y: rows.T @ y,
            rhs,
            x0=np.array([1.0, 1.0], dtype=complex),
        )
        assert info == 0
        np.testing.assert_allclose(x, [1.0, 1.0], atol=1e-12)

    def test_iteration_cap_sets_warning_flag(self):
        rng = np.random.default_rng(4)
        mat = _random_complex(rng, 400).reshape(20, 20) + 2.0 * np.eye(20)
        rhs = _random_complex(rng, 20)
        x, info = cgls(
            lambda v: mat @ v, lambda y: mat.conj().T @ y, rhs, tol=1e-14, max_iters=1
        )
        assert info == 1
        assert np.all(np.isfinite(x))

    def test_objective_never_increases_across_iterations(self):
        rng = np.random.default_rng(5)
        rows = _random_complex(rng, 30 * 6).reshape(30, 6)
        rhs = _random_complex(rng, 30)
        objectives = []
        for iters in range(1, 10):
            x, _ = cgls(
                lambda v: rows @ v,
                lambda y: rows.conj().T @ y,
                rhs,
                tol=0.0,
                max_iters=iters,
            )
            objectives.append(np.linalg.norm(rows @ x - rhs) ** 2)
        assert all(b <= a + 1e-12 for a, b in zip(objectives, objectives[1:]))


class TestDft:
    @pytest.mark.parametrize("n", [2, 4, 8, 16, 64, 256, 1024])
    def test_round_trip_and_parseval(self, n):
        rng = np.random.default_rng(n)
        x = _random_complex(rng, n)
        y = dft(x)
        np.testing.assert_allclose(idft(y), x, atol=1e-10)
        assert np.linalg.norm(y) == pytest.approx(np.linalg.norm(x), abs=1e-10)

    def test_unitary_impulse(self):
        out = dft(np.array([1.0, 0.0, 0.0, 0.0], dtype=complex))
        np.testing.assert_allclose(out, 0.5 * np.ones(4), atol=1e-12)


class TestDenseTopEigenvector:
    def test_diagonal(self):
        eigval, vec = dense_top_eigenvector(np.diag([1.0, 2.0, 3.0]).astype(complex))
        assert eigval == pytest.approx(3.0)
        assert abs(vec[2]) == pytest.approx(1.0)

    def test_algebraically_largest_not_largest_magnitude(self):
        eigval, vec = dense_top_eigenvector(np.diag([-5.0, 1.0]).astype(complex))
        assert eigval == pytest.approx(1.0)
        assert abs(vec[1]) == pytest.approx(1.0)

    def test_rejects_non_hermitian(self):
        mat = np.array([[1.0, 1e-6], [0.0, 1.0]], dtype=complex)
        with pytest.raises(ValueError):
            dense_top_eigenvector(mat)

    def test_rejects_oversized(self):
        with pytest.raises(ValueError):
            dense_top_eigenvector(np.eye(513, dtype=complex))


class TestDistSq:
    def test_self_and_phase(self):
        rng = np.random.default_rng(6)
        x = _random_complex(rng, 5)
        assert dist_sq(x, x) == 0.0
        assert dist_sq(np.exp(1j * 0.8) * x, x) == pytest.approx(0.0, abs=1e-14)

    def test_orthogonal(self):
        assert dist_sq([1.0, 0.0], [0.0, 1.0]) == pytest.approx(1.0)

    def test_scale_invariance(self):
        rng = np.random.default_rng(7)
        x = _random_complex(rng, 5)
        x0 = _random_complex(rng, 5)
        assert dist_sq(3.7 * x, x0) == pytest.approx(dist_sq(x, x0), abs=1e-14)

    def test_zero_vector_rejected(self):
        with pytest.raises(ValueError):
            dist_sq([0.0, 0.0], [1.0, 0.0])

    @given(st.integers(min_value=0, max_value=2**32 - 1))
    @settings(max_examples=25, deadline=None)
    def test_range(self, seed):
        rng = np.random.default_rng(seed)
        x = _random_complex(rng, 4)
        x0 = _random_complex(rng, 4)
        val = dist_sq(x, x0)
        assert 0.0 <= val <= 1.0


class TestAlignPhase:
    def test_pure_rotation_recovered(self):
        rng = np.random.default_rng(8)
        x0 = _random_complex(rng, 6)
        np.testing.assert_allclose(align_phase(1j * x0, x0), x0, atol=1e-12)

    def test_minimizes_over_phase_grid(self):
        rng = np.random.default_rng(9)
        x = _random_complex(rng, 6)
        x0 = _random_complex(rng, 6)
        aligned = np.linalg.norm(align_phase(x, x0) - x0)
        grid = np.linspace(0.0, 2 * np.pi, 100, endpoint=False)
        best = min(np.linalg.norm(x * np.exp(1j * t) - x0) for t in grid)
        assert aligned <= best + 1e-9

    def test_orthogonal_rejected(self):
        with pytest.raises(ValueError):
            align_phase([1.0, 0.0], [0.0, 1.0])
