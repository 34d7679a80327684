"""Tests for the discretization: mesh, operators, fields, CG and the eigen solvers."""

import math

import numpy as np
import pytest
import scipy.linalg
import scipy.sparse

from trisolve.discretization import (
    Field,
    build_mesh,
    cg_solve,
    conjugate_gradient,
    constant_field,
    first_eigenpair,
    l2_norm,
    lowest_eigenvalue,
    mass,
    read_field_csv,
    smallest_eigenpair,
    stiffness,
    write_field_csv,
)
from trisolve.exceptions import ConvergenceError


# ---------------------------------------------------------------------------
# Mesh
# ---------------------------------------------------------------------------

class TestBuildMesh:
    def test_interval(self):
        mesh = build_mesh(1, 4, 1.0)
        assert mesh.interior_count == 3
        assert mesh.h == (0.25,)
        assert mesh.measure == 1.0
        np.testing.assert_allclose(mesh.node_coords.ravel(), [0.25, 0.5, 0.75])

    def test_square(self):
        mesh = build_mesh(2, 3, (1.0, 1.0))
        assert mesh.interior_count == 4
        expected = [(i / 3, j / 3) for i in (1, 2) for j in (1, 2)]
        np.testing.assert_allclose(mesh.node_coords, expected)

    def test_rectangle_measure(self):
        mesh = build_mesh(2, 5, (2.0, 0.5))
        assert mesh.measure == pytest.approx(1.0)
        assert mesh.h == (0.4, 0.1)

    def test_degenerate_mesh_rejected(self):
        with pytest.raises(ValueError, match="cells_per_side"):
            build_mesh(1, 1, 1.0)

    def test_bad_dimension_rejected(self):
        with pytest.raises(ValueError, match="dim"):
            build_mesh(3, 4, 1.0)

    def test_nonpositive_length_rejected(self):
        with pytest.raises(ValueError, match="positive"):
            build_mesh(1, 4, 0.0)

    def test_equal_meshes_hash_alike(self):
        assert build_mesh(1, 8, 1.0) == build_mesh(1, 8, (1.0,))
        assert hash(build_mesh(1, 8, 1.0)) == hash(build_mesh(1, 8, 1.0))


# ---------------------------------------------------------------------------
# Operators
# ---------------------------------------------------------------------------

class TestOperators:
    def test_stiffness_1d(self, mesh4):
        expected = np.array([[8.0, -4.0, 0.0], [-4.0, 8.0, -4.0], [0.0, -4.0, 8.0]])
        np.testing.assert_allclose(stiffness(mesh4).matrix.toarray(), expected)

    def test_stiffness_diagonal_positive(self):
        A = stiffness(build_mesh(2, 6, 1.0))
        e1 = np.zeros(A.dimension)
        e1[0] = 1.0
        assert A.quadratic(e1) > 0

    def test_stiffness_symmetric_2d(self):
        A = stiffness(build_mesh(2, 7, (1.0, 2.0))).matrix
        assert abs(A - A.T).max() == 0.0

    def test_rayleigh_quotient_of_sine(self, mesh4):
        v = np.sin(math.pi * mesh4.node_coords.ravel())
        ratio = stiffness(mesh4).quadratic(v) / mass(mesh4).quadratic(v)
        assert ratio == pytest.approx(32 * (1 - math.cos(math.pi / 4)), rel=1e-12)

    def test_mass_1d(self, mesh4):
        np.testing.assert_allclose(mass(mesh4).diagonal, [0.25, 0.25, 0.25])

    def test_mass_2d(self):
        np.testing.assert_allclose(mass(build_mesh(2, 3, 1.0)).diagonal, [1 / 9] * 4)

    def test_l2_of_one_close_to_measure(self):
        mesh = build_mesh(1, 1000, 1.0)
        norm_sq = l2_norm(np.ones(mesh.interior_count), mass(mesh).diagonal) ** 2
        assert abs(norm_sq - mesh.measure) <= 2 * mesh.h[0]

    def test_energy_is_edge_sum_1d(self):
        mesh = build_mesh(1, 50, 2.0)
        h = mesh.h[0]
        v = np.random.default_rng(3).standard_normal(mesh.interior_count)
        padded = np.concatenate([[0.0], v, [0.0]])
        edge_sum = np.sum(np.diff(padded) ** 2) / h
        assert stiffness(mesh).quadratic(v) == pytest.approx(edge_sum, rel=1e-12)


# ---------------------------------------------------------------------------
# Fields
# ---------------------------------------------------------------------------

class TestField:
    def test_shape_checked(self, mesh4):
        with pytest.raises(ValueError, match="shape"):
            Field(np.zeros(4), mesh4)

    def test_non_finite_rejected(self, mesh4):
        with pytest.raises(ValueError, match="finite"):
            Field([0.0, np.nan, 0.0], mesh4)

    def test_values_read_only(self, mesh4):
        u = constant_field(mesh4, 2.0)
        with pytest.raises(ValueError):
            u.values[0] = 1.0

    def test_csv_round_trip(self, tmp_path):
        mesh = build_mesh(2, 4, (1.0, 2.0))
        u = Field(np.arange(mesh.interior_count, dtype=float) / 7.0, mesh)
        path = write_field_csv(u, tmp_path / "u.csv")
        assert path.read_text().splitlines()[0] == "x,y,u"
        np.testing.assert_array_equal(read_field_csv(path, mesh).values, u.values)

    def test_csv_mesh_mismatch(self, tmp_path, mesh4):
        path = write_field_csv(constant_field(mesh4, 1.0), tmp_path / "u.csv")
        with pytest.raises(ValueError, match="expected"):
            read_field_csv(path, build_mesh(1, 5, 1.0))


# ---------------------------------------------------------------------------
# Conjugate gradients
# ---------------------------------------------------------------------------

class TestConjugateGradient:
    def test_discrete_poisson_is_exact_for_quadratics(self, mesh4):
        b = mass(mesh4).diagonal * np.ones(3)
        solution = cg_solve(stiffness(mesh4), b)
        assert solution.field.values[1] == pytest.approx(0.125, abs=1e-13)

    def test_zero_rhs(self, mesh4):
        solution = cg_solve(stiffness(mesh4), np.zeros(3))
        np.testing.assert_array_equal(solution.field.values, 0.0)
        assert solution.iterations == 0

    def test_scaled_identity_converges_in_one_step(self):
        x, iterations, residual = conjugate_gradient(lambda v: 3.0 * v, np.arange(1.0, 6.0), tol=1e-12)
        assert iterations == 1
        np.testing.assert_allclose(x, np.arange(1.0, 6.0) / 3.0)
        assert residual <= 1e-12 * np.linalg.norm(np.arange(1.0, 6.0))

    def test_failure_carries_best_iterate(self):
        A = stiffness(build_mesh(1, 200, 1.0))
        with pytest.raises(ConvergenceError) as excinfo:
            conjugate_gradient(A.apply, np.ones(199), tol=1e-14, max_iter=3)
        assert excinfo.value.iterate is not None
        assert excinfo.value.iterate.shape == (199,)
        assert np.isfinite(excinfo.value.residual_norm)

    def test_nonpositive_tol_rejected(self):
        with pytest.raises(ValueError):
            conjugate_gradient(lambda v: v, np.ones(2), tol=0.0)

    def test_tolerance_below_round_off_returns_stalled_iterate(self):
        mesh = build_mesh(1, 200, 1.0)
        b = mass(mesh).diagonal * np.ones(mesh.interior_count)
        x, _, residual = conjugate_gradient(stiffness(mesh).apply, b, tol=1e-13)
        nodes = mesh.node_coords.ravel()
        np.testing.assert_allclose(x, 0.5 * nodes * (1.0 - nodes), atol=1e-8)
        assert residual <= 1e-9 * np.linalg.norm(b)


# ---------------------------------------------------------------------------
# Eigen solvers
# ---------------------------------------------------------------------------

class TestSmallestEigenpair:
    def test_closed_form_on_coarse_mesh(self, mesh4):
        pair = first_eigenpair(mesh4)
        assert pair.value == pytest.approx(32 * (1 - math.cos(math.pi / 4)), rel=1e-8)

    def test_matches_dense_eigensolve(self):
        mesh = build_mesh(2, 8, (1.0, 1.5))
        A = stiffness(mesh).matrix.toarray()
        M = np.diag(mass(mesh).diagonal)
        dense = scipy.linalg.eigh(A, M, eigvals_only=True)[0]
        assert first_eigenpair(mesh).value == pytest.approx(dense, rel=1e-8)

    def test_normalized_and_positive(self, mesh64):
        pair = first_eigenpair(mesh64)
        m = mass(mesh64).diagonal
        assert l2_norm(pair.vector.values, m) == pytest.approx(1.0, abs=1e-12)
        assert np.all(pair.vector.values > 0)
        assert pair.residual_norm <= 1e-8

    def test_interval_converges_to_pi_squared(self):
        pair = first_eigenpair(build_mesh(1, 1024, 1.0))
        assert pair.value == pytest.approx(math.pi**2, rel=1e-3)
        assert pair.residual_norm <= 1e-8

    def test_reference_resolution(self):
        pair = first_eigenpair(build_mesh(1, 200, 1.0))
        h = 1.0 / 200
        assert pair.value == pytest.approx(4.0 / h**2 * math.sin(math.pi * h / 2) ** 2, rel=1e-8)

    def test_square_converges_to_two_pi_squared(self):
        pair = first_eigenpair(build_mesh(2, 64, 1.0))
        assert pair.value == pytest.approx(2 * math.pi**2, rel=1e-2)

    def test_second_order_convergence(self):
        errors = [abs(first_eigenpair(build_mesh(1, n, 1.0)).value - math.pi**2) for n in (32, 64, 128)]
        assert errors[0] / errors[1] == pytest.approx(4.0, rel=0.05)
        assert errors[1] / errors[2] == pytest.approx(4.0, rel=0.05)

    def test_generic_operators(self, mesh4):
        pair = smallest_eigenpair(stiffness(mesh4), mass(mesh4), tol=1e-10)
        assert pair.iterations >= 1
        assert pair.residual_norm <= 1e-10


class TestLowestEigenvalue:
    def test_indefinite_matrix(self):
        mesh = build_mesh(1, 32, 1.0)
        A = stiffness(mesh).matrix
        m = mass(mesh).diagonal
        H = A.toarray() - 30.0 * np.diag(m)
        dense = scipy.linalg.eigh(H, np.diag(m), eigvals_only=True)[0]
        mu, vec, _ = lowest_eigenvalue(A - 30.0 * scipy.sparse.diags(m), m)
        assert dense < 0
        assert mu == pytest.approx(dense, rel=1e-8)
        assert vec.shape == (31,)
