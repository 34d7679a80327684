"""Tests for the energy functionals, residuals and the saddle functional."""

import numpy as np
import pytest

from trisolve.discretization import build_mesh, cg_solve, first_eigenpair, stiffness
from trisolve.energy import (
    energy,
    energy_aux8,
    gradient_check,
    jacobian,
    jacobian_aux8,
    make_problem,
    residual,
    residual_aux8,
    saddle_gradients,
    saddle_phi,
)
from trisolve.models import ProblemKind
from trisolve.nonlinearity import constant, plus_power, scale_f_corollary2


class TestProblemConfig:
    def test_alpha_on_other_mesh_rejected(self, mesh4):
        from trisolve.discretization import constant_field

        with pytest.raises(ValueError, match="different mesh"):
            make_problem(mesh4, constant(1.0), plus_power(3), 1.0, alpha=constant_field(build_mesh(1, 5, 1.0), 0.0))

    def test_negative_lambda_rejected(self, mesh4):
        with pytest.raises(ValueError, match="non-negative"):
            make_problem(mesh4, constant(1.0), plus_power(3), -1.0)

    def test_with_alpha(self, reference_problem):
        cfg = reference_problem.with_alpha(np.full(63, -2.0))
        assert cfg.alpha.values[0] == -2.0
        assert reference_problem.alpha.values[0] == 0.0


class TestEnergy:
    def test_zero_state(self, reference_problem):
        assert energy(np.zeros(63), reference_problem) == 0.0
        assert energy_aux8(np.zeros(63), reference_problem) == 0.0

    def test_poisson_solution_has_negative_energy(self, poisson_problem):
        cfg = poisson_problem
        u = cg_solve(stiffness(cfg.mesh), cfg.m).field.values
        expected = 0.5 * u @ (cfg.A @ u) - np.sum(cfg.m * u)
        assert energy(u, cfg) == pytest.approx(expected)
        assert energy(u, cfg) < 0

    def test_nonpositive_states_only_feel_stiffness(self, mesh64):
        cfg = make_problem(mesh64, constant(1.0), plus_power(3), 30.0, alpha=0.0)
        u = -np.abs(np.random.default_rng(1).standard_normal(63))
        assert energy(u, cfg) == pytest.approx(0.5 * u @ (cfg.A @ u))
        assert energy(u, cfg) >= 0


class TestResiduals:
    def test_zero_state_gives_minus_forcing(self, mesh64):
        alpha = np.linspace(-1.0, 1.0, 63)
        cfg = make_problem(mesh64, constant(1.0), plus_power(3), 5.0, alpha=alpha)
        np.testing.assert_allclose(residual(np.zeros(63), cfg), -cfg.m * alpha)

    def test_linear_case(self, mesh64):
        cfg = make_problem(mesh64, constant(1.0), plus_power(3), 0.0, alpha=0.0)
        u = np.random.default_rng(2).standard_normal(63)
        np.testing.assert_allclose(residual(u, cfg), cfg.A @ u)

    def test_trivial_solution(self, reference_problem):
        np.testing.assert_array_equal(residual(np.zeros(63), reference_problem), 0.0)
        np.testing.assert_array_equal(residual_aux8(np.zeros(63), reference_problem), 0.0)

    def test_aux_residual_without_lambda(self, mesh64):
        cfg = make_problem(mesh64, constant(1.0), plus_power(3), 0.0)
        u = np.random.default_rng(3).standard_normal(63)
        np.testing.assert_allclose(residual_aux8(u, cfg), cfg.A @ u + cfg.m * u)

    @pytest.mark.parametrize("which", [ProblemKind.main, ProblemKind.aux8])
    def test_jacobian_matches_differences(self, reference_problem, which):
        cfg = reference_problem.with_alpha(np.full(63, -1.5))
        r = {ProblemKind.main: residual, ProblemKind.aux8: residual_aux8}[which]
        J = {ProblemKind.main: jacobian, ProblemKind.aux8: jacobian_aux8}[which]
        rng = np.random.default_rng(4)
        u = 0.5 + 0.3 * rng.random(63)  # away from the kink at 0
        v = rng.standard_normal(63)
        eps = 1e-6
        fd = (r(u + eps * v, cfg) - r(u - eps * v, cfg)) / (2 * eps)
        np.testing.assert_allclose(J(u, cfg) @ v, fd, rtol=1e-6, atol=1e-6)


class TestGradientCheck:
    @pytest.mark.parametrize("which", [ProblemKind.main, ProblemKind.aux8])
    def test_random_fields(self, reference_problem, which):
        rng = np.random.default_rng(5)
        cfg = reference_problem.with_alpha(rng.uniform(-3.0, 3.0, 63))
        u, v = rng.standard_normal(63), rng.standard_normal(63)
        r = residual if which is ProblemKind.main else residual_aux8
        scale = 1.0 + abs(v @ r(u, cfg))
        assert gradient_check(u, v, cfg, which=which) <= 1e-6 * scale

    def test_zero_direction(self, reference_problem):
        assert gradient_check(np.ones(63), np.zeros(63), reference_problem) == 0.0

    @pytest.mark.parametrize("dim,n", [(1, 64), (2, 16)])
    @pytest.mark.parametrize("which", [ProblemKind.main, ProblemKind.aux8])
    def test_hundred_random_pairs(self, dim, n, which):
        mesh = build_mesh(dim, n, 1.0)
        lam = 2.0 * first_eigenpair(mesh).value
        rng = np.random.default_rng(11)
        cfg = make_problem(mesh, scale_f_corollary2(constant(1.0), lam, 1.0), plus_power(3), lam,
                           alpha=rng.uniform(-3.0, 3.0, mesh.interior_count))
        r = residual if which is ProblemKind.main else residual_aux8
        for _ in range(100):
            u = rng.standard_normal(mesh.interior_count)
            v = rng.standard_normal(mesh.interior_count)
            assert gradient_check(u, v, cfg, eps=1e-5, which=which) <= 1e-6 * (1.0 + abs(v @ r(u, cfg)))

    def test_quadratic_energy_is_exact(self, poisson_problem):
        rng = np.random.default_rng(6)
        u, v = rng.standard_normal(63), rng.standard_normal(63)
        # central differences are exact here; only roundoff of J remains
        roundoff = 1e-12 * (1.0 + abs(energy(u, poisson_problem))) / 1e-5
        assert gradient_check(u, v, poisson_problem) <= roundoff

    def test_eps_must_be_positive(self, reference_problem):
        with pytest.raises(ValueError):
            gradient_check(np.zeros(63), np.zeros(63), reference_problem, eps=0.0)


class TestSaddleFunctional:
    def test_origin(self, reference_problem):
        assert saddle_phi(np.zeros(63), np.zeros(63), reference_problem) == 0.0

    def test_minus_primitive_is_stationary_in_y(self, reference_problem):
        u = np.random.default_rng(7).standard_normal(63)
        _, phi_y = saddle_gradients(u, -reference_problem.f.F(u), reference_problem)
        np.testing.assert_allclose(phi_y, 0.0, atol=1e-14)

    def test_minus_primitive_maximizes_in_y(self, reference_problem):
        rng = np.random.default_rng(8)
        u = rng.standard_normal(63)
        best = saddle_phi(u, -reference_problem.f.F(u), reference_problem)
        for _ in range(100):
            y = rng.standard_normal(63) * 5.0
            assert saddle_phi(u, y, reference_problem) <= best + 1e-12

    def test_u_gradient_at_alpha_is_main_residual(self, reference_problem):
        rng = np.random.default_rng(9)
        u, alpha = rng.standard_normal(63), rng.uniform(-1.0, 1.0, 63)
        cfg = reference_problem.with_alpha(alpha)
        phi_u, _ = saddle_gradients(u, alpha, cfg)
        np.testing.assert_allclose(phi_u, residual(u, cfg))
