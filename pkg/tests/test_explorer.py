"""Tests for the α families, the auxiliary problem, θ estimates and the α search."""

import math
from unittest.mock import patch

import numpy as np
import pytest

from trisolve.discretization import build_mesh, first_eigenpair
from trisolve.energy import make_problem
from trisolve.exceptions import SearchFailure
from trisolve.explorer import (
    AlphaFamily,
    ExploreOptions,
    FamilyKind,
    Segment,
    ThetaStarEstimate,
    ThetaTildeTrend,
    branch_energies,
    check_alternative,
    equalize_alpha,
    estimate_ratio_bounds,
    estimate_theta_star,
    estimate_theta_tilde,
    explore,
)
from trisolve.models import RunStatus, StageStatus
from trisolve.nonlinearity import constant, plus_power, table
from trisolve.solvers import SolverOptions

FAST = SolverOptions(max_starts=10)


def _odd_cubic():
    xi = np.linspace(-2.0, 2.0, 401)
    return table(np.column_stack([xi, xi - xi**3]))


# ---------------------------------------------------------------------------
# Families
# ---------------------------------------------------------------------------

class TestAlphaFamily:
    def test_constants(self, mesh64):
        family = AlphaFamily(FamilyKind.constants, mesh64, bound=10.0)
        assert family.size == 1
        np.testing.assert_array_equal(family.field([3.0]).values, 3.0)

    def test_outside_box_rejected(self, mesh64):
        family = AlphaFamily(FamilyKind.constants, mesh64, bound=10.0)
        assert not family.contains([10.5])
        with pytest.raises(ValueError, match="outside"):
            family.field([10.5])

    def test_piecewise_constant_halves(self, mesh64):
        family = AlphaFamily(FamilyKind.piecewise_constant, mesh64, k=2)
        alpha = family.field([1.0, -1.0]).values
        x = mesh64.node_coords.ravel()
        np.testing.assert_array_equal(alpha[x < 0.5], 1.0)
        np.testing.assert_array_equal(alpha[x >= 0.5], -1.0)

    def test_piecewise_constant_2d_size(self):
        family = AlphaFamily(FamilyKind.piecewise_constant, build_mesh(2, 8, 1.0), k=2)
        assert family.size == 4

    def test_sine_series_respects_bound(self, mesh64):
        family = AlphaFamily(FamilyKind.sine_series, mesh64, k=3, bound=6.0)
        assert family.box == pytest.approx(2.0)
        alpha = family.field([2.0, -2.0, 2.0]).values
        assert np.max(np.abs(alpha)) <= 6.0

    def test_convex_combination_stays_inside(self, mesh64):
        family = AlphaFamily(FamilyKind.sine_series, mesh64, k=2, bound=4.0)
        c = family.combine([2.0, -2.0], [-2.0, 1.0], 0.25)
        assert family.contains(c)
        with pytest.raises(ValueError, match="theta"):
            family.combine([0.0, 0.0], [1.0, 1.0], 1.5)

    def test_segment_limit(self, mesh64):
        family = AlphaFamily(FamilyKind.constants, mesh64, bound=10.0)
        assert family.segment_limit(0.5) == pytest.approx(20.0)
        np.testing.assert_allclose(family.segment_coefficients(-3.0, 0.5), [-1.5])


# ---------------------------------------------------------------------------
# Auxiliary problem
# ---------------------------------------------------------------------------

class TestCheckAlternative:
    def test_reference_has_no_nonzero_solution(self, reference_problem):
        result = check_alternative(reference_problem, FAST)
        assert not result.nontrivial_found
        assert result.witness is None
        assert result.max_norm <= 1e-8

    def test_linear_problem(self, poisson_problem):
        cfg = poisson_problem.with_alpha(np.zeros(63))
        assert not check_alternative(cfg, FAST).nontrivial_found

    def test_zero_f_has_logistic_witness(self, mesh64):
        lam = 2.0 * first_eigenpair(mesh64).value
        cfg = make_problem(mesh64, constant(0.0), plus_power(3), lam)
        result = check_alternative(cfg, FAST)
        assert result.nontrivial_found
        assert result.witness.residual_norm <= 1e-9
        assert np.all(result.witness.values > 0)


# ---------------------------------------------------------------------------
# θ estimates
# ---------------------------------------------------------------------------

class TestTheta:
    def test_theta_star_near_lambda1(self, reference_problem):
        lambda1 = first_eigenpair(reference_problem.mesh).value
        estimate = estimate_theta_star(reference_problem)
        assert estimate.upper_bound
        assert lambda1 * (1 - 1e-9) <= estimate.value <= lambda1 * (1 + 1e-3)
        assert estimate.best_scale == pytest.approx(1e-4)

    def test_theta_star_is_upper_bound_on_sampled_ratio(self):
        mesh = build_mesh(1, 16, 1.0)
        cfg = make_problem(mesh, constant(1.0), plus_power(3), 10.0)
        estimate = estimate_theta_star(cfg)
        rng = np.random.default_rng(0)
        best = math.inf
        for _ in range(2000):
            u = rng.uniform(0.0, 1e-2, mesh.interior_count)
            psi = float(np.sum(cfg.m * cfg.g.F(u)))
            if psi > 0:
                best = min(best, 0.5 * float(u @ (cfg.A @ u)) / psi)
        assert estimate.value <= best

    def test_theta_star_needs_feasible_start(self, mesh64):
        cfg = make_problem(mesh64, constant(1.0), table([(-1.0, 1.0), (1.0, -1.0)]), 1.0)
        with pytest.raises(SearchFailure, match="feasible"):
            estimate_theta_star(cfg)

    def test_theta_tilde_increases_for_plus_power(self, reference_problem):
        trend = estimate_theta_tilde(reference_problem, (1.0, 100.0))
        assert trend.trend == "increasing"
        assert trend.heuristic

    def test_theta_tilde_empty_shell(self, mesh64):
        cfg = make_problem(mesh64, constant(1.0), table([(-1.0, 1.0), (1.0, -1.0)]), 1.0)
        trend = estimate_theta_tilde(cfg, (1.0, 10.0))
        assert all(math.isinf(v) for v in trend.values)
        assert trend.trend == "flat"

    def test_theta_tilde_radii_checked(self, reference_problem):
        with pytest.raises(ValueError, match="increasing"):
            estimate_theta_tilde(reference_problem, (10.0, 1.0))

    def test_trend_labels(self):
        assert ThetaTildeTrend((1.0, 2.0), (3.0, 3.0)).trend == "flat"
        assert ThetaTildeTrend((1.0, 2.0, 3.0), (3.0, 2.0, 1.0)).trend == "decreasing"
        assert ThetaTildeTrend((1.0, 2.0, 3.0), (1.0, 2.0, math.inf)).trend == "increasing"
        assert ThetaTildeTrend((1.0, 2.0, 3.0), (1.0, 3.0, 2.0)).trend == "mixed"

    def test_ratio_bounds(self):
        bounds = estimate_ratio_bounds(
            ThetaStarEstimate(value=10.0, best_scale=1e-4),
            ThetaTildeTrend((1.0, 10.0), (20.0, math.inf)),
            rho=0.0, sigma=0.5, lambda1=10.0,
        )
        assert bounds.near_zero_ratio == pytest.approx(0.05)
        assert bounds.near_zero_consistent
        assert bounds.far_ratios == (0.025, 0.0)
        assert bounds.far_consistent


# ---------------------------------------------------------------------------
# Branches and equalization
# ---------------------------------------------------------------------------

def _reference_segment(cfg):
    family = AlphaFamily(FamilyKind.constants, cfg.mesh, bound=100.0)
    return Segment(family, cfg, scale=1.0 / math.sqrt(cfg.lam))


class TestBranchEnergies:
    def test_zero_forcing(self, reference_problem):
        be = branch_energies(reference_problem, FAST, t=0.0)
        assert be.J_pos < 0
        assert be.J_neg == pytest.approx(0.0, abs=1e-12)

    def test_negative_forcing_favours_negative_branch(self, reference_problem):
        segment = _reference_segment(reference_problem)
        near = branch_energies(segment.at(-1.5), FAST, t=-1.5)
        # past the crossing near t = -1.51, continued from t = -1.5 towards the fold near -2.4
        be = branch_energies(segment.at(-2.0), FAST, warm=(near.u_pos, near.u_neg), t=-2.0)
        assert be.J_neg < be.J_pos
        assert be.J_neg == pytest.approx(-(2.0**2) / 24, rel=1e-2)

    def test_energies_at_minus_one_and_a_half(self, reference_problem):
        segment = _reference_segment(reference_problem)
        be = branch_energies(segment.at(-1.5), FAST, t=-1.5)
        assert be.J_neg == pytest.approx(-1.5**2 / 24, rel=1e-2)
        assert be.J_pos < be.J_neg

    def test_lost_branch_reported(self, reference_problem):
        segment = _reference_segment(reference_problem)
        with pytest.raises(SearchFailure, match="branch lost") as excinfo:
            branch_energies(segment.at(-30.0), FAST, t=-30.0)
        assert excinfo.value.diagnostics["lost"] == ["positive"]


class TestEqualizeAlpha:
    def test_invalid_bracket(self, reference_problem):
        segment = _reference_segment(reference_problem)
        with pytest.raises(SearchFailure, match="invalid bracket"):
            equalize_alpha(segment, (-0.3, 0.0), FAST)

    def test_odd_problem_equalizes_at_zero(self, mesh64):
        lam = 2.0 * first_eigenpair(mesh64).value
        cfg = make_problem(mesh64, constant(1.0), _odd_cubic(), lam)
        segment = Segment(AlphaFamily(FamilyKind.constants, mesh64), cfg)
        eq = equalize_alpha(segment, (-0.5, 0.5), FAST)
        assert eq.t == pytest.approx(0.0, abs=1e-6)
        assert len(eq.solutions) >= 3
        assert eq.gap <= 1e-8 * (1 + abs(eq.J_pos))


# ---------------------------------------------------------------------------
# Pipeline
# ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def reference_report():
    from trisolve.nonlinearity import gamma_corollary2, scale_f_corollary2

    mesh = build_mesh(1, 64, 1.0)
    lam = 2.0 * first_eigenpair(mesh).value
    h = constant(1.0)
    gamma = gamma_corollary2(h)
    cfg = make_problem(mesh, scale_f_corollary2(h, lam, gamma), plus_power(3), lam)
    family = AlphaFamily(FamilyKind.constants, mesh, bound=100.0)
    return explore(cfg, family, FAST, ExploreOptions(grid_points=8), h=h,
                   scale=math.sqrt(gamma / lam))


class TestExplore:
    def test_reference_finds_three_solutions(self, reference_report):
        report = reference_report
        assert report.status is RunStatus.ok
        assert report.active_branch == "second"
        assert report.alpha_search_required
        assert not report.alternative.nontrivial_found
        assert len(report.solutions) >= 3

    def test_reference_equal_minima(self, reference_report):
        eq = reference_report.equalization
        assert eq.gap <= 1e-8 * (1 + abs(eq.J_pos))
        assert reference_report.minima.gap <= 1e-8 * (1 + abs(eq.J_pos))
        assert -2.0 < eq.t < 0.0

    def test_reference_diagnostics(self, reference_report):
        report = reference_report
        assert report.condition16.passed
        assert all(row["passed"] for row in report.saddle)
        assert report.soft_checks["saddle_stationary"]
        assert report.branch_table
        assert set(report.stages.values()) == {StageStatus.ok}

    def test_lambda_below_interval_stops(self, mesh64):
        lam = 0.5 * first_eigenpair(mesh64).value
        cfg = make_problem(mesh64, constant(1.0), plus_power(3), lam)
        report = explore(cfg, AlphaFamily(FamilyKind.constants, mesh64), FAST)
        assert report.status is RunStatus.hypothesis_violation
        assert report.stages["thresholds"] is StageStatus.violated
        assert report.stages["bracket"] is StageStatus.skipped
        assert report.equalization is None

    def test_first_branch_skips_search(self, mesh64):
        lam = 2.0 * first_eigenpair(mesh64).value
        cfg = make_problem(mesh64, constant(0.0), plus_power(3), lam)
        report = explore(cfg, AlphaFamily(FamilyKind.constants, mesh64), FAST)
        assert report.status is RunStatus.ok
        assert report.active_branch == "first"
        assert not report.alpha_search_required
        assert not report.condition16.passed
        assert report.stages["equalize"] is StageStatus.skipped

    def test_estimated_thresholds_need_trust(self, mesh64):
        cfg = make_problem(mesh64, constant(1.0), _odd_cubic(), 20.0)
        report = explore(cfg, AlphaFamily(FamilyKind.constants, mesh64), FAST)
        assert report.status is RunStatus.hypothesis_violation
        assert "trust_estimates" in report.messages["thresholds"]

    def test_reference_hessian_flags(self, reference_report):
        checks = reference_report.soft_checks
        assert checks["minima_flagged"]
        assert checks["third_has_negative_direction"]
        assert reference_report.minima.first.local_min
        assert reference_report.minima.second.local_min

    def test_theta_error_stops_before_bracket(self, reference_problem):
        family = AlphaFamily(FamilyKind.constants, reference_problem.mesh, bound=100.0)
        with patch("trisolve.explorer.pipeline.estimate_theta_star", side_effect=RuntimeError("boom")):
            report = explore(reference_problem, family, FAST, ExploreOptions(grid_points=4))
        assert report.status is RunStatus.internal_error
        assert report.stages["theta"] is StageStatus.failed
        assert "boom" in report.messages["theta"]
        assert report.stages["bracket"] is StageStatus.skipped
        assert report.messages["bracket"] == "theta estimation failed"
        assert report.bracket is None
