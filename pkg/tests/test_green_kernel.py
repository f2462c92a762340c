"""Tests for the four I_d routes, the kernel and its antiderivatives."""

import itertools
import logging
import math

import numpy as np
import pytest

from hyperlap import green_kernel
from hyperlap.data_structures import EvalResult, EvalRoute
from hyperlap.green_kernel import (
    RouteError,
    SingularityError,
    antiderivative_hyp2f1,
    antiderivative_limit,
    antiderivative_sinh_power,
    c0,
    closed_form_i,
    euclidean_green,
    evaluate_i,
    fundamental_solution,
    fundamental_solution_rho,
    i_finite_sum,
    i_hyp2f1,
    i_legendre,
    i_quadrature,
    i_recurrence_check,
    route_available,
    small_rho_asymptotic,
    try_route,
)
from hyperlap.minkowski_geometry import AmbientPoint, from_geodesic_polar, random_polar
from hyperlap.params import KernelParams

ROUTES = [
    EvalRoute.QUADRATURE,
    EvalRoute.FINITE_SUM,
    EvalRoute.HYP2F1,
    EvalRoute.HYP2F1_EULER,
    EvalRoute.LEGENDRE_Q,
]
I4_AT_1 = -0.5 * math.log(1.0 / math.tanh(0.5)) + math.cosh(1.0) / (2.0 * math.sinh(1.0) ** 2)


class TestQuadrature:
    """Tests for i_quadrature."""

    def test_d2_closed_form(self):
        """Test I_2(1) = log coth(1/2)."""
        assert i_quadrature(2, 1.0).value == pytest.approx(math.log(1.0 / math.tanh(0.5)), rel=1e-12)

    def test_d3_at_log2(self):
        """Test I_3(ln 2) = 2/3."""
        result = i_quadrature(3, math.log(2.0))

        assert result.value == pytest.approx(2.0 / 3.0, rel=1e-10)
        assert result.route is EvalRoute.QUADRATURE
        assert result.est_error <= 1e-10 * result.value

    @pytest.mark.parametrize("d", range(3, 13))
    def test_decay_at_30(self, d):
        """Test I_d(30) < 1e-20 for d >= 3."""
        assert 0.0 < i_quadrature(d, 30.0).value < 1e-20

    def test_below_rho_min(self):
        """Test rho below rho_min is refused."""
        with pytest.raises(SingularityError):
            i_quadrature(3, 1e-7)

    def test_tolerance_not_met(self, monkeypatch):
        """Test a quadrature error above tolerance raises with the estimate."""

        def fake_quad(*args, **kwargs):
            return 0.5, 1e-3, {}

        monkeypatch.setattr(green_kernel.integrate, "quad", fake_quad)

        with pytest.raises(RouteError) as excinfo:
            i_quadrature(3, 1.0)
        assert excinfo.value.best_estimate == pytest.approx(2.0 * math.exp(-2.0), rel=1e-14)
        assert excinfo.value.route is EvalRoute.QUADRATURE


class TestFiniteSum:
    """Tests for i_finite_sum."""

    def test_d4(self):
        """Test the explicit I_4 line at rho = 1."""
        assert i_finite_sum(4, 1.0).value == pytest.approx(I4_AT_1, rel=1e-13)

    def test_d5(self):
        """Test I_5(1) = (coth^3 1 - 1)/3 - (coth 1 - 1)."""
        coth = 1.0 / math.tanh(1.0)

        assert i_finite_sum(5, 1.0).value == pytest.approx((coth**3 - 1) / 3 - (coth - 1), rel=1e-12)

    def test_d3_large_rho(self):
        """Test I_3 -> 0 and stays positive."""
        value = i_finite_sum(3, 40.0).value

        assert 0.0 < value < 1e-30

    @pytest.mark.parametrize("d", [3, 5, 7, 9, 11])
    @pytest.mark.parametrize("rho", [0.05, 0.3, 1.0])
    def test_odd_variants_agree(self, d, rho):
        """Test the coth and sinh forms agree where neither cancels badly."""
        result = i_finite_sum(d, rho)

        assert result.est_error <= 1e-11 * result.value

    def test_large_rho_flagged(self):
        """Test cancellation at large rho shows up in est_error."""
        result = i_finite_sum(9, 10.0)

        assert result.est_error > 1e-10 * abs(result.value)
        assert not route_available(EvalRoute.FINITE_SUM, 9, 10.0)


class TestHypergeometric:
    """Tests for i_hyp2f1."""

    def test_d3(self):
        """Test I_3(1) = coth 1 - 1."""
        assert i_hyp2f1(3, 1.0).value == pytest.approx(0.3130353, abs=1e-7)

    def test_d2(self):
        """Test I_2(2) = log coth 1."""
        assert i_hyp2f1(2, 2.0).value == pytest.approx(math.log(1.0 / math.tanh(1.0)), rel=1e-12)

    @pytest.mark.parametrize("d", range(2, 10))
    def test_variant_agreement(self, d):
        """Test plain and Euler forms agree on [0.5, 10]."""
        for rho in np.geomspace(0.5, 10.0, 12):
            plain = i_hyp2f1(d, rho).value
            euler = i_hyp2f1(d, rho, euler_variant=True).value

            assert abs(plain - euler) / plain < 1e-9

    def test_argument_too_close_to_one(self):
        """Test small rho is refused with a pointer to another route."""
        with pytest.raises(RouteError, match="sum or quadrature"):
            i_hyp2f1(4, 0.05)


class TestLegendre:
    """Tests for i_legendre."""

    def test_d2(self):
        """Test I_2(1) = Q_0(cosh 1)."""
        assert i_legendre(2, 1.0).value == pytest.approx(math.log(1.0 / math.tanh(0.5)), rel=1e-12)

    def test_d4(self):
        """Test the Q_1^1 form of I_4 against the finite sum."""
        assert i_legendre(4, 1.0).value == pytest.approx(i_finite_sum(4, 1.0).value, rel=1e-10)

    @pytest.mark.parametrize("d", [3, 5, 7, 9, 11])
    def test_half_integer_order_is_real(self, d):
        """Test the phase cancels for odd d and the value matches quadrature."""
        result = i_legendre(d, 0.8)

        assert result.imag_residue < 1e-10 * max(1.0, abs(result.value))
        assert result.value == pytest.approx(i_quadrature(d, 0.8).value, rel=1e-9)

    def test_small_rho_refused(self):
        """Test rho < 0.1 is refused."""
        with pytest.raises(RouteError):
            i_legendre(3, 0.05)


class TestRouteConsistency:
    """Cross-route properties of I_d."""

    @pytest.mark.parametrize("d", range(2, 8))
    @pytest.mark.parametrize("rho", [0.3, 1.0, 3.0])
    def test_closed_forms_match_every_route(self, d, rho):
        """Test the explicit I_2..I_7 lines against all four routes."""
        expected = closed_form_i(d, rho)

        for route in ROUTES:
            value = evaluate_i(d, rho, route).value
            assert abs(value - expected) <= 1e-10 * expected, route

    @pytest.mark.parametrize("d", range(2, 10))
    def test_pairwise_agreement_on_log_grid(self, d):
        """Test every pair of available routes agrees to 1e-8 over [0.05, 10]."""
        for rho in np.geomspace(0.05, 10.0, 40):
            values = [r.value for r in (try_route(route, d, rho) for route in ROUTES) if r is not None]

            assert len(values) >= 2
            for a, b in itertools.combinations(values, 2):
                assert abs(a - b) / max(abs(a), abs(b)) <= 1e-8

    def test_unavailable_routes(self):
        """Test routes outside their preconditions are reported unavailable."""
        assert route_available(EvalRoute.QUADRATURE, 4, 0.05)
        assert not route_available(EvalRoute.HYP2F1, 4, 0.05)
        assert not route_available(EvalRoute.LEGENDRE_Q, 4, 0.05)
        assert not route_available(EvalRoute.QUADRATURE, 4, 1e-8)

    @pytest.mark.parametrize("d", range(2, 13))
    def test_decay_positivity_and_monotonicity(self, d):
        """Test I_d(30) < 1e-12, I_d > 0 and strictly decreasing."""
        grid = np.geomspace(1e-3, 30.0, 60)
        values = [evaluate_i(d, rho).value for rho in grid]

        assert values[-1] < 1e-12
        assert all(v > 0.0 for v in values)
        assert all(later < earlier for earlier, later in zip(values, values[1:]))

    @pytest.mark.parametrize("d", range(4, 13))
    @pytest.mark.parametrize("rho", [0.3, 0.7, 1.0, 3.0])
    def test_recurrence_closure(self, d, rho):
        """Test the definite-integral recurrence linking I_d and I_{d-2}."""
        assert i_recurrence_check(d, rho) < 1e-9

    def test_recurrence_residual_is_absolute(self, monkeypatch):
        """Test a relative error of 1e-12 in I_12(0.3), of order 1e4, shows up unscaled."""
        real = green_kernel.evaluate_i

        def skewed(d, rho, route=EvalRoute.AUTO, tol=1e-10, **kwargs):
            result = real(d, rho, route, tol, **kwargs)
            if d == 12:
                return EvalResult(result.value * (1 + 1e-12), result.route, result.est_error)
            return result

        monkeypatch.setattr(green_kernel, "evaluate_i", skewed)

        assert i_recurrence_check(12, 0.3) > 1e-9

    def test_recurrence_needs_d4(self):
        """Test d < 4 is rejected."""
        with pytest.raises(ValueError):
            i_recurrence_check(3, 1.0)


class TestAutoRoute:
    """Tests for the AUTO policy."""

    def test_small_rho_uses_sum(self):
        """Test rho < 0.5 uses the finite sums."""
        assert evaluate_i(5, 0.2).route is EvalRoute.FINITE_SUM

    def test_large_rho_uses_hypergeometric(self):
        """Test rho >= 0.5 uses the hypergeometric series."""
        assert evaluate_i(5, 0.5).route is EvalRoute.HYP2F1

    def test_quadrature_arbitrates(self, monkeypatch, caplog):
        """Test disagreeing hypergeometric variants hand over to quadrature."""
        real = green_kernel.i_hyp2f1

        def skewed(d, rho, euler_variant=False, tol=1e-10, **kwargs):
            result = real(d, rho, euler_variant, tol, **kwargs)
            if euler_variant:
                return EvalResult(result.value * (1 + 1e-6), result.route, result.est_error)
            return result

        monkeypatch.setattr(green_kernel, "i_hyp2f1", skewed)

        with caplog.at_level(logging.INFO, logger="hyperlap.green_kernel"):
            result = evaluate_i(4, 2.0)

        assert result.route is EvalRoute.QUADRATURE
        assert result.value == pytest.approx(i_quadrature(4, 2.0).value, rel=1e-12)
        assert "falling back to quadrature" in caplog.text


class TestLargeRho:
    """Tests for distances where sinh^{d-1} leaves the double range."""

    @pytest.mark.parametrize("d,rho", [(12, 70.0), (7, 120.0), (2, 800.0)])
    def test_auto_falls_back_to_quadrature(self, d, rho):
        """Test AUTO returns a finite non-negative value instead of overflowing."""
        result = evaluate_i(d, rho)

        assert result.route is EvalRoute.QUADRATURE
        assert math.isfinite(result.value)
        assert 0.0 <= result.value < 1e-300

    def test_subnormal_value_kept(self):
        """Test quadrature keeps the rounded tail 2^6 e^{-6 rho} / 6 at d = 7."""
        expected = math.exp(6.0 * (math.log(2.0) - 120.0)) / 6.0

        assert i_quadrature(7, 120.0).value == pytest.approx(expected, rel=1e-3)

    def test_quadrature_matches_sum_at_moderate_rho(self):
        """Test the rescaled integral still agrees with the sums where both are accurate."""
        assert i_quadrature(6, 25.0).value == pytest.approx(i_hyp2f1(6, 25.0).value, rel=1e-12)

    def test_hypergeometric_underflow_is_route_error(self):
        with pytest.raises(RouteError, match="underflows"):
            i_hyp2f1(12, 70.0)

    def test_finite_sum_overflow_is_route_error(self):
        with pytest.raises(RouteError, match="overflows"):
            i_finite_sum(5, 800.0)

    def test_legendre_overflow_is_route_error(self):
        with pytest.raises(RouteError, match="overflows"):
            i_legendre(4, 800.0)

    @pytest.mark.parametrize("route", [EvalRoute.FINITE_SUM, EvalRoute.HYP2F1, EvalRoute.LEGENDRE_Q])
    def test_routes_skipped(self, route):
        """Test try_route drops routes that leave the double range."""
        assert try_route(route, 12, 100.0) is None


class TestFundamentalSolution:
    """Tests for the kernel on H_R^d."""

    def test_d3_value(self):
        """Test H(rho = ln 2) = (1/4 pi) (2/3) for d = 3, R = 1."""
        params = KernelParams(d=3)
        x = AmbientPoint.origin(params)
        rho = math.log(2.0)
        x2 = AmbientPoint(np.array([math.cosh(rho), math.sinh(rho), 0.0, 0.0]))

        result = fundamental_solution(params, x, x2)

        assert result.value == pytest.approx(0.0530516, abs=1e-7)
        assert result.value == pytest.approx(2.0 / 3.0 / (4.0 * math.pi), rel=1e-9)

    def test_c0(self):
        """Test c0(3) = 1/(4 pi) and c0(2) = 1/(2 pi)."""
        assert c0(3) == pytest.approx(1.0 / (4.0 * math.pi), rel=1e-14)
        assert c0(2) == pytest.approx(1.0 / (2.0 * math.pi), rel=1e-14)

    def test_d2_radius_independent(self):
        """Test the d = 2 kernel does not depend on R."""
        values = [fundamental_solution_rho(KernelParams(d=2, R=R), 0.7).value for R in (0.5, 1.0, 4.0)]

        assert values[0] == values[1] == values[2]

    def test_radius_scaling(self):
        """Test H scales as R^{2-d}."""
        base = fundamental_solution_rho(KernelParams(d=5, R=1.0), 0.9).value
        scaled = fundamental_solution_rho(KernelParams(d=5, R=2.0), 0.9).value

        assert scaled == pytest.approx(base / 8.0, rel=1e-14)

    def test_symmetry(self):
        """Test H(x, x') = H(x', x) on random pairs."""
        rng = np.random.default_rng(42)
        params = KernelParams(d=4, R=1.5)

        for _ in range(20):
            x = from_geodesic_polar(random_polar(rng, 4, r_max=3.0), params)
            y = from_geodesic_polar(random_polar(rng, 4, r_max=3.0), params)
            forward = fundamental_solution(params, x, y).value
            backward = fundamental_solution(params, y, x).value

            assert abs(forward - backward) <= 1e-12 * abs(forward)

    def test_coincident_points(self):
        """Test coincident points raise a singularity error."""
        params = KernelParams(d=3)
        origin = AmbientPoint.origin(params)

        with pytest.raises(SingularityError):
            fundamental_solution(params, origin, origin)


class TestEuclideanGreen:
    """Tests for euclidean_green."""

    def test_values(self):
        """Test d = 3, 2 and 1 at simple distances."""
        assert euclidean_green(3, 1.0) == pytest.approx(1.0 / (4.0 * math.pi), rel=1e-14)
        assert euclidean_green(2, 1.0) == 0.0
        assert euclidean_green(1, 2.0) == pytest.approx(-1.0, rel=1e-14)

    def test_d1_jump(self):
        """Test -u'' = delta in d = 1: the slope drops by 1 across the origin."""
        slope_right = euclidean_green(1, 2.0) - euclidean_green(1, 1.0)

        assert slope_right == pytest.approx(-0.5, rel=1e-14)

    def test_zero_distance(self):
        """Test distance 0 raises."""
        with pytest.raises(SingularityError):
            euclidean_green(3, 0.0)


class TestSmallRho:
    """Tests for small_rho_asymptotic."""

    def test_values(self):
        """Test d = 3 and d = 2 at rho = 1e-3."""
        assert small_rho_asymptotic(3, 1e-3) == pytest.approx(1000.0, rel=1e-12)
        assert small_rho_asymptotic(2, 1e-3) == pytest.approx(6.9078, abs=1e-4)

    @pytest.mark.parametrize("d", [3, 5, 8])
    def test_ratio_tends_to_one(self, d):
        """Test I_d / asymptotic -> 1 against quadrature."""
        ratios = [i_quadrature(d, rho).value / small_rho_asymptotic(d, rho) for rho in (1e-3, 1e-4)]

        assert abs(ratios[0] - 1.0) < 1e-2
        assert abs(ratios[1] - 1.0) < abs(ratios[0] - 1.0)

    def test_d2_ratio_improves(self):
        """Test the logarithmic approach in d = 2."""
        ratios = [i_quadrature(2, rho).value / small_rho_asymptotic(2, rho) for rho in (1e-2, 1e-3, 1e-4)]

        assert abs(ratios[2] - 1) < abs(ratios[1] - 1) < abs(ratios[0] - 1)

    def test_out_of_range(self):
        """Test rho > 0.01 raises."""
        with pytest.raises(ValueError):
            small_rho_asymptotic(3, 0.1)


class TestAntiderivatives:
    """Tests for the antiderivatives of 1/sinh^m."""

    def test_m1(self):
        """Test the m = 1 antiderivative is -log coth(x/2)."""
        assert antiderivative_sinh_power(1, 0.8) == pytest.approx(-math.log(1.0 / math.tanh(0.4)), rel=1e-14)

    @pytest.mark.parametrize("m", range(1, 12))
    @pytest.mark.parametrize("x", [0.5, 1.0])
    def test_derivative(self, m, x):
        """Test the derivative is 1/sinh^m by central differences."""
        h = 1e-5
        derivative = (antiderivative_sinh_power(m, x + h) - antiderivative_sinh_power(m, x - h)) / (2 * h)

        assert derivative == pytest.approx(math.sinh(x) ** -m, rel=1e-7)

    @pytest.mark.parametrize("m", [2, 4, 6, 8, 10])
    def test_even_variants_agree(self, m):
        """Test the sinh and coth expansions for even m coincide."""
        for x in (0.3, 1.0, 2.5):
            assert antiderivative_sinh_power(m, x, coth_powers=True) == pytest.approx(
                antiderivative_sinh_power(m, x), rel=1e-12
            )

    @pytest.mark.parametrize("m", range(3, 12))
    def test_recurrence(self, m):
        """Test the integration-by-parts recurrence."""
        x = 0.8
        rhs = -math.cosh(x) / ((m - 1) * math.sinh(x) ** (m - 1)) - (m - 2) / (m - 1) * antiderivative_sinh_power(
            m - 2, x
        )

        assert antiderivative_sinh_power(m, x) == pytest.approx(rhs, rel=1e-11)

    def test_limits(self):
        """Test the limits at infinity."""
        assert antiderivative_limit(1) == 0.0
        assert antiderivative_limit(2) == -1.0
        assert antiderivative_limit(4) == pytest.approx(2.0 / 3.0, rel=1e-15)
        assert antiderivative_sinh_power(4, 30.0) == pytest.approx(antiderivative_limit(4), rel=1e-12)

    @pytest.mark.parametrize("d", range(2, 13))
    def test_definite_integral(self, d):
        """Test I_d = limit - antiderivative at rho."""
        rho = 1.0
        value = antiderivative_limit(d - 1) - antiderivative_sinh_power(d - 1, rho)

        assert value == pytest.approx(i_quadrature(d, rho).value, rel=1e-9)

    @pytest.mark.parametrize("d", range(2, 13))
    def test_hypergeometric_antiderivative(self, d):
        """Test the 2F1 antiderivative differentiates to sinh^{1-d}."""
        rho, h = 1.0, 1e-5
        derivative = (antiderivative_hyp2f1(d, rho + h) - antiderivative_hyp2f1(d, rho - h)) / (2 * h)

        assert derivative == pytest.approx(math.sinh(rho) ** (1 - d), rel=1e-7)
        assert -antiderivative_hyp2f1(d, rho) == pytest.approx(i_hyp2f1(d, rho).value, rel=1e-14)

    def test_closed_form_range(self):
        """Test closed forms exist for d = 2..7 only."""
        with pytest.raises(ValueError):
            closed_form_i(8, 1.0)
