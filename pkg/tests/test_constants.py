import numpy as np
import pytest

from bvlift.constants import (avg_eucl_jump, avg_eucl_jump_closed,
                              avg_lifted_dist, avg_lifted_dist_closed,
                              ball_volume, c1d_const, ca_const, cj_estimate,
                              k_const, m_const, psi_closed, psi_estimate,
                              sphere_area, sphere_quad)
from bvlift.geometry import embed_tensor, random_unit_vectors

SAMPLES = 200_000


def pair_at_angle(d, theta):
    n = np.zeros(d)
    n[-1] = 1.0
    m = np.zeros(d)
    m[-1] = np.cos(theta)
    m[-2] = np.sin(theta)
    return n, m


class TestSurfaceMeasures:
    def test_sphere_areas(self):
        assert sphere_area(0) == 2.0
        assert sphere_area(1) == pytest.approx(2 * np.pi, abs=1e-12)
        assert sphere_area(2) == pytest.approx(4 * np.pi, abs=1e-12)

    def test_ball_volumes(self):
        assert ball_volume(0) == 1.0
        assert ball_volume(1) == pytest.approx(2.0, abs=1e-12)
        assert ball_volume(2) == pytest.approx(np.pi, abs=1e-12)

    def test_quadrature_integrates_area(self):
        for k in (1, 2, 3):
            _, w = sphere_quad(k, 48)
            assert w.sum() == pytest.approx(sphere_area(k), rel=1e-5)


class TestKConst:
    def test_one_dimensional(self):
        assert k_const(1).value == 1.0

    def test_circle(self):
        # closed-form oracle: (1/2pi) * circumference integral of |cos| = 2/pi
        assert k_const(2).value == pytest.approx(2 / np.pi, abs=1e-12)

    def test_two_sphere(self):
        # closed-form oracle: (1/2) int_0^pi |cos| sin = 1/2
        assert k_const(3).value == pytest.approx(0.5, abs=1e-12)

    def test_gamma_closed_form(self):
        # K_N = 2 Gamma(N/2) / ((N-1) sqrt(pi) Gamma((N-1)/2))
        from scipy.special import gamma
        for N in range(2, 8):
            closed = 2 * gamma(N / 2) / ((N - 1) * np.sqrt(np.pi)
                                         * gamma((N - 1) / 2))
            assert k_const(N).value == pytest.approx(closed, abs=1e-12)


class TestMConst:
    def test_flat_case(self):
        assert m_const(2).value == 2.0

    def test_circle_case(self):
        assert m_const(3).value == pytest.approx(4.0, abs=1e-12)

    def test_matches_ball_volume_closed_form(self):
        for d in range(2, 7):
            assert m_const(d).value == pytest.approx(
                2 * ball_volume(d - 2), abs=1e-9)

    def test_flat_ratio_identity(self):
        # 1 + 2 M / H^{d-1}(S^{d-1}) = 1 + 2/pi in every dimension
        for d in range(2, 7):
            lhs = 1 + 2 * m_const(d).value / sphere_area(d - 1)
            assert lhs == pytest.approx(1 + 2 / np.pi, abs=1e-9)


class TestAvgLiftedDist:
    def test_equal_points_exact_zero(self):
        n, _ = pair_at_angle(3, 0.0)
        res = avg_lifted_dist(n, n, 10_000, seed=0)
        assert res.value == 0.0
        assert res.method == "monte_carlo"

    def test_right_angle(self):
        n, m = pair_at_angle(3, np.pi / 2)
        res = avg_lifted_dist(n, m, SAMPLES, seed=1)
        tol = max(3 * res.error_estimate, 1e-12)
        assert abs(res.value - np.pi / 2) <= tol

    def test_third_angle_closed_form(self):
        # (2/pi)(pi/3)(2pi/3) = 4 pi / 9
        n, m = pair_at_angle(3, np.pi / 3)
        res = avg_lifted_dist(n, m, SAMPLES, seed=2)
        assert avg_lifted_dist_closed(np.pi / 3) == pytest.approx(
            4 * np.pi / 9, abs=1e-14)
        assert abs(res.value - 4 * np.pi / 9) <= 3 * res.error_estimate

    def test_fifty_random_triples_match_closed_form(self):
        rng = np.random.default_rng(3)
        for k in range(50):
            d = int(rng.integers(2, 5))
            n = random_unit_vectors(d, 1, rng)[0]
            m = random_unit_vectors(d, 1, rng)[0]
            theta = np.arccos(np.clip(n @ m, -1, 1))
            res = avg_lifted_dist(n, m, 40_000, seed=100 + k)
            tol = max(4 * res.error_estimate, 1e-12)
            assert abs(res.value - avg_lifted_dist_closed(theta)) <= tol


class TestPsi:
    def test_zero_angle_exact(self):
        res = psi_estimate(0.0, 3, 10_000, seed=0)
        assert res.value == 0.0

    def test_right_angle_quarter(self):
        res = psi_estimate(np.pi / 2, 3, SAMPLES, seed=1)
        assert abs(res.value - 0.25) <= 3 * res.error_estimate

    def test_quarter_angle_d4(self):
        res = psi_estimate(np.pi / 4, 4, SAMPLES, seed=2)
        assert psi_closed(np.pi / 4) == pytest.approx(1 / 8, abs=1e-15)
        assert abs(res.value - 1 / 8) <= 3 * res.error_estimate

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            psi_estimate(-0.1, 3, 1000)

    def test_additivity(self):
        # psi(a + b) = psi(a) + psi(b) up to Monte Carlo error
        a, b = 0.7, 1.1
        ra = psi_estimate(a, 3, SAMPLES, seed=3)
        rb = psi_estimate(b, 3, SAMPLES, seed=4)
        rab = psi_estimate(a + b, 3, SAMPLES, seed=5)
        err = np.sqrt(ra.error_estimate**2 + rb.error_estimate**2
                      + rab.error_estimate**2)
        assert abs(rab.value - ra.value - rb.value) <= 4 * err


class TestAvgEuclJump:
    def test_endpoints_vanish(self):
        for theta in (0.0, np.pi):
            res = avg_eucl_jump(theta, 10_000, seed=0, d=3)
            assert res.value == pytest.approx(0.0, abs=1e-12)
            assert avg_eucl_jump_closed(theta) == pytest.approx(0.0, abs=1e-12)

    def test_right_angle_sqrt2(self):
        # at a right angle the integrand is constant, so the estimate is
        # exact up to accumulation roundoff and the standard error is zero
        res = avg_eucl_jump(np.pi / 2, SAMPLES, seed=1, d=3)
        assert avg_eucl_jump_closed(np.pi / 2) == pytest.approx(
            np.sqrt(2), abs=1e-14)
        assert abs(res.value - np.sqrt(2)) <= max(3 * res.error_estimate, 1e-12)

    def test_closed_form_on_grid(self):
        for k, theta in enumerate((np.pi / 6, np.pi / 3, 2 * np.pi / 3)):
            res = avg_eucl_jump(theta, SAMPLES, seed=10 + k, d=2)
            assert abs(res.value - avg_eucl_jump_closed(theta)) \
                <= 4 * res.error_estimate

    def test_tensor_jump_bound(self):
        # averaged Euclidean jump <= (1 + 2/pi) sin(theta)
        for k, theta in enumerate(np.linspace(0.1, np.pi - 0.1, 7)):
            res = avg_eucl_jump(theta, 50_000, seed=20 + k, d=3)
            bound = (1 + 2 / np.pi) * np.sin(theta)
            assert res.value <= bound + 4 * res.error_estimate


class TestCa:
    def test_flat_target_any_N(self):
        for N in (1, 2, 5):
            assert ca_const(N, 2).value == pytest.approx(
                1 + 2 / np.pi, abs=1e-12)

    def test_rank_one_reduction(self):
        for d in (3, 4, 5):
            assert ca_const(1, d).value == pytest.approx(
                1 + 2 / np.pi, abs=1e-9)

    def test_two_three_reaches_sqrt_half(self):
        res = ca_const(2, 3, restarts=16, seed=0)
        assert res.value >= 1 + 1 / np.sqrt(2) - 1e-6

    def test_lower_bound_everywhere(self):
        for (N, d) in ((2, 3), (3, 3), (2, 4)):
            res = ca_const(N, d, restarts=8, seed=1)
            assert res.value >= 1 + 2 / np.pi - 1e-6


class TestCj:
    def test_tensor_value(self):
        res = cj_estimate("tensor")
        assert res.value == pytest.approx(1 + 2 / np.pi, abs=1e-12)

    def test_pointwise_inequality_on_dense_grid(self):
        th = np.linspace(0, np.pi, 100_001)
        lhs = th * np.cos(th / 2) + (np.pi - th) * np.sin(th / 2)
        assert np.all(lhs <= (1 + np.pi / 2) * np.sin(th) + 1e-12)

    def test_user_isometric_embedding_lower_bound(self):
        # the tensor embedding supplied as a plain callable
        def emb(n):
            q = embed_tensor(n)
            return q.reshape(q.shape[:-2] + (-1,))

        res = cj_estimate(emb, grid_points=20_000, d=3, seed=0)
        assert res.value >= 1 + 2 / np.pi - 1e-6
        assert res.params["semantics"] == "lower_bound"

    def test_asymmetric_embedding_rejected(self):
        with pytest.raises(ValueError):
            cj_estimate(lambda n: n, grid_points=1000, d=3)

    def test_grid_points_precondition(self):
        with pytest.raises(ValueError):
            cj_estimate("tensor", grid_points=10)


class TestC1d:
    def test_value(self):
        assert c1d_const().value == pytest.approx(np.sqrt(2), abs=1e-12)

    def test_integrand_limits(self):
        f = lambda t: 2 * np.sin(t / 2) / np.sin(t)
        assert f(1e-8) == pytest.approx(1.0, abs=1e-9)
        assert f(np.pi / 2) == pytest.approx(np.sqrt(2), abs=1e-15)

    def test_supremum_attained_at_right_endpoint(self):
        t = np.linspace(1e-6, np.pi / 2, 10_000)
        vals = 2 * np.sin(t / 2) / np.sin(t)
        assert np.argmax(vals) == len(t) - 1
