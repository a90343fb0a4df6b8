import math

import numpy as np
import pytest

from nksix import oracle, s3s3
from nksix.errors import SingularMetricError
from nksix.quaternions import Quaternion, im

RNG = np.random.default_rng(np.random.Philox(808))


def round_sphere_normal_metric(dim=3):
    """Round unit sphere in geodesic normal coordinates (any dimension):
    g = f(r)^2 Id + (1 - f(r)^2) x x^T / r^2 with f = sin(r)/r."""

    def components(x):
        r2 = float(x @ x)
        if r2 < 1e-24:
            return np.eye(len(x))
        r = math.sqrt(r2)
        f2 = (math.sin(r) / r) ** 2
        return f2 * np.eye(len(x)) + (1.0 - f2) * np.outer(x, x) / r2

    return oracle.MetricField(components, dim)


class TestChristoffel:
    def test_constant_metric_gives_zero(self):
        flat = oracle.MetricField(lambda x: np.eye(6), 6)
        assert np.max(np.abs(oracle.christoffel(flat, np.zeros(6)))) <= 1e-12

    def test_normal_coordinates_vanish_at_center(self):
        met = round_sphere_normal_metric()
        assert np.max(np.abs(oracle.christoffel(met, np.zeros(3)))) <= 1e-8

    def test_symmetry_in_lower_indices(self):
        met = round_sphere_normal_metric()
        x = np.array([0.3, -0.2, 0.4])
        gamma = oracle.christoffel(met, x)
        assert np.max(np.abs(gamma - np.einsum("kij->kji", gamma))) <= 1e-12

    def test_second_order_convergence_without_extrapolation(self):
        met = round_sphere_normal_metric()
        x = np.array([0.25, -0.15, 0.35])
        reference = oracle.christoffel(met, x, h=2e-4, richardson=True)
        err_h = np.max(np.abs(oracle.christoffel(met, x, h=8e-3, richardson=False) - reference))
        err_h2 = np.max(np.abs(oracle.christoffel(met, x, h=4e-3, richardson=False) - reference))
        assert 2.5 <= err_h / err_h2 <= 5.5  # ~4x per halving

    def test_richardson_agrees_to_higher_order(self):
        met = round_sphere_normal_metric()
        x = np.array([0.25, -0.15, 0.35])
        a = oracle.christoffel(met, x, h=4e-3, richardson=True)
        b = oracle.christoffel(met, x, h=2e-3, richardson=True)
        c = oracle.christoffel(met, x, h=4e-3, richardson=False)
        d = oracle.christoffel(met, x, h=2e-3, richardson=False)
        assert np.max(np.abs(a - b)) <= 0.1 * np.max(np.abs(c - d))

    def test_step_validation(self):
        met = round_sphere_normal_metric()
        with pytest.raises(ValueError):
            oracle.christoffel(met, np.zeros(3), h=1.0)
        with pytest.raises(ValueError):
            oracle.christoffel(met, np.zeros(3), h=1e-9)

    def test_singular_metric_raises(self):
        bad = oracle.MetricField(lambda x: np.zeros((3, 3)), 3)
        with pytest.raises(SingularMetricError):
            oracle.christoffel(bad, np.zeros(3))


class TestRiemann:
    def test_flat_metric_gives_zero(self):
        flat = oracle.MetricField(lambda x: np.eye(4), 4)
        assert np.max(np.abs(oracle.riemann_numeric(flat, np.zeros(4)))) <= 1e-10

    def test_unit_sphere_sectional_curvature(self):
        met = round_sphere_normal_metric()
        x = np.array([0.2, 0.1, -0.3])
        R = oracle.riemann_numeric(met, x)
        Rl = oracle.lower_curvature(met, x, R)
        g = met.components(x)
        for i, j in ((0, 1), (0, 2), (1, 2)):
            denom = g[i, i] * g[j, j] - g[i, j] ** 2
            assert Rl[i, j, j, i] / denom == pytest.approx(1.0, abs=1e-4)

    def test_metric_compatibility(self):
        met = round_sphere_normal_metric()
        assert oracle.metric_compatibility_defect(met, np.array([0.3, -0.1, 0.2])) <= 1e-8

    def test_numeric_symmetries_on_a_product_chart(self):
        met, _ = s3s3.chart_fields(s3s3.random_point(RNG), structure=False)
        x = np.zeros(6)
        Rl = oracle.lower_curvature(met, x, oracle.riemann_numeric(met, x))
        scale = np.abs(Rl).max()
        assert np.abs(Rl + np.einsum("jikl->ijkl", Rl)).max() <= 1e-3 * scale
        assert np.abs(Rl + np.einsum("ijlk->ijkl", Rl)).max() <= 1e-3 * scale
        cyc = Rl + np.einsum("jkil->ijkl", Rl) + np.einsum("kijl->ijkl", Rl)
        assert np.abs(cyc).max() <= 1e-3 * scale


class TestNablaJ:
    def test_constant_structure_flat_metric(self):
        flat = oracle.MetricField(lambda x: np.eye(4), 4)
        J = np.kron(np.eye(2), np.array([[0.0, -1.0], [1.0, 0.0]]))
        field = oracle.as_structure_field(lambda x: J, 4)
        T = oracle.nabla_J_numeric(flat, field, np.zeros(4))
        assert np.max(np.abs(T)) <= 1e-12


class TestCompareTensor:
    def test_identical_samplers(self):
        def sampler(rng):
            return rng.standard_normal((3, 3))

        out = oracle.compare_tensor(sampler, sampler, 10, seed=5)
        assert out.max_abs == 0.0 and out.passed

    def test_detects_deviation(self):
        def a(rng):
            return rng.standard_normal(4)

        def b(rng):
            return rng.standard_normal(4) + 1e-3

        out = oracle.compare_tensor(a, b, 10, seed=5, tolerance=1e-6)
        assert not out.passed and out.max_abs >= 1e-4

    def test_zero_samples_is_vacuous(self):
        out = oracle.compare_tensor(lambda r: np.zeros(1), lambda r: np.zeros(1), 0, seed=1)
        assert not out.passed


class TestChart:
    def test_rejects_off_center_map(self):
        center = s3s3.BASE_POINT
        shifted = s3s3.Point(Quaternion.exp_imag(0.3, 0, 0), s3s3.BASE_POINT.q)
        with pytest.raises(ValueError):
            oracle.Chart(dim=6, center=shifted, map=lambda x: center)

    def test_fd_frame_matches_analytic_inner_products(self):
        center = s3s3.BASE_POINT

        def chart_map(x):
            e = Quaternion.exp_imag
            return s3s3.Point(
                (center.p * e(x[0], 0, 0) * e(0, x[1], 0) * e(0, 0, x[2])).normalized(),
                (center.q * e(x[3], 0, 0) * e(0, x[4], 0) * e(0, 0, x[5])).normalized(),
            )

        def embed(pt):
            return np.concatenate([pt.p.coeffs(), pt.q.coeffs()])

        def tangent_from_ambient(pt, vel):
            alpha = pt.p.inverse() * Quaternion(*vel[:4])
            beta = pt.q.inverse() * Quaternion(*vel[4:])
            return s3s3.Tangent(pt, im(*alpha.imag), im(*beta.imag))

        chart = oracle.Chart(dim=6, center=center, map=chart_map, embed=embed,
                             tangent=tangent_from_ambient)
        frame = chart.frame_at(np.zeros(6))
        for i, X in enumerate(frame):
            expect = np.eye(6)[i]
            assert np.max(np.abs(X.coeffs() - expect)) <= 1e-9
