import math

import numpy as np
import pytest

from nksix import _kernels as kernels
from nksix import flag, oracle

RNG = np.random.default_rng(np.random.Philox(4242))
BASE = flag.Point(flag.BASE_POINT_REP)
E3 = np.eye(3, dtype=complex)


def basis_tangent(i):
    return flag.Tangent(BASE, np.eye(6)[i])


class TestFrameAndMetric:
    def test_generators_are_orthonormal(self):
        G = np.array([[-0.5 * np.trace(a @ b).real for b in flag.BASIS]
                      for a in flag.BASIS])
        assert np.max(np.abs(G - np.eye(6))) == 0.0

    def test_metric_values(self):
        m1, m3 = basis_tangent(0), basis_tangent(2)
        assert flag.metric(m1, m1) == 1.0
        assert flag.metric(m1, m3) == 0.0

    def test_metric_is_blockwise(self):
        X = flag.Tangent(BASE, np.array([1.0, 2.0, 0, 0, 3.0, 0]))
        Y = flag.Tangent(BASE, np.array([0.5, -1.0, 4.0, 0, 1.0, 0]))
        blocks = sum(
            float(X.coeffs[2 * b:2 * b + 2] @ Y.coeffs[2 * b:2 * b + 2])
            for b in range(3)
        )
        assert flag.metric(X, Y) == pytest.approx(blocks, abs=1e-15)


class TestStructures:
    def test_rotation_convention(self):
        assert np.allclose(flag.complex_structure(basis_tangent(0)).coeffs, np.eye(6)[1])
        assert np.allclose(flag.complex_structure(basis_tangent(2)).coeffs, np.eye(6)[3])
        assert np.allclose(flag.complex_structure(basis_tangent(4)).coeffs, np.eye(6)[5])

    def test_kahler_companion_signs(self):
        out = flag.kahler_structure(basis_tangent(2), 1)
        assert np.allclose(out.coeffs, -np.eye(6)[3])

    def test_squares(self):
        for _ in range(100):
            X = flag.random_tangent(RNG, flag.random_point(RNG))
            assert (flag.complex_structure(flag.complex_structure(X)) + X).norm() <= 1e-15
            for i in (1, 2, 3):
                YY = flag.kahler_structure(flag.kahler_structure(X, i), i)
                assert (YY + X).norm() <= 1e-15

    def test_well_defined_under_torus_change(self):
        for _ in range(100):
            pt = flag.random_point(RNG)
            X = flag.random_tangent(RNG, pt)
            s, t = RNG.uniform(0, 2 * np.pi, size=2)
            rep2 = pt.rep @ np.diag(np.exp(1j * np.array([s, t, -(s + t)])))
            lhs = flag.complex_structure(X.with_base_rep(rep2))
            rhs = flag.complex_structure(X).with_base_rep(rep2)
            assert np.max(np.abs(lhs.coeffs - rhs.coeffs)) <= 1e-12


class TestCurvature:
    def test_vanishing_on_repeated_arguments(self):
        X = flag.random_tangent(RNG, BASE)
        assert flag.curvature(X, X, X).norm() <= 1e-14

    def test_holomorphic_sectional_values(self):
        for b in range(3):
            assert flag.hol_sec_curvature(basis_tangent(2 * b)) == pytest.approx(4.0, abs=1e-14)
        mixed = flag.Tangent(BASE, np.array([1.0, 0, 1.0, 0, 0, 0]) / math.sqrt(2))
        assert flag.hol_sec_curvature(mixed) == pytest.approx(1.0, abs=1e-14)

    def test_holomorphic_curvature_consistency(self):
        for _ in range(300):
            pt = flag.random_point(RNG)
            v = RNG.standard_normal(6)
            X = flag.Tangent(pt, v / np.linalg.norm(v))
            JX = flag.complex_structure(X)
            contraction = flag.metric(flag.curvature(X, JX, JX), X)
            assert abs(contraction - flag.hol_sec_curvature(X)) <= 1e-12

    def test_holomorphic_curvature_bound(self):
        for _ in range(2000):
            v = RNG.standard_normal(6)
            X = flag.Tangent(BASE, v / np.linalg.norm(v))
            assert flag.hol_sec_curvature(X) <= 4.0 + 1e-9

    def test_non_unit_input_rejected(self):
        with pytest.raises(ValueError):
            flag.hol_sec_curvature(flag.Tangent(BASE, 2.0 * np.eye(6)[0]))

    def test_closed_form_matches_numeric(self):
        for _ in range(5):
            center = flag.random_point(RNG)
            met, _ = flag.chart_fields(center)
            R = oracle.riemann_numeric(met, np.zeros(6))
            Rl = oracle.lower_curvature(met, np.zeros(6), R)
            u, v, w = (RNG.standard_normal(6) for _ in range(3))
            closed = flag.curvature(
                flag.Tangent(center, u), flag.Tangent(center, v), flag.Tangent(center, w)
            ).coeffs
            numeric = np.einsum("ijkl,i,j,k->l", Rl, u, v, w)
            assert np.abs(closed - numeric).max() / max(np.abs(closed).max(), 1.0) <= 1e-4


class TestSubspaces:
    def test_identity_flag(self):
        pt = flag.from_subspaces(E3[:, 0], E3[:, 1])
        assert pt.distance(BASE) <= 1e-15

    def test_swapped_flag(self):
        pt = flag.from_subspaces(E3[:, 1], E3[:, 0])
        expected = np.column_stack([E3[:, 1], -E3[:, 0], E3[:, 2]])
        assert pt.distance(flag.Point(expected)) <= 1e-15

    def test_rejects_non_orthogonal(self):
        with pytest.raises(ValueError):
            flag.from_subspaces(E3[:, 0], (E3[:, 0] + E3[:, 1]) / math.sqrt(2))

    def test_rejects_zero(self):
        with pytest.raises(ValueError):
            flag.from_subspaces(np.zeros(3), E3[:, 1])

    def test_round_trip_through_projections(self):
        for _ in range(100):
            pt = flag.random_point(RNG)
            l = flag.projection(pt, 3).vec * np.exp(1j * RNG.uniform(0, 2 * np.pi))
            m = flag.projection(pt, 2).vec * np.exp(1j * RNG.uniform(0, 2 * np.pi))
            assert flag.from_subspaces(l, m).distance(pt) <= 1e-12

    def test_projections_at_identity(self):
        assert flag.projection(BASE, 3).distance(flag.ProjectiveLine(E3[:, 0])) == 0.0
        assert flag.projection(BASE, 1).distance(flag.ProjectiveLine(E3[:, 2])) == 0.0

    def test_projections_are_class_functions(self):
        for _ in range(50):
            pt = flag.random_point(RNG)
            s, t = RNG.uniform(0, 2 * np.pi, size=2)
            other = flag.Point(pt.rep @ np.diag(np.exp(1j * np.array([s, t, -(s + t)]))))
            for a in (1, 2, 3):
                assert flag.projection(pt, a).distance(flag.projection(other, a)) <= 1e-12


class TestNablaJ:
    def test_cross_product_block_behaviour(self):
        out = flag.nabla_J(basis_tangent(0), basis_tangent(2))
        assert np.max(np.abs(out.coeffs[:4])) <= 1e-5
        assert np.linalg.norm(out.coeffs[4:]) == pytest.approx(1.0, abs=1e-5)

    def test_same_block_vanishes(self):
        assert flag.nabla_J(basis_tangent(0), basis_tangent(1)).norm() <= 1e-5
        assert flag.nabla_J(basis_tangent(0), basis_tangent(0)).norm() <= 1e-5

    def test_antisymmetry(self):
        pt = flag.random_point(RNG)
        X, Y = flag.random_tangent(RNG, pt), flag.random_tangent(RNG, pt)
        assert (flag.nabla_J(X, Y) + flag.nabla_J(Y, X)).norm() <= 1e-5 * X.norm() * Y.norm()

    def test_kahler_companions(self):
        for b in range(3):
            met, jf = flag.chart_fields(flag.random_point(RNG), weighted_block=b,
                                        structure=b + 1)
            T = kernels.nabla_structure(met, jf, np.zeros(6))
            assert np.max(np.abs(T)) <= 1e-5
