import math

import numpy as np
import pytest

from nksix import _kernels as kernels
from nksix import cp3, oracle
from nksix.errors import BasePointMismatchError, NotAnIsometryError
from nksix.matrices import SYMPLECTIC_FORM, group_membership

RNG = np.random.default_rng(np.random.Philox(777))
E = np.eye(4, dtype=complex)
P1 = cp3.Point(E[0])


class TestQuaternionicFrame:
    def test_values_at_first_basis_vector(self):
        ip, jp, kp = cp3.quaternionic_frame(P1)
        assert np.allclose(ip, 1j * E[0])
        assert np.allclose(jp, -E[1])
        assert np.allclose(kp, -1j * E[1])

    def test_j_squares_to_minus_one(self):
        for _ in range(50):
            p = cp3.random_point(RNG)
            jjp = SYMPLECTIC_FORM @ (SYMPLECTIC_FORM @ p.rep.conj()).conj()
            assert np.max(np.abs(jjp + p.rep)) <= 1e-14

    def test_frame_is_orthonormal(self):
        p = cp3.random_point(RNG)
        ip, jp, kp = cp3.quaternionic_frame(p)
        for v in (ip, jp, kp):
            assert abs(np.linalg.norm(v) - 1.0) <= 1e-12
            assert abs(np.vdot(p.rep, v).real) <= 1e-12


class TestSplitAndMetric:
    def test_vertical_vector_gives_zero_tangent(self):
        t = cp3.split_tangent(P1, 1j * E[0])
        assert np.max(np.abs(t.horiz)) <= 1e-15

    def test_d2_direction(self):
        _, jp, _ = cp3.quaternionic_frame(P1)
        t = cp3.split_tangent(P1, jp)
        assert np.max(np.abs(t.d2 - jp)) <= 1e-15
        assert np.max(np.abs(t.d4)) <= 1e-15

    def test_d4_direction(self):
        t = cp3.split_tangent(P1, E[2])
        assert np.max(np.abs(t.d2)) <= 1e-15
        assert np.max(np.abs(t.d4 - E[2])) <= 1e-15

    def test_metric_weights(self):
        _, jp, _ = cp3.quaternionic_frame(P1)
        t2, t4 = cp3.split_tangent(P1, jp), cp3.split_tangent(P1, E[2])
        assert cp3.metric(t2, t2) == pytest.approx(1.0, abs=1e-14)
        assert cp3.metric(t4, t4) == pytest.approx(2.0, abs=1e-14)
        assert cp3.metric(t2, t4) == pytest.approx(0.0, abs=1e-14)
        assert cp3.metric_fs(t4, t4) == pytest.approx(1.0, abs=1e-14)

    def test_base_mismatch(self):
        other = cp3.Point(E[1])
        with pytest.raises(BasePointMismatchError):
            cp3.metric(cp3.split_tangent(P1, E[2]), cp3.split_tangent(other, E[2]))


class TestStructures:
    def test_product_structure_flips_d2(self):
        _, jp, _ = cp3.quaternionic_frame(P1)
        t = cp3.split_tangent(P1, jp)
        assert np.max(np.abs(cp3.product_structure(t).horiz + jp)) <= 1e-15

    def test_kahler_structure_on_d4(self):
        t = cp3.split_tangent(P1, E[2])
        assert np.max(np.abs(cp3.complex_structure_kahler(t).horiz - 1j * E[2])) <= 1e-15

    def test_nk_structure_on_d2(self):
        _, jp, kp = cp3.quaternionic_frame(P1)
        t = cp3.split_tangent(P1, jp)
        assert np.max(np.abs(cp3.complex_structure(t).horiz + kp)) <= 1e-15

    def test_relations(self):
        for _ in range(100):
            pt = cp3.random_point(RNG)
            X = cp3.random_tangent(RNG, pt)
            P, Jc, Jn = cp3.product_structure, cp3.complex_structure_kahler, cp3.complex_structure
            assert np.max(np.abs(P(P(X)).horiz - X.horiz)) <= 1e-12
            assert np.max(np.abs(Jc(Jc(X)).horiz + X.horiz)) <= 1e-12
            assert np.max(np.abs(Jn(Jn(X)).horiz + X.horiz)) <= 1e-12
            assert np.max(np.abs(P(Jc(X)).horiz - Jn(X).horiz)) <= 1e-12
            assert np.max(np.abs(Jc(P(X)).horiz - Jn(X).horiz)) <= 1e-12


class TestIsometries:
    def test_conjugation_action(self):
        F = cp3.Isometry(E, 1)
        v = (E[0] + 1j * E[2]) / math.sqrt(2)
        out = F.apply(cp3.Point(v))
        assert out.distance(cp3.Point((E[0] - 1j * E[2]) / math.sqrt(2))) <= 1e-15

    def test_phase_matrix_fixes_first_point(self):
        F = cp3.Isometry(np.diag([1j, -1j, 1j, -1j]), 0)
        assert F.apply(P1).distance(P1) <= 1e-15

    def test_rejects_non_symplectic(self):
        with pytest.raises(NotAnIsometryError):
            cp3.Isometry(np.diag([1j, 1j, 1.0, 1.0]), 0)

    def test_compose_with_conjugation(self):
        F = cp3.random_isometry(RNG)
        A_only = cp3.Isometry(F.A, 0)
        conj = cp3.Isometry(E, 1)
        out = A_only.compose(conj)
        assert out.k == 1
        assert min(np.max(np.abs(out.A - F.A.conj())),
                   np.max(np.abs(out.A + F.A.conj()))) <= 1e-14
        pt = cp3.random_point(RNG)
        assert out.apply(pt).distance(A_only.apply(conj.apply(pt))) <= 1e-12

    def test_metric_and_splitting_preserved(self):
        for _ in range(200):
            F = cp3.random_isometry(RNG)
            pt = cp3.random_point(RNG)
            X, Y = cp3.random_tangent(RNG, pt), cp3.random_tangent(RNG, pt)
            dX, dY = F.differential(X), F.differential(Y)
            assert abs(cp3.metric(dX, dY) - cp3.metric(X, Y)) <= 1e-10
            assert np.max(np.abs(F.differential(cp3.Tangent(pt, X.d4)).d2)) <= 1e-10
            assert np.max(np.abs(F.differential(cp3.Tangent(pt, X.d2)).d4)) <= 1e-10

    def test_random_symplectic_membership(self):
        for _ in range(300):
            assert group_membership(cp3.random_isometry(RNG).A, "symplectic-unitary", 1e-9)

    def test_group_axioms(self):
        e = cp3.identity_isometry()
        for _ in range(200):
            F1, F2, F3 = (cp3.random_isometry(RNG) for _ in range(3))
            assert F1.compose(F2).compose(F3).distance(F1.compose(F2.compose(F3))) <= 1e-12
            assert F1.compose(F1.inverse()).distance(e) <= 1e-12
            pt = cp3.random_point(RNG)
            assert F1.compose(F2).apply(pt).distance(F1.apply(F2.apply(pt))) <= 1e-12


class TestPhaseCorrection:
    def test_symplectic_input_returns_itself(self):
        A = cp3.random_isometry(RNG).A
        out = cp3.nk_isometry_from_unitary(A)
        assert out is not None and out.distance(cp3.Isometry(A, 0)) <= 1e-12

    def test_global_phase_is_removed(self):
        A = cp3.random_isometry(RNG).A
        out = cp3.nk_isometry_from_unitary(np.exp(0.37j) * A)
        pt = cp3.random_point(RNG)
        assert out.apply(pt).distance(cp3.Isometry(A, 0).apply(pt)) <= 1e-12

    def test_scalar_i_maps_to_identity_class(self):
        out = cp3.nk_isometry_from_unitary(1j * E)
        assert out is not None
        assert out.apply(P1).distance(P1) <= 1e-14

    def test_broken_pairing_returns_none(self):
        assert cp3.nk_isometry_from_unitary(np.diag([1, 1, 1, np.exp(0.7j)])) is None

    def test_non_unitary_raises(self):
        with pytest.raises(NotAnIsometryError):
            cp3.nk_isometry_from_unitary(2.0 * E)


class TestOracle:
    def test_nearly_kahler_defect(self):
        for _ in range(10):
            met, jf = cp3.chart_fields(cp3.random_point(RNG), "nk")
            g0 = met.components(np.zeros(6))
            T = kernels.nabla_structure(met, jf, np.zeros(6))
            x = RNG.standard_normal(6)
            v = np.einsum("ikj,i,j->k", T, x, x)
            assert math.sqrt(max(v @ g0 @ v, 0.0)) / (x @ g0 @ x) <= 1e-5
            assert np.max(np.abs(T)) > 0.1  # strictness: the full tensor is O(1)

    def test_kahler_pair_has_vanishing_nabla(self):
        for _ in range(10):
            met, jf = cp3.chart_fields(cp3.random_point(RNG), "fs")
            T = kernels.nabla_structure(met, jf, np.zeros(6))
            assert np.max(np.abs(T)) <= 1e-5

    def test_numeric_curvature_symmetries(self):
        met, _ = cp3.chart_fields(cp3.random_point(RNG), "nk")
        R = oracle.riemann_numeric(met, np.zeros(6))
        Rl = oracle.lower_curvature(met, np.zeros(6), R)
        scale = np.abs(Rl).max()
        assert np.abs(Rl + np.einsum("jikl->ijkl", Rl)).max() / scale <= 1e-3
        assert np.abs(Rl + np.einsum("ijlk->ijkl", Rl)).max() / scale <= 1e-3
        cyc = Rl + np.einsum("jkil->ijkl", Rl) + np.einsum("kijl->ijkl", Rl)
        assert np.abs(cyc).max() / scale <= 1e-3
