import numpy as np
import pytest

from nksix import s3s3
from nksix.errors import NotAnIsometryError
from nksix.quaternions import I, J as JQ, K, ONE, Quaternion, im

RNG = np.random.default_rng(np.random.Philox(31337))
BASE = s3s3.BASE_POINT
ZERO = im(0, 0, 0)


def test_identity_action():
    F = s3s3.identity_isometry()
    pt = s3s3.random_point(RNG)
    assert F.apply(pt).distance(pt) == 0.0


def test_translation_action_example():
    F = s3s3.Isometry(I, JQ, K, 0, 0)
    img = F.apply(BASE)
    # i * k^{-1} = j and j * k^{-1} = -i
    assert (img.p - JQ).norm() <= 1e-15
    assert (img.q + I).norm() <= 1e-15


def test_permutation_map_formulas():
    """Each of the six maps realizes one of the closed-form point formulas;
    the (kappa, tau) label is pinned by the structure relations."""
    p, q = Quaternion.exp_imag(0.3, -0.2, 0.5), Quaternion.exp_imag(-0.4, 0.1, 0.8)
    pt = s3s3.Point(p, q)
    pi, qi = p.inverse(), q.inverse()
    expected = {
        (0, 0): (p, q),
        (1, 0): (q, p),
        (0, 1): (q * pi, pi),
        (1, 1): (pi, q * pi),
        (0, 2): (qi, p * qi),
        (1, 2): (p * qi, qi),
    }
    for (kappa, t), (ep, eq) in expected.items():
        img = s3s3.psi_apply(kappa, t, pt)
        assert (img.p - ep).norm() <= 1e-15
        assert (img.q - eq).norm() <= 1e-15


def test_differential_of_conjugating_translation():
    F = s3s3.Isometry(ONE, ONE, K, 0, 0)
    X = s3s3.Tangent(BASE, I, ZERO)
    out = F.differential(X)
    assert (out.alpha + I).norm() <= 1e-15  # k i k^{-1} = -i
    assert out.beta.norm() <= 1e-15


def test_differential_matches_finite_differences():
    eps = 1e-6
    for _ in range(25):
        F = s3s3.random_isometry(RNG)
        pt = s3s3.random_point(RNG)
        X = s3s3.random_tangent(RNG, pt)
        out = F.differential(X)
        img = F.apply(pt)

        def curve(t):
            e = Quaternion.exp_imag
            return s3s3.Point(
                (pt.p * e(*[t * c for c in X.alpha.imag])).normalized(),
                (pt.q * e(*[t * c for c in X.beta.imag])).normalized(),
            )

        plus, minus = F.apply(curve(eps)), F.apply(curve(-eps))
        vel_p = (plus.p - minus.p).scale(1.0 / (2.0 * eps))
        vel_q = (plus.q - minus.q).scale(1.0 / (2.0 * eps))
        assert (img.p * out.alpha - vel_p).norm() <= 1e-6
        assert (img.q * out.beta - vel_q).norm() <= 1e-6


def test_structure_relations_of_permutation_maps():
    for kappa in (0, 1):
        for t in (0, 1, 2):
            for _ in range(40):
                pt = s3s3.random_point(RNG)
                X = s3s3.random_tangent(RNG, pt)
                jd = s3s3.almost_complex(s3s3.psi_push(kappa, t, X))
                dj = s3s3.psi_push(kappa, t, s3s3.almost_complex(X))
                assert (jd - dj.scale((-1.0) ** kappa)).norm() <= 1e-12
                pd = s3s3.product_structure(s3s3.psi_push(kappa, t, X))
                dp = s3s3.psi_push(kappa, t, s3s3.product_structure(X, t))
                assert (pd - dp).norm() <= 1e-12


def test_compose_with_identity():
    F = s3s3.random_isometry(RNG)
    e = s3s3.identity_isometry()
    assert F.compose(e).distance(F) <= 1e-15
    assert e.compose(F).distance(F) <= 1e-15


def test_swap_composed_with_itself_is_identity():
    swap = s3s3.Isometry(ONE, ONE, ONE, 1, 0)
    out = swap.compose(swap)
    assert out.distance(s3s3.identity_isometry()) <= 1e-15


def test_action_compatibility_fuzz():
    for _ in range(200):
        F1, F2 = s3s3.random_isometry(RNG), s3s3.random_isometry(RNG)
        pt = s3s3.random_point(RNG)
        assert F1.compose(F2).apply(pt).distance(F1.apply(F2.apply(pt))) <= 1e-12


def test_group_axioms_fuzz():
    e = s3s3.identity_isometry()
    for _ in range(200):
        F1, F2, F3 = (s3s3.random_isometry(RNG) for _ in range(3))
        assert F1.compose(F2).compose(F3).distance(F1.compose(F2.compose(F3))) <= 1e-12
        assert F1.compose(F1.inverse()).distance(e) <= 1e-12
        assert F1.inverse().compose(F1).distance(e) <= 1e-12


def test_sign_quotient_equality():
    F = s3s3.random_isometry(RNG)
    G = s3s3.Isometry(-F.a, -F.b, -F.c, F.kappa, F.tau_idx)
    assert F.distance(G) == 0.0
    pt = s3s3.random_point(RNG)
    assert F.apply(pt).distance(G.apply(pt)) == 0.0


class TestDecomposition:
    def test_identity_oracle(self):
        out = s3s3.decompose_isometry(s3s3.element_oracle(s3s3.identity_isometry()))
        assert out.distance(s3s3.identity_isometry()) <= 1e-12

    def test_specific_element(self):
        F = s3s3.Isometry(I, JQ, K, 1, 1)
        out = s3s3.decompose_isometry(s3s3.element_oracle(F))
        assert out.distance(F) <= 1e-10

    def test_random_round_trips(self):
        worst = 0.0
        for _ in range(200):
            F = s3s3.random_isometry(RNG)
            G = s3s3.decompose_isometry(s3s3.element_oracle(F))
            assert (G.kappa, G.tau_idx) == (F.kappa, F.tau_idx)
            worst = max(worst, F.distance(G))
        assert worst <= 1e-8

    def test_rejects_non_isometry(self):
        F = s3s3.random_isometry(RNG)
        fake = s3s3.IsometryOracle(
            apply=F.apply,
            differential=lambda X: F.differential(X.scale(1.1)),
        )
        with pytest.raises(NotAnIsometryError):
            s3s3.decompose_isometry(fake)

    def test_pointwise_defect_of_recovered_element(self):
        F = s3s3.random_isometry(RNG)
        oracle = s3s3.element_oracle(F)
        G = s3s3.decompose_isometry(oracle)
        assert s3s3.pointwise_defect(G, oracle, 16, RNG) <= 1e-12
