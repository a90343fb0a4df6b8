import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nksix.errors import DegenerateBasisError, GramMismatchError
from nksix.quaternions import (
    I,
    J,
    K,
    ONE,
    Quaternion,
    canonical_sign,
    im,
    im_inner,
    random_unit_quaternion,
    rotation_to_quaternion,
    su2_lift_from_frames,
)

RNG = np.random.default_rng(np.random.Philox(1234))

coeff = st.floats(min_value=-3, max_value=3, allow_nan=False)
quat = st.builds(Quaternion, coeff, coeff, coeff, coeff)


def q_close(a, b, tol=1e-12):
    return (a - b).norm() <= tol


def test_identity_and_defining_relations():
    q = Quaternion(0.3, -1.2, 0.5, 2.0)
    assert q_close(ONE * q, q)
    assert q_close(q * ONE, q)
    assert q_close(I * J, K)
    assert q_close(J * K, I)
    assert q_close(K * I, J)
    assert q_close(I * I, -ONE)


def test_hamilton_product_hand_expansion():
    s = 1.0 / math.sqrt(2.0)
    a = Quaternion(s, s, 0.0, 0.0)
    b = Quaternion(s, 0.0, s, 0.0)
    expected = Quaternion(0.5, 0.5, 0.5, 0.5)
    assert q_close(a * b, expected)


@given(quat, quat, quat)
@settings(max_examples=200)
def test_associativity(a, b, c):
    lhs = (a * b) * c
    rhs = a * (b * c)
    assert (lhs - rhs).norm() <= 1e-12 * max(1.0, a.norm() * b.norm() * c.norm())


def test_associativity_defect_on_unit_triples():
    worst = 0.0
    for _ in range(1000):
        a, b, c = (random_unit_quaternion(RNG) for _ in range(3))
        worst = max(worst, ((a * b) * c - a * (b * c)).norm())
    assert worst <= 1e-13


@given(quat, quat)
@settings(max_examples=200)
def test_conjugation_reverses_products(a, b):
    assert q_close((a * b).conjugate(), b.conjugate() * a.conjugate(), 1e-10)


@given(quat, quat)
@settings(max_examples=200)
def test_norm_multiplicative(a, b):
    assert abs((a * b).norm() - a.norm() * b.norm()) <= 1e-10


def test_im_inner_values():
    assert im_inner(I, I) == 1.0
    assert im_inner(I, J) == 0.0
    assert im_inner(im(2, 1, 0), im(0, 1, -1)) == 1.0


def test_conjugation_preserves_imaginary_and_norm():
    for _ in range(1000):
        c = random_unit_quaternion(RNG)
        a = im(*RNG.standard_normal(3))
        r = a.conjugate_by(c)
        assert abs(r.w) <= 1e-12
        assert abs(r.norm() - a.norm()) <= 1e-12


def test_exp_imag_unit_norm():
    v = RNG.standard_normal(3)
    assert abs(Quaternion.exp_imag(*v).norm() - 1.0) <= 1e-14
    assert q_close(Quaternion.exp_imag(math.pi / 2, 0, 0), I, 1e-15)


def test_lift_identity_frames():
    frame = (I, J, K)
    assert q_close(su2_lift_from_frames(frame, frame), ONE)


def test_lift_half_turn_about_k():
    c = su2_lift_from_frames((I, J, K), (-I, -J, K))
    assert q_close(c, K)
    assert q_close(I.conjugate_by(K), -I)


def test_lift_round_trip_random():
    worst = 0.0
    base = (I, J, K)
    for _ in range(1000):
        c = random_unit_quaternion(RNG)
        betas = tuple(a.conjugate_by(c) for a in base)
        rec = su2_lift_from_frames(base, betas)
        err = min((rec - c).norm(), (rec + c).norm())
        worst = max(worst, err)
    assert worst <= 1e-10


def test_lift_generic_frames():
    for _ in range(200):
        alphas = tuple(im(*RNG.standard_normal(3)) for _ in range(3))
        c = random_unit_quaternion(RNG)
        betas = tuple(a.conjugate_by(c) for a in alphas)
        try:
            rec = su2_lift_from_frames(alphas, betas)
        except DegenerateBasisError:
            continue
        assert min((rec - c).norm(), (rec + c).norm()) <= 1e-8


def test_lift_gram_mismatch_raises():
    with pytest.raises(GramMismatchError):
        su2_lift_from_frames((I, J, K), (I.scale(2.0), J, K))


def test_lift_degenerate_basis_raises():
    with pytest.raises(DegenerateBasisError):
        su2_lift_from_frames((I, I, K), (I, I, K))


def test_rotation_extraction_near_pi():
    # Rotation by pi about an off-axis direction exercises the non-trace branch.
    axis = np.array([1.0, 1.0, 0.0]) / math.sqrt(2.0)
    c = Quaternion(0.0, axis[0], axis[1], 0.0)
    R = np.zeros((3, 3))
    for idx, e in enumerate((I, J, K)):
        R[:, idx] = e.conjugate_by(c).imag
    rec = rotation_to_quaternion(R)
    assert min((rec - c).norm(), (rec + c).norm()) <= 1e-12


def test_canonical_sign():
    q = Quaternion(-0.5, 0.5, 0.5, 0.5)
    assert canonical_sign(q).w == 0.5
    tiny = Quaternion(1e-12, -0.8, 0.0, 0.6)
    assert canonical_sign(tiny).x == 0.8
