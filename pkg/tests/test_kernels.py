"""Parity between the compiled kernel backend and the pure NumPy fallback."""

import numpy as np
import pytest

from nksix import cp3
from nksix._kernels import pure

fast = pytest.importorskip("nksix._kernels._fast")

RNG = np.random.default_rng(np.random.Philox(555))


@pytest.fixture(scope="module")
def chart_data():
    p0 = RNG.standard_normal(4)
    p0 /= np.linalg.norm(p0)
    q0 = RNG.standard_normal(4)
    q0 /= np.linalg.norm(q0)
    pt = cp3.random_point(RNG)
    basis = cp3.horizontal_basis(pt)
    U0 = np.eye(3, dtype=complex)
    return p0, q0, pt.rep, basis, U0


def points():
    yield np.zeros(6)
    for _ in range(5):
        yield 0.03 * RNG.standard_normal(6)


def test_s3s3_fields(chart_data):
    p0, q0, *_ = chart_data
    for x in points():
        a = pure.s3s3_metric_field(p0, q0).components(x)
        b = fast.s3s3_metric_field(p0, q0).components(x)
        assert np.max(np.abs(a - b)) <= 1e-14
        a = pure.s3s3_structure_field(p0, q0).matrix(x)
        b = fast.s3s3_structure_field(p0, q0).matrix(x)
        assert np.max(np.abs(a - b)) <= 1e-13


def test_cp3_fields(chart_data):
    *_, rep, basis, _U = chart_data
    for x in points():
        for rescale in (True, False):
            a = pure.cp3_metric_field(rep, basis, rescale).components(x)
            b = fast.cp3_metric_field(rep, basis, rescale).components(x)
            assert np.max(np.abs(a - b)) <= 1e-13
        for which in ("jnk", "jcirc"):
            a = pure.cp3_structure_field(rep, basis, which).matrix(x)
            b = fast.cp3_structure_field(rep, basis, which).matrix(x)
            assert np.max(np.abs(a - b)) <= 1e-12


def test_flag_fields(chart_data):
    *_, U0 = chart_data
    for x in points():
        for wb in (-1, 0, 1, 2):
            a = pure.flag_metric_field(U0, wb).components(x)
            b = fast.flag_metric_field(U0, wb).components(x)
            assert np.max(np.abs(a - b)) <= 1e-13
        for which in range(4):
            a = pure.flag_structure_field(U0, which).matrix(x)
            b = fast.flag_structure_field(U0, which).matrix(x)
            assert np.max(np.abs(a - b)) <= 1e-12


def test_stencil_parity(chart_data):
    p0, q0, rep, basis, U0 = chart_data
    x = 0.02 * RNG.standard_normal(6)
    pairs = [
        (pure.s3s3_metric_field(p0, q0), fast.s3s3_metric_field(p0, q0)),
        (pure.cp3_metric_field(rep, basis, True), fast.cp3_metric_field(rep, basis, True)),
        (pure.flag_metric_field(U0), fast.flag_metric_field(U0)),
    ]
    for mp, mf in pairs:
        gp = pure.christoffel(mp, x)
        gf = fast.christoffel(mf, x)
        assert np.max(np.abs(gp - gf)) <= 1e-9
        Rp = pure.riemann(mp, x)
        Rf = fast.riemann(mf, x)
        assert np.max(np.abs(Rp - Rf)) <= 1e-7


def test_nabla_parity(chart_data):
    p0, q0, rep, basis, U0 = chart_data
    x = np.zeros(6)
    trios = [
        (pure.s3s3_metric_field(p0, q0), pure.s3s3_structure_field(p0, q0),
         fast.s3s3_metric_field(p0, q0), fast.s3s3_structure_field(p0, q0)),
        (pure.cp3_metric_field(rep, basis, True), pure.cp3_structure_field(rep, basis, "jnk"),
         fast.cp3_metric_field(rep, basis, True), fast.cp3_structure_field(rep, basis, "jnk")),
        (pure.flag_metric_field(U0), pure.flag_structure_field(U0, 0),
         fast.flag_metric_field(U0), fast.flag_structure_field(U0, 0)),
    ]
    for mp, sp, mf, sf in trios:
        Tp = pure.nabla_structure(mp, sp, x)
        Tf = fast.nabla_structure(mf, sf, x)
        assert np.max(np.abs(Tp - Tf)) <= 1e-9


def test_compiled_backend_falls_back_for_callables():
    field = fast.callback_metric_field(lambda x: np.eye(6), 6)
    assert np.max(np.abs(fast.christoffel(field, np.zeros(6)))) <= 1e-12
    assert np.max(np.abs(fast.riemann(field, np.zeros(6)))) <= 1e-10
