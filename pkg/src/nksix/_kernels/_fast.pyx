# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel backend.

Mirrors the pure NumPy module: chart metric/structure evaluators for the
three spaces plus the central-difference stencils, with the inner loops in
C.  Python-callable fields fall back to the pure implementation.
"""

cimport cython
from libc.math cimport cos, fabs, sin, sqrt

import numpy as np

cimport numpy as cnp

cnp.import_array()

from ..errors import SingularMetricError
from . import pure

BACKEND = "compiled"

ctypedef double complex cplx

# constant tables copied from the reference backend at import time
cdef double _FLAG_M_RE[6][9]
cdef double _FLAG_M_IM[6][9]
cdef cplx _FLAG_M[6][9]
cdef cplx _FLAG_M2[6][9]

def _init_tables():
    basis = pure.FLAG_BASIS
    sq = np.array([m @ m for m in basis])
    for i in range(6):
        for a in range(3):
            for b in range(3):
                _FLAG_M[i][3 * a + b] = basis[i, a, b]
                _FLAG_M2[i][3 * a + b] = sq[i, a, b]

_init_tables()


# ---------------------------------------------------------------------------
# small dense solves
# ---------------------------------------------------------------------------

cdef int _solve6(double* A, double* B, int nrhs) noexcept nogil:
    """Solve A X = B in place (A destroyed, X left in B); 0 ok, -1 singular."""
    cdef int i, j, k, p
    cdef double piv, f, tmp
    for k in range(6):
        p = k
        piv = fabs(A[6 * k + k])
        for i in range(k + 1, 6):
            if fabs(A[6 * i + k]) > piv:
                p = i
                piv = fabs(A[6 * i + k])
        if piv < 1e-280:
            return -1
        if p != k:
            for j in range(6):
                tmp = A[6 * k + j]; A[6 * k + j] = A[6 * p + j]; A[6 * p + j] = tmp
            for j in range(nrhs):
                tmp = B[nrhs * k + j]; B[nrhs * k + j] = B[nrhs * p + j]; B[nrhs * p + j] = tmp
        for i in range(k + 1, 6):
            f = A[6 * i + k] / A[6 * k + k]
            for j in range(k, 6):
                A[6 * i + j] -= f * A[6 * k + j]
            for j in range(nrhs):
                B[nrhs * i + j] -= f * B[nrhs * k + j]
    for k in range(5, -1, -1):
        for j in range(nrhs):
            f = B[nrhs * k + j]
            for i in range(k + 1, 6):
                f -= A[6 * k + i] * B[nrhs * i + j]
            B[nrhs * k + j] = f / A[6 * k + k]
    return 0


# ---------------------------------------------------------------------------
# field base classes
# ---------------------------------------------------------------------------

cdef class MetricField:
    cdef public int dim

    def __cinit__(self):
        self.dim = 6

    cdef int c_components(self, double* x, double* out) except -1:
        raise NotImplementedError

    def components(self, x):
        cdef double[::1] xv = np.ascontiguousarray(x, dtype=float)
        out = np.empty((6, 6))
        cdef double[:, ::1] ov = out
        self.c_components(&xv[0], &ov[0, 0])
        return out


cdef class StructureField:
    cdef public int dim

    def __cinit__(self):
        self.dim = 6

    cdef int c_matrix(self, double* x, double* out) except -1:
        raise NotImplementedError

    def matrix(self, x):
        cdef double[::1] xv = np.ascontiguousarray(x, dtype=float)
        out = np.empty((6, 6))
        cdef double[:, ::1] ov = out
        self.c_matrix(&xv[0], &ov[0, 0])
        return out


# ---------------------------------------------------------------------------
# product of spheres
# ---------------------------------------------------------------------------

cdef void _qmul(double* a, double* b, double* out) noexcept nogil:
    out[0] = a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3]
    out[1] = a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2]
    out[2] = a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1]
    out[3] = a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0]


cdef void _half_frame(double y0, double y1, double y2, double* a) noexcept nogil:
    """Rows of a (3x3): imaginary parts of the chart partials."""
    cdef double e2[4], e3[4], s2[4], u[4], t1[4], t2[4], cj[4]
    cdef int i
    e2[0] = cos(y1); e2[1] = 0.0; e2[2] = sin(y1); e2[3] = 0.0
    e3[0] = cos(y2); e3[1] = 0.0; e3[2] = 0.0; e3[3] = sin(y2)
    _qmul(e2, e3, s2)
    u[0] = 0.0; u[1] = 1.0; u[2] = 0.0; u[3] = 0.0
    cj[0] = s2[0]; cj[1] = -s2[1]; cj[2] = -s2[2]; cj[3] = -s2[3]
    _qmul(u, s2, t1); _qmul(cj, t1, t2)
    a[0] = t2[1]; a[1] = t2[2]; a[2] = t2[3]
    u[1] = 0.0; u[2] = 1.0
    cj[0] = e3[0]; cj[1] = -e3[1]; cj[2] = -e3[2]; cj[3] = -e3[3]
    _qmul(u, e3, t1); _qmul(cj, t1, t2)
    a[3] = t2[1]; a[4] = t2[2]; a[5] = t2[3]
    a[6] = 0.0; a[7] = 0.0; a[8] = 1.0


cdef void _s3s3_frame(double* x, double* F) noexcept nogil:
    """F[6][6] column i = coefficient vector of chart partial i."""
    cdef double a[9], b[9]
    cdef int i, c
    _half_frame(x[0], x[1], x[2], a)
    _half_frame(x[3], x[4], x[5], b)
    for i in range(36):
        F[i] = 0.0
    for i in range(3):
        for c in range(3):
            F[6 * c + i] = a[3 * i + c]
            F[6 * (c + 3) + (i + 3)] = b[3 * i + c]


cdef class S3S3MetricField(MetricField):
    cdef double p0[4], q0[4]

    def __init__(self, p0, q0):
        for i in range(4):
            self.p0[i] = p0[i]
            self.q0[i] = q0[i]

    cdef int c_components(self, double* x, double* out) except -1:
        cdef double F[36]
        cdef double dot
        cdef int i, j, c
        _s3s3_frame(x, F)
        for i in range(6):
            for j in range(6):
                dot = 0.0
                for c in range(6):
                    dot += F[6 * c + i] * (
                        (4.0 / 3.0) * F[6 * c + j]
                        - (2.0 / 3.0) * F[6 * ((c + 3) % 6) + j]
                    )
                out[6 * i + j] = dot
        return 0


cdef class S3S3StructureField(StructureField):
    def __init__(self, p0, q0):
        pass

    cdef int c_matrix(self, double* x, double* out) except -1:
        cdef double F[36], B[36]
        cdef double s3 = sqrt(3.0)
        cdef int c, i
        _s3s3_frame(x, F)
        for c in range(3):
            for i in range(6):
                B[6 * c + i] = (-F[6 * c + i] + 2.0 * F[6 * (c + 3) + i]) / s3
                B[6 * (c + 3) + i] = (-2.0 * F[6 * c + i] + F[6 * (c + 3) + i]) / s3
        if _solve6(F, B, 6) != 0:
            raise SingularMetricError("chart frame is numerically dependent")
        for i in range(36):
            out[i] = B[i]
        return 0


def s3s3_metric_field(p0, q0):
    return S3S3MetricField(np.asarray(p0, dtype=float), np.asarray(q0, dtype=float))


def s3s3_structure_field(p0, q0):
    return S3S3StructureField(p0, q0)


# ---------------------------------------------------------------------------
# complex projective space
# ---------------------------------------------------------------------------

cdef void _jvec(cplx* r, cplx* jr) noexcept nogil:
    jr[0] = r[1].conjugate()
    jr[1] = -r[0].conjugate()
    jr[2] = r[3].conjugate()
    jr[3] = -r[2].conjugate()


cdef class _CP3Base:
    cdef cplx rep0[4]
    cdef cplx basis[6][4]

    cdef void _setup(self, rep0, basis):
        cdef int i, m
        for m in range(4):
            self.rep0[m] = rep0[m]
        for i in range(6):
            for m in range(4):
                self.basis[i][m] = basis[i, m]

    cdef void c_geo(self, double* x, cplx* r, cplx* u, cplx* d2) noexcept nogil:
        cdef cplx v[4], jr[4]
        cdef cplx acc
        cdef double n2 = 0.0, n, re
        cdef int i, m
        for m in range(4):
            v[m] = self.rep0[m]
            for i in range(6):
                v[m] = v[m] + x[i] * self.basis[i][m]
        for m in range(4):
            n2 += v[m].real * v[m].real + v[m].imag * v[m].imag
        n = sqrt(n2)
        for m in range(4):
            r[m] = v[m] / n
        for i in range(6):
            re = 0.0
            for m in range(4):
                re += (v[m].conjugate() * self.basis[i][m]).real
            for m in range(4):
                u[4 * i + m] = self.basis[i][m] / n - v[m] * (re / (n * n2))
            acc = 0
            for m in range(4):
                acc = acc + u[4 * i + m] * r[m].conjugate()
            for m in range(4):
                u[4 * i + m] = u[4 * i + m] - acc * r[m]
        _jvec(r, jr)
        for i in range(6):
            acc = 0
            for m in range(4):
                acc = acc + u[4 * i + m] * jr[m].conjugate()
            for m in range(4):
                d2[4 * i + m] = acc * jr[m]


cdef class CP3MetricField(MetricField):
    cdef _CP3Base geo
    cdef double weight

    def __init__(self, rep0, basis, rescale):
        self.geo = _CP3Base()
        self.geo._setup(np.asarray(rep0, dtype=complex), np.asarray(basis, dtype=complex))
        self.weight = 2.0 if rescale else 1.0

    cdef int c_components(self, double* x, double* out) except -1:
        cdef cplx r[4], u[24], d2[24]
        cdef cplx a, b
        cdef double g2, g4
        cdef int i, j, m
        self.geo.c_geo(x, r, u, d2)
        for i in range(6):
            for j in range(i, 6):
                g2 = 0.0
                g4 = 0.0
                for m in range(4):
                    a = d2[4 * i + m]
                    b = d2[4 * j + m]
                    g2 += a.real * b.real + a.imag * b.imag
                    a = u[4 * i + m] - d2[4 * i + m]
                    b = u[4 * j + m] - d2[4 * j + m]
                    g4 += a.real * b.real + a.imag * b.imag
                out[6 * i + j] = g2 + self.weight * g4
                out[6 * j + i] = out[6 * i + j]
        return 0


cdef class CP3StructureField(StructureField):
    cdef _CP3Base geo
    cdef bint nk

    def __init__(self, rep0, basis, which):
        if which not in ("jcirc", "jnk"):
            raise ValueError("which must be 'jcirc' or 'jnk'")
        self.geo = _CP3Base()
        self.geo._setup(np.asarray(rep0, dtype=complex), np.asarray(basis, dtype=complex))
        self.nk = which == "jnk"

    cdef int c_matrix(self, double* x, double* out) except -1:
        cdef cplx r[4], u[24], d2[24], s[24], jr[4]
        cdef cplx acc
        cdef double gram[36], rhs[36]
        cdef int i, j, m
        self.geo.c_geo(x, r, u, d2)
        _jvec(r, jr)
        for j in range(6):
            for m in range(4):
                s[4 * j + m] = 1j * u[4 * j + m]
            acc = 0
            for m in range(4):
                acc = acc + s[4 * j + m] * r[m].conjugate()
            for m in range(4):
                s[4 * j + m] = s[4 * j + m] - acc * r[m]
            if self.nk:
                acc = 0
                for m in range(4):
                    acc = acc + s[4 * j + m] * jr[m].conjugate()
                for m in range(4):
                    s[4 * j + m] = s[4 * j + m] - 2.0 * acc * jr[m]
        for i in range(6):
            for j in range(6):
                gram[6 * i + j] = 0.0
                rhs[6 * i + j] = 0.0
                for m in range(4):
                    gram[6 * i + j] += (u[4 * i + m].conjugate() * u[4 * j + m]).real
                    rhs[6 * i + j] += (u[4 * i + m].conjugate() * s[4 * j + m]).real
        if _solve6(gram, rhs, 6) != 0:
            raise SingularMetricError("horizontal frame is numerically dependent")
        for i in range(36):
            out[i] = rhs[i]
        return 0


def cp3_metric_field(rep0, basis, rescale=True):
    return CP3MetricField(rep0, basis, rescale)


def cp3_structure_field(rep0, basis, which):
    return CP3StructureField(rep0, basis, which)


# ---------------------------------------------------------------------------
# flag space
# ---------------------------------------------------------------------------

cdef void _m3mul(cplx* a, cplx* b, cplx* out) noexcept nogil:
    cdef int i, j, k
    for i in range(3):
        for j in range(3):
            out[3 * i + j] = 0
            for k in range(3):
                out[3 * i + j] = out[3 * i + j] + a[3 * i + k] * b[3 * k + j]


cdef void _flag_frame_coeffs(double* x, double* C) noexcept nogil:
    """C[i][j]: coefficient of frame partial i against generator j."""
    cdef cplx suffix[9], xis[6][9], E[9], tmp[9], prod[9]
    cdef cplx tr
    cdef double s, c1
    cdef int i, j, a, b
    for i in range(9):
        suffix[i] = 0
    suffix[0] = suffix[4] = suffix[8] = 1
    for i in range(5, -1, -1):
        # xis[i] = suffix^H M_i suffix
        for a in range(3):
            for b in range(3):
                tmp[3 * a + b] = suffix[3 * b + a].conjugate()
        _m3mul(tmp, _FLAG_M[i], prod)
        _m3mul(prod, suffix, xis[i])
        s = sin(x[i])
        c1 = 1.0 - cos(x[i])
        for j in range(9):
            E[j] = s * _FLAG_M[i][j] + c1 * _FLAG_M2[i][j]
        E[0] = E[0] + 1; E[4] = E[4] + 1; E[8] = E[8] + 1
        _m3mul(E, suffix, tmp)
        for j in range(9):
            suffix[j] = tmp[j]
    for i in range(6):
        for j in range(6):
            tr = 0
            for a in range(3):
                for b in range(3):
                    tr = tr + xis[i][3 * a + b] * _FLAG_M[j][3 * b + a]
            C[6 * i + j] = -0.5 * tr.real


cdef class FlagMetricField(MetricField):
    cdef double weights[6]

    def __init__(self, U0, weighted_block=-1):
        cdef int i
        for i in range(6):
            self.weights[i] = 1.0
        if weighted_block >= 0:
            self.weights[2 * weighted_block] = 2.0
            self.weights[2 * weighted_block + 1] = 2.0

    cdef int c_components(self, double* x, double* out) except -1:
        cdef double C[36]
        cdef double acc
        cdef int i, j, k
        _flag_frame_coeffs(x, C)
        for i in range(6):
            for j in range(i, 6):
                acc = 0.0
                for k in range(6):
                    acc += self.weights[k] * C[6 * i + k] * C[6 * j + k]
                out[6 * i + j] = acc
                out[6 * j + i] = acc
        return 0


cdef class FlagStructureField(StructureField):
    cdef double signs[3]

    def __init__(self, U0, which=0):
        cdef int b
        for b in range(3):
            self.signs[b] = 1.0 if which == 0 else -1.0
        if which > 0:
            self.signs[which - 1] = 1.0

    cdef int c_matrix(self, double* x, double* out) except -1:
        cdef double C[36], F[36], B[36]
        cdef int i, c, b
        _flag_frame_coeffs(x, C)
        for i in range(6):
            for c in range(6):
                F[6 * c + i] = C[6 * i + c]
        for b in range(3):
            for i in range(6):
                B[6 * (2 * b) + i] = -self.signs[b] * F[6 * (2 * b + 1) + i]
                B[6 * (2 * b + 1) + i] = self.signs[b] * F[6 * (2 * b) + i]
        if _solve6(F, B, 6) != 0:
            raise SingularMetricError("chart frame is numerically dependent")
        for i in range(36):
            out[i] = B[i]
        return 0


def flag_metric_field(U0, weighted_block=-1):
    return FlagMetricField(U0, weighted_block)


def flag_structure_field(U0, which=0):
    return FlagStructureField(U0, which)


callback_metric_field = pure.callback_metric_field
callback_structure_field = pure.callback_structure_field


# ---------------------------------------------------------------------------
# stencils
# ---------------------------------------------------------------------------

cdef int _d_metric(MetricField f, double* x, int i, double h, bint rich,
                   double* out) except -1:
    cdef double xp[6], ga[36], gb[36]
    cdef int j
    cdef double s = 0.5 * h if rich else h
    for j in range(6):
        xp[j] = x[j]
    xp[i] = x[i] + s
    f.c_components(xp, ga)
    xp[i] = x[i] - s
    f.c_components(xp, gb)
    for j in range(36):
        out[j] = (ga[j] - gb[j]) / (2.0 * s)
    if not rich:
        return 0
    xp[i] = x[i] + h
    f.c_components(xp, ga)
    xp[i] = x[i] - h
    f.c_components(xp, gb)
    for j in range(36):
        out[j] = (4.0 * out[j] - (ga[j] - gb[j]) / (2.0 * h)) / 3.0
    return 0


cdef int _christoffel_c(MetricField f, double* x, double h, bint rich,
                        double* gamma) except -1:
    cdef double g0[36], ginv[36], dg[216]
    cdef double acc
    cdef int i, j, k, l
    f.c_components(x, g0)
    for i in range(36):
        ginv[i] = 0.0
    for i in range(6):
        ginv[6 * i + i] = 1.0
    if _solve6(g0, ginv, 6) != 0:
        raise SingularMetricError("metric is numerically singular")
    for i in range(6):
        _d_metric(f, x, i, h, rich, &dg[36 * i])
    for k in range(6):
        for i in range(6):
            for j in range(6):
                acc = 0.0
                for l in range(6):
                    acc += ginv[6 * k + l] * (
                        dg[36 * i + 6 * j + l]
                        + dg[36 * j + 6 * i + l]
                        - dg[36 * l + 6 * i + j]
                    )
                gamma[36 * k + 6 * i + j] = 0.5 * acc
    return 0


cdef int _d_christoffel(MetricField f, double* x, int i, double h, bint rich,
                        double* out) except -1:
    cdef double xp[6], ga[216], gb[216]
    cdef int j
    cdef double s = 0.5 * h if rich else h
    for j in range(6):
        xp[j] = x[j]
    xp[i] = x[i] + s
    _christoffel_c(f, xp, h, rich, ga)
    xp[i] = x[i] - s
    _christoffel_c(f, xp, h, rich, gb)
    for j in range(216):
        out[j] = (ga[j] - gb[j]) / (2.0 * s)
    if not rich:
        return 0
    xp[i] = x[i] + h
    _christoffel_c(f, xp, h, rich, ga)
    xp[i] = x[i] - h
    _christoffel_c(f, xp, h, rich, gb)
    for j in range(216):
        out[j] = (4.0 * out[j] - (ga[j] - gb[j]) / (2.0 * h)) / 3.0
    return 0


def _check_step(double h):
    if not (1e-5 <= h <= 1e-2):
        raise ValueError(f"step {h} outside the supported range [1e-5, 1e-2]")


def christoffel(field, x, double h=1e-3, bint richardson=True):
    """Levi-Civita symbols Gamma[k, i, j] in chart coordinates."""
    _check_step(h)
    if not isinstance(field, MetricField):
        return pure.christoffel(field, x, h, richardson)
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=float)
    out = np.empty((6, 6, 6))
    cdef double[:, :, ::1] ov = out
    _christoffel_c(<MetricField>field, &xv[0], h, richardson, &ov[0, 0, 0])
    return out


def riemann(field, x, double h=1e-3, bint richardson=True):
    """Curvature R[i, j, k, l] = (R(d_i, d_j) d_k)^l from the symbol field."""
    _check_step(h)
    if not isinstance(field, MetricField):
        return pure.riemann(field, x, h, richardson)
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=float)
    cdef double gamma0[216]
    cdef double dgamma[1296]
    cdef int i, j, k, l, m
    cdef double acc
    cdef MetricField f = <MetricField>field
    _christoffel_c(f, &xv[0], h, richardson, gamma0)
    for i in range(6):
        _d_christoffel(f, &xv[0], i, h, richardson, &dgamma[216 * i])
    out = np.empty((6, 6, 6, 6))
    cdef double[:, :, :, ::1] ov = out
    for i in range(6):
        for j in range(6):
            for k in range(6):
                for l in range(6):
                    acc = (dgamma[216 * i + 36 * l + 6 * j + k]
                           - dgamma[216 * j + 36 * l + 6 * i + k])
                    for m in range(6):
                        acc += (gamma0[36 * l + 6 * i + m] * gamma0[36 * m + 6 * j + k]
                                - gamma0[36 * l + 6 * j + m] * gamma0[36 * m + 6 * i + k])
                    ov[i, j, k, l] = acc
    return out


def nabla_structure(mfield, sfield, x, double h=1e-3, bint richardson=True):
    """Covariant derivative T[i] = (nabla_i J) as matrices acting on vectors."""
    _check_step(h)
    if not (isinstance(mfield, MetricField) and isinstance(sfield, StructureField)):
        return pure.nabla_structure(mfield, sfield, x, h, richardson)
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=float)
    cdef double gamma[216], J0[36], dJ[36], xp[6], ja[36], jb[36]
    cdef MetricField mf = <MetricField>mfield
    cdef StructureField sf = <StructureField>sfield
    cdef int i, j, k, l
    cdef double acc, s
    _christoffel_c(mf, &xv[0], h, richardson, gamma)
    sf.c_matrix(&xv[0], J0)
    out = np.empty((6, 6, 6))
    cdef double[:, :, ::1] ov = out
    for i in range(6):
        s = 0.5 * h if richardson else h
        for j in range(6):
            xp[j] = xv[j]
        xp[i] = xv[i] + s
        sf.c_matrix(xp, ja)
        xp[i] = xv[i] - s
        sf.c_matrix(xp, jb)
        for j in range(36):
            dJ[j] = (ja[j] - jb[j]) / (2.0 * s)
        if richardson:
            xp[i] = xv[i] + h
            sf.c_matrix(xp, ja)
            xp[i] = xv[i] - h
            sf.c_matrix(xp, jb)
            for j in range(36):
                dJ[j] = (4.0 * dJ[j] - (ja[j] - jb[j]) / (2.0 * h)) / 3.0
        for k in range(6):
            for j in range(6):
                acc = dJ[6 * k + j]
                for l in range(6):
                    acc += (gamma[36 * k + 6 * i + l] * J0[6 * l + j]
                            - gamma[36 * l + 6 * i + j] * J0[6 * k + l])
                ov[i, k, j] = acc
    return out
