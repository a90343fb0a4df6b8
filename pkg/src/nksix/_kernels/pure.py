"""Pure NumPy kernel backend.

Hot evaluators for chart-pulled-back metric and structure fields on the
three spaces, plus generic central-difference stencils (Christoffel
symbols, Riemann tensor, covariant derivative of an endomorphism field).
The compiled backend mirrors this module exactly; this one is the
reference implementation and the import-time fallback.

Chart conventions (shared with the space modules):

* product of spheres: x -> (p0 E1(x1) E2(x2) E3(x3), q0 E4(x4) E5(x5) E6(x6))
  with Ei the one-parameter groups of the imaginary units i, j, k;
* complex projective space: x -> class of normalize(p0 + sum x_i b_i) for a
  real-orthonormal horizontal basis b;
* flag space: x -> [U0 E1(x1) ... E6(x6)] with Ei = exp(x_i m_i) for the
  six off-diagonal generators m_i (closed Rodrigues form, m_i^3 = -m_i).

All chart partial derivatives are exact, so the only discretization error
is the outer difference stencil.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import SingularMetricError

BACKEND = "python"

_SQRT3 = math.sqrt(3.0)

# (alpha, beta) coefficient-space constants for the product of spheres.
_I3 = np.eye(3)
S3S3_METRIC = np.block([[(4.0 / 3.0) * _I3, (-2.0 / 3.0) * _I3],
                        [(-2.0 / 3.0) * _I3, (4.0 / 3.0) * _I3]])
S3S3_J = np.block([[-_I3, 2.0 * _I3], [-2.0 * _I3, _I3]]) / _SQRT3

# Off-diagonal su(3) generators spanning the reductive complement; the
# translated generators are a global orthonormal frame on the flag space.
FLAG_BASIS = np.array(
    [
        [[0, -1, 0], [1, 0, 0], [0, 0, 0]],
        [[0, 1j, 0], [1j, 0, 0], [0, 0, 0]],
        [[0, 0, 1], [0, 0, 0], [-1, 0, 0]],
        [[0, 0, 1j], [0, 0, 0], [1j, 0, 0]],
        [[0, 0, 0], [0, 0, -1], [0, 1, 0]],
        [[0, 0, 0], [0, 0, 1j], [0, 1j, 0]],
    ],
    dtype=complex,
)
_FLAG_BASIS_SQ = np.array([m @ m for m in FLAG_BASIS])

_FLAG_J = np.zeros((6, 6))
for _b in range(3):
    _FLAG_J[2 * _b, 2 * _b + 1] = -1.0
    _FLAG_J[2 * _b + 1, 2 * _b] = 1.0


def flag_structure_blocks(which: int) -> np.ndarray:
    """Constant coefficient matrix of J (which=0) or J_i (which=1..3)."""
    signs = np.ones(3) if which == 0 else -np.ones(3)
    if which > 0:
        signs[which - 1] = 1.0
    out = _FLAG_J.copy()
    for b in range(3):
        out[2 * b : 2 * b + 2, 2 * b : 2 * b + 2] *= signs[b]
    return out


_OMEGA4 = np.array(
    [[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]], dtype=complex
)


# ---------------------------------------------------------------------------
# field objects
# ---------------------------------------------------------------------------

class MetricField:
    dim = 6

    def components(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError


class StructureField:
    dim = 6

    def matrix(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError


class CallbackMetricField(MetricField):
    def __init__(self, fn, dim: int = 6):
        self._fn = fn
        self.dim = dim

    def components(self, x):
        return np.asarray(self._fn(np.asarray(x, dtype=float)), dtype=float)


class CallbackStructureField(StructureField):
    def __init__(self, fn, dim: int = 6):
        self._fn = fn
        self.dim = dim

    def matrix(self, x):
        return np.asarray(self._fn(np.asarray(x, dtype=float)), dtype=float)


# --- product of spheres ----------------------------------------------------

def _qmul(a, b):
    return np.array(
        [
            a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
            a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
            a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
            a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
        ]
    )


def _qconj(a):
    return np.array([a[0], -a[1], -a[2], -a[3]])


def _axis_rot(axis: int, t: float):
    out = np.zeros(4)
    out[0] = math.cos(t)
    out[axis] = math.sin(t)
    return out


def _half_frame(x3):
    """Imaginary parts of the exact chart partials of E1(x)E2(y)E3(z)."""
    e2 = _axis_rot(2, x3[1])
    e3 = _axis_rot(3, x3[2])
    s2 = _qmul(e2, e3)
    unit = np.zeros(4)
    a = np.empty((3, 3))
    unit[1] = 1.0
    a[0] = _qmul(_qconj(s2), _qmul(unit, s2))[1:]
    unit[1], unit[2] = 0.0, 1.0
    a[1] = _qmul(_qconj(e3), _qmul(unit, e3))[1:]
    a[2] = np.array([0.0, 0.0, 1.0])
    return a


class S3S3MetricField(MetricField):
    def __init__(self, p0, q0):
        self.p0 = np.asarray(p0, dtype=float)
        self.q0 = np.asarray(q0, dtype=float)

    def _frame(self, x):
        F = np.zeros((6, 6))
        F[:3, :3] = _half_frame(x[:3]).T
        F[3:, 3:] = _half_frame(x[3:]).T
        return F

    def components(self, x):
        F = self._frame(np.asarray(x, dtype=float))
        return F.T @ S3S3_METRIC @ F


class S3S3StructureField(StructureField):
    def __init__(self, p0, q0):
        self._met = S3S3MetricField(p0, q0)

    def matrix(self, x):
        F = self._met._frame(np.asarray(x, dtype=float))
        return np.linalg.solve(F, S3S3_J @ F)


def s3s3_metric_field(p0, q0) -> MetricField:
    return S3S3MetricField(p0, q0)


def s3s3_structure_field(p0, q0) -> StructureField:
    return S3S3StructureField(p0, q0)


# --- complex projective space ----------------------------------------------

class CP3Fields:
    """Shared chart geometry for the projective-space fields."""

    def __init__(self, rep0, basis):
        self.rep0 = np.asarray(rep0, dtype=complex)
        self.basis = np.asarray(basis, dtype=complex)

    def horizontal_frame(self, x):
        v = self.rep0 + x @ self.basis
        n2 = float(np.vdot(v, v).real)
        n = math.sqrt(n2)
        r = v / n
        # exact partials of v/|v| followed by removal of the fiber direction
        w = self.basis / n - np.outer((self.basis @ v.conj()).real / (n * n2), v)
        u = w - np.outer(w @ r.conj(), r)
        jr = _OMEGA4 @ r.conj()
        d2 = np.outer(u @ jr.conj(), jr)
        return r, u, d2


class CP3MetricField(MetricField):
    def __init__(self, rep0, basis, rescale: bool):
        self.geo = CP3Fields(rep0, basis)
        self.weight = 2.0 if rescale else 1.0

    def components(self, x):
        _, u, d2 = self.geo.horizontal_frame(np.asarray(x, dtype=float))
        d4 = u - d2
        g = (d2 @ d2.conj().T).real + self.weight * (d4 @ d4.conj().T).real
        return 0.5 * (g + g.T)


class CP3StructureField(StructureField):
    def __init__(self, rep0, basis, which: str):
        self.geo = CP3Fields(rep0, basis)
        if which not in ("jcirc", "jnk"):
            raise ValueError("which must be 'jcirc' or 'jnk'")
        self.which = which

    def matrix(self, x):
        r, u, d2 = self.geo.horizontal_frame(np.asarray(x, dtype=float))
        s = 1j * u
        s = s - np.outer(s @ r.conj(), r)
        if self.which == "jnk":
            jr = _OMEGA4 @ r.conj()
            s = s - 2.0 * np.outer(s @ jr.conj(), jr)
        gram = (u @ u.conj().T).real
        rhs = (s @ u.conj().T).real.T  # rhs[i, j] = <u_i, S(u_j)>
        return np.linalg.solve(gram, rhs)


def cp3_metric_field(rep0, basis, rescale: bool = True) -> MetricField:
    return CP3MetricField(rep0, basis, rescale)


def cp3_structure_field(rep0, basis, which: str) -> StructureField:
    return CP3StructureField(rep0, basis, which)


# --- flag space --------------------------------------------------------------

def _flag_rot(i: int, t: float):
    return np.eye(3, dtype=complex) + math.sin(t) * FLAG_BASIS[i] + (
        1.0 - math.cos(t)
    ) * _FLAG_BASIS_SQ[i]


class FlagMetricField(MetricField):
    """Pullback of the submersion metric; weighted_block in {0,1,2} doubles
    the metric on that vertical block (the Kahler companions), -1 keeps the
    nearly Kahler normalization."""

    def __init__(self, U0, weighted_block: int = -1):
        self.U0 = np.asarray(U0, dtype=complex)
        self.weights = np.ones(6)
        if weighted_block >= 0:
            self.weights[2 * weighted_block : 2 * weighted_block + 2] = 2.0

    def frame_coeffs(self, x):
        suffix = np.eye(3, dtype=complex)
        xis = [None] * 6
        for i in range(5, -1, -1):
            xis[i] = suffix.conj().T @ FLAG_BASIS[i] @ suffix
            suffix = _flag_rot(i, x[i]) @ suffix
        C = np.empty((6, 6))
        for i in range(6):
            for j in range(6):
                C[i, j] = -0.5 * np.trace(xis[i] @ FLAG_BASIS[j]).real
        return C

    def components(self, x):
        C = self.frame_coeffs(np.asarray(x, dtype=float))
        return (C * self.weights) @ C.T


class FlagStructureField(StructureField):
    def __init__(self, U0, which: int):
        self._met = FlagMetricField(U0)
        self.block = flag_structure_blocks(which)

    def matrix(self, x):
        C = self._met.frame_coeffs(np.asarray(x, dtype=float))
        F = C.T  # columns are frame coefficient vectors
        return np.linalg.solve(F, self.block @ F)


def flag_metric_field(U0, weighted_block: int = -1) -> MetricField:
    return FlagMetricField(U0, weighted_block)


def flag_structure_field(U0, which: int) -> StructureField:
    return FlagStructureField(U0, which)


def callback_metric_field(fn, dim: int = 6) -> MetricField:
    return CallbackMetricField(fn, dim)


def callback_structure_field(fn, dim: int = 6) -> StructureField:
    return CallbackStructureField(fn, dim)


# ---------------------------------------------------------------------------
# finite-difference stencils
# ---------------------------------------------------------------------------

def _check_step(h: float):
    if not (1e-5 <= h <= 1e-2):
        raise ValueError(f"step {h} outside the supported range [1e-5, 1e-2]")


def _derivative(fn, x, i, h, richardson):
    def central(s):
        xp = x.copy()
        xm = x.copy()
        xp[i] += s
        xm[i] -= s
        return (fn(xp) - fn(xm)) / (2.0 * s)

    if not richardson:
        return central(h)
    return (4.0 * central(0.5 * h) - central(h)) / 3.0


def metric_inverse(g: np.ndarray) -> np.ndarray:
    try:
        inv = np.linalg.inv(g)
    except np.linalg.LinAlgError as exc:
        raise SingularMetricError(str(exc)) from None
    if not np.all(np.isfinite(inv)) or np.abs(inv).max() > 1e12:
        raise SingularMetricError("metric is numerically singular")
    return inv


def christoffel(field: MetricField, x, h: float = 1e-3, richardson: bool = True):
    """Levi-Civita symbols Gamma[k, i, j] in chart coordinates."""
    _check_step(h)
    x = np.asarray(x, dtype=float)
    n = field.dim
    ginv = metric_inverse(field.components(x))
    dg = np.stack([_derivative(field.components, x, i, h, richardson) for i in range(n)])
    # dg[i, j, l] = d_i g_{jl}
    term = dg + np.einsum("jil->ijl", dg) - np.einsum("lij->ijl", dg)
    return 0.5 * np.einsum("kl,ijl->kij", ginv, term)


def riemann(field: MetricField, x, h: float = 1e-3, richardson: bool = True):
    """Curvature R[i, j, k, l] = (R(d_i, d_j) d_k)^l from the symbol field."""
    _check_step(h)
    x = np.asarray(x, dtype=float)
    n = field.dim
    gamma = christoffel(field, x, h, richardson)
    dgamma = np.stack(
        [
            _derivative(lambda y: christoffel(field, y, h, richardson), x, i, h, richardson)
            for i in range(n)
        ]
    )
    # dgamma[i, l, j, k] = d_i Gamma^l_{jk}
    R = np.einsum("iljk->ijkl", dgamma)
    R = R - np.einsum("jlik->ijkl", dgamma)
    R = R + np.einsum("lim,mjk->ijkl", gamma, gamma)
    R = R - np.einsum("ljm,mik->ijkl", gamma, gamma)
    return R


def nabla_structure(
    mfield: MetricField, sfield: StructureField, x, h: float = 1e-3, richardson: bool = True
):
    """Covariant derivative T[i] = (nabla_i J) as matrices acting on vectors."""
    _check_step(h)
    x = np.asarray(x, dtype=float)
    n = mfield.dim
    gamma = christoffel(mfield, x, h, richardson)
    J0 = sfield.matrix(x)
    dJ = np.stack([_derivative(sfield.matrix, x, i, h, richardson) for i in range(n)])
    # T[i, k, j] = d_i J^k_j + Gamma^k_{il} J^l_j - Gamma^l_{ij} J^k_l
    T = dJ + np.einsum("kil,lj->ikj", gamma, J0) - np.einsum("lij,kl->ikj", gamma, J0)
    return T
