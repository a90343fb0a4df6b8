"""Nearly Kahler complex projective 3-space via the quaternionic Hopf map.

Points are unit vectors of C^4 modulo complex phase (representatives of
Hopf circles on the seven-sphere).  Viewing C^4 as the quaternionic plane,
left multiplications by i, j, k at a representative p give

    ip  (the fiber direction),
    jp = Omega conj(p)  and  kp = i jp,

so the horizontal space at p splits into the complex line D2 = C jp and
its complement D4.  The nearly Kahler metric doubles the round submersion
metric on D4; the structures are P = -Id on D2 / +Id on D4, the inherited
complex structure Jcirc, and J = P Jcirc.

Isometries are pairs (A, k) with A in Sp(2) modulo sign and k a
conjugation flag, acting by p -> Conj^k(A p).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as kernels
from .errors import BasePointMismatchError, NotAnIsometryError
from .matrices import (
    SYMPLECTIC_FORM,
    canonical_sign_matrix,
    is_symplectic_unitary,
    is_unitary,
    random_symplectic_unitary,
)

__all__ = [
    "Point",
    "Tangent",
    "Isometry",
    "quaternionic_frame",
    "split_tangent",
    "metric",
    "metric_fs",
    "product_structure",
    "complex_structure_kahler",
    "complex_structure",
    "nk_isometry_from_unitary",
    "random_point",
    "random_tangent",
    "random_isometry",
    "horizontal_basis",
    "chart_fields",
    "chart_frame",
]


def _herm(a: np.ndarray, b: np.ndarray) -> complex:
    """Hermitian inner product sum a_i conj(b_i)."""
    return complex(np.vdot(b, a))


@dataclass(frozen=True)
class Point:
    """Hopf class of a unit vector in C^4; equality is modulo phase."""

    rep: np.ndarray

    def __post_init__(self):
        rep = np.asarray(self.rep, dtype=complex)
        object.__setattr__(self, "rep", rep)
        if abs(np.linalg.norm(rep) - 1.0) > 1e-9:
            raise ValueError("representative must be a unit vector")

    def distance(self, other: "Point") -> float:
        """Sup-norm difference of phase-aligned representatives; zero iff the
        classes agree, and free of square-root noise amplification so it can
        be tested against tolerances near machine precision."""
        overlap = _herm(self.rep, other.rep)
        phase = overlap / abs(overlap) if abs(overlap) > 1e-12 else 1.0
        return float(np.max(np.abs(self.rep - phase * other.rep)))


@dataclass(frozen=True)
class Tangent:
    """Horizontal lift at the base representative, split into the D2/D4 parts."""

    base: Point
    horiz: np.ndarray
    d2: np.ndarray = field(init=False)
    d4: np.ndarray = field(init=False)

    def __post_init__(self):
        h = np.asarray(self.horiz, dtype=complex)
        r = self.base.rep
        if abs(_herm(h, r)) > 1e-8 * max(1.0, np.linalg.norm(h)):
            raise ValueError("lift is not horizontal at the base representative")
        object.__setattr__(self, "horiz", h)
        jr = SYMPLECTIC_FORM @ r.conj()
        d2 = _herm(h, jr) * jr
        object.__setattr__(self, "d2", d2)
        object.__setattr__(self, "d4", h - d2)

    def __add__(self, other: "Tangent") -> "Tangent":
        _check_base(self, other)
        return Tangent(self.base, self.horiz + other.horiz)

    def __sub__(self, other: "Tangent") -> "Tangent":
        _check_base(self, other)
        return Tangent(self.base, self.horiz - other.horiz)

    def scale(self, t: float) -> "Tangent":
        return Tangent(self.base, t * self.horiz)

    def norm(self) -> float:
        return math.sqrt(max(metric(self, self), 0.0))


def _check_base(X: Tangent, Y: Tangent, tol: float = 1e-7):
    if X.base.distance(Y.base) > tol:
        raise BasePointMismatchError("tangent vectors live at different points")
    if np.max(np.abs(X.base.rep - Y.base.rep)) > tol:
        raise BasePointMismatchError(
            "tangent lifts use different representatives of the same point"
        )


def quaternionic_frame(p: Point):
    """The three quaternionic multiplications at the representative:
    (ip, jp, kp) with jp = Omega conj(p)."""
    r = p.rep
    jp = SYMPLECTIC_FORM @ r.conj()
    return 1j * r, jp, 1j * jp


def split_tangent(p: Point, v: np.ndarray) -> Tangent:
    """Project an ambient C^4 vector to the horizontal space at p and split it.

    The fiber components along p and ip are removed; a zero result is a
    valid zero tangent.
    """
    v = np.asarray(v, dtype=complex)
    h = v - _herm(v, p.rep) * p.rep
    return Tangent(p, h)


def metric(X: Tangent, Y: Tangent) -> float:
    """Nearly Kahler metric: round product on D2, twice it on D4."""
    _check_base(X, Y)
    return float((_herm(X.d2, Y.d2) + 2.0 * _herm(X.d4, Y.d4)).real)


def metric_fs(X: Tangent, Y: Tangent) -> float:
    """Unrescaled submersion (Fubini-Study) metric."""
    _check_base(X, Y)
    return float(_herm(X.horiz, Y.horiz).real)


def product_structure(X: Tangent) -> Tangent:
    """P: minus the identity on D2, the identity on D4."""
    return Tangent(X.base, X.horiz - 2.0 * X.d2)


def complex_structure_kahler(X: Tangent) -> Tangent:
    """Jcirc: horizontal multiplication by i (re-projected for hygiene)."""
    return split_tangent(X.base, 1j * X.horiz)


def complex_structure(X: Tangent) -> Tangent:
    """The nearly Kahler structure J = P Jcirc = Jcirc P."""
    return product_structure(complex_structure_kahler(X))


@dataclass(frozen=True)
class Isometry:
    """Pair (A, k): A in Sp(2) modulo sign, k the conjugation flag."""

    A: np.ndarray
    k: int = 0

    def __post_init__(self):
        A = np.asarray(self.A, dtype=complex)
        if self.k not in (0, 1):
            raise ValueError("conjugation flag must be 0 or 1")
        if not is_symplectic_unitary(A, 1e-8):
            raise NotAnIsometryError("matrix is not symplectic-unitary")
        object.__setattr__(self, "A", canonical_sign_matrix(A))

    def apply(self, p: Point) -> Point:
        image = self.A @ p.rep
        if self.k:
            image = image.conj()
        return Point(image / np.linalg.norm(image))

    def differential(self, X: Tangent) -> Tangent:
        w = self.A @ X.horiz
        image = self.A @ X.base.rep
        if self.k:
            w = w.conj()
            image = image.conj()
        return split_tangent(Point(image / np.linalg.norm(image)), w)

    def compose(self, other: "Isometry") -> "Isometry":
        """(self * other).apply(p) == self.apply(other.apply(p))."""
        A = self.A.conj() if other.k else self.A
        return Isometry(A @ other.A, (self.k + other.k) % 2)

    def inverse(self) -> "Isometry":
        B = self.A.conj().T
        if self.k:
            B = B.conj()
        return Isometry(B, self.k)

    def distance(self, other: "Isometry") -> float:
        if self.k != other.k:
            return math.inf
        return min(
            float(np.max(np.abs(self.A - other.A))),
            float(np.max(np.abs(self.A + other.A))),
        )


def identity_isometry() -> Isometry:
    return Isometry(np.eye(4, dtype=complex), 0)


def nk_isometry_from_unitary(A: np.ndarray, tol: float = 1e-9):
    """Phase-correct a unitary to a symplectic-unitary when possible.

    Returns (lambda A, 0) as an Isometry if some unit phase lambda makes
    lambda A symplectic; None when the symplectic pairing is broken.
    """
    A = np.asarray(A, dtype=complex)
    if not is_unitary(A, tol):
        raise NotAnIsometryError("matrix is not unitary")
    M = A.T @ SYMPLECTIC_FORM @ A
    idx = np.unravel_index(np.argmax(np.abs(M)), M.shape)
    if abs(SYMPLECTIC_FORM[idx]) < 0.5:
        return None  # dominant entry sits where the form vanishes
    lam2 = SYMPLECTIC_FORM[idx] / M[idx]
    if abs(abs(lam2) - 1.0) > 10.0 * tol:
        return None
    if np.max(np.abs(lam2 * M - SYMPLECTIC_FORM)) > 10.0 * tol:
        return None
    lam = np.exp(0.5j * np.angle(lam2))
    return Isometry(lam * A, 0)


# ---------------------------------------------------------------------------
# sampling and charts
# ---------------------------------------------------------------------------

def random_point(rng: np.random.Generator) -> Point:
    v = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    return Point(v / np.linalg.norm(v))


def random_tangent(rng: np.random.Generator, base: Point) -> Tangent:
    v = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    return split_tangent(base, v)


def random_isometry(rng: np.random.Generator) -> Isometry:
    return Isometry(random_symplectic_unitary(rng), int(rng.integers(2)))


def horizontal_basis(p: Point) -> np.ndarray:
    """Deterministic real-orthonormal basis (6 x 4 complex) of the horizontal
    space at p: jp, kp, then two complex directions of D4 with their
    i-multiples."""
    r = p.rep
    jr = SYMPLECTIC_FORM @ r.conj()
    rows = [jr, 1j * jr]
    found = []
    for cand in np.eye(4, dtype=complex):
        w = cand - _herm(cand, r) * r - _herm(cand, jr) * jr
        for prev in found:
            w = w - _herm(w, prev) * prev
        nw = np.linalg.norm(w)
        if nw > 0.3:
            found.append(w / nw)
        if len(found) == 2:
            break
    if len(found) < 2:
        raise RuntimeError("failed to build a horizontal basis")
    rows += [found[0], 1j * found[0], found[1], 1j * found[1]]
    return np.array(rows)


def chart_fields(center: Point, kind: str = "nk"):
    """Backend metric and structure fields for the chart
    x -> class of normalize(rep + sum x_i basis_i).

    kind 'nk' gives the nearly Kahler pair (g, J); 'fs' the Kahler pair
    (Fubini-Study metric, Jcirc).
    """
    basis = horizontal_basis(center)
    if kind == "nk":
        met = kernels.cp3_metric_field(center.rep, basis, rescale=True)
        struct = kernels.cp3_structure_field(center.rep, basis, "jnk")
    elif kind == "fs":
        met = kernels.cp3_metric_field(center.rep, basis, rescale=False)
        struct = kernels.cp3_structure_field(center.rep, basis, "jcirc")
    else:
        raise ValueError("kind must be 'nk' or 'fs'")
    return met, struct


def chart_frame(center: Point):
    """Chart partials at x = 0 (the horizontal basis) as tangents."""
    return [Tangent(center, row) for row in horizontal_basis(center)]
