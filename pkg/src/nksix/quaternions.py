"""Quaternion arithmetic and the unit-quaternion cover of SO(3).

Quaternions are written w + x*i + y*j + z*k with the Hamilton product
(i*j = k).  Imaginary quaternions double as tangent vectors of the unit
three-sphere: the tangent space at p is { p*a : a imaginary }, and the
round metric on imaginary quaternions is the Euclidean coefficient dot
product (positive definite).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateBasisError, GramMismatchError, OrientationMismatchError

__all__ = [
    "Quaternion",
    "ONE",
    "I",
    "J",
    "K",
    "im",
    "im_inner",
    "canonical_sign",
    "su2_lift_from_frames",
    "rotation_to_quaternion",
    "random_unit_quaternion",
]


@dataclass(frozen=True)
class Quaternion:
    w: float
    x: float
    y: float
    z: float

    def __mul__(self, other: "Quaternion") -> "Quaternion":
        a, b = self, other
        return Quaternion(
            a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
        )

    def __add__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(self.w + other.w, self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(self.w - other.w, self.x - other.x, self.y - other.y, self.z - other.z)

    def __neg__(self) -> "Quaternion":
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def scale(self, t: float) -> "Quaternion":
        return Quaternion(t * self.w, t * self.x, t * self.y, t * self.z)

    def conjugate(self) -> "Quaternion":
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def norm2(self) -> float:
        return self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z

    def norm(self) -> float:
        return math.sqrt(self.norm2())

    def inverse(self) -> "Quaternion":
        n2 = self.norm2()
        return Quaternion(self.w / n2, -self.x / n2, -self.y / n2, -self.z / n2)

    def normalized(self) -> "Quaternion":
        n = self.norm()
        return Quaternion(self.w / n, self.x / n, self.y / n, self.z / n)

    def conjugate_by(self, c: "Quaternion") -> "Quaternion":
        """c * self * c^{-1} for unit c."""
        return c * self * c.conjugate()

    @property
    def imag(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)

    def is_imaginary(self, tol: float = 1e-12) -> bool:
        return abs(self.w) <= tol

    def is_unit(self, tol: float = 1e-12) -> bool:
        return abs(self.norm2() - 1.0) <= 2.0 * tol

    def coeffs(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z])

    @staticmethod
    def exp_imag(x: float, y: float, z: float) -> "Quaternion":
        """exp(x*i + y*j + z*k); always a unit quaternion."""
        t = math.sqrt(x * x + y * y + z * z)
        if t < 1e-300:
            return ONE
        s = math.sin(t) / t
        return Quaternion(math.cos(t), s * x, s * y, s * z)

    def __repr__(self) -> str:
        return f"Quaternion({self.w:.17g}, {self.x:.17g}, {self.y:.17g}, {self.z:.17g})"


ONE = Quaternion(1.0, 0.0, 0.0, 0.0)
I = Quaternion(0.0, 1.0, 0.0, 0.0)
J = Quaternion(0.0, 0.0, 1.0, 0.0)
K = Quaternion(0.0, 0.0, 0.0, 1.0)


def im(x: float, y: float, z: float) -> Quaternion:
    """Imaginary quaternion x*i + y*j + z*k."""
    return Quaternion(0.0, x, y, z)


def im_inner(a: Quaternion, b: Quaternion) -> float:
    """Euclidean inner product of imaginary quaternions.

    Symmetric, bilinear, positive definite; <a, a> = |a|^2 for imaginary a.
    """
    return a.x * b.x + a.y * b.y + a.z * b.z


def random_unit_quaternion(rng: np.random.Generator) -> Quaternion:
    v = rng.standard_normal(4)
    v /= np.linalg.norm(v)
    return Quaternion(*v)


def rotation_to_quaternion(R: np.ndarray) -> Quaternion:
    """Unit quaternion c with c v c^{-1} realizing the rotation R on (i,j,k).

    Branch selection on the largest of trace/diagonal keeps the extraction
    stable near rotations by pi.  Returned with nonnegative leading
    coefficient (first coefficient above 1e-8 in magnitude).
    """
    t = R[0, 0] + R[1, 1] + R[2, 2]
    if t > max(R[0, 0], R[1, 1], R[2, 2]):
        r = math.sqrt(1.0 + t)
        s = 0.5 / r
        q = Quaternion(0.5 * r, (R[2, 1] - R[1, 2]) * s, (R[0, 2] - R[2, 0]) * s, (R[1, 0] - R[0, 1]) * s)
    else:
        a = int(np.argmax([R[0, 0], R[1, 1], R[2, 2]]))
        b, c = (a + 1) % 3, (a + 2) % 3
        r = math.sqrt(1.0 + R[a, a] - R[b, b] - R[c, c])
        s = 0.5 / r
        v = [0.0, 0.0, 0.0]
        v[a] = 0.5 * r
        v[b] = (R[b, a] + R[a, b]) * s
        v[c] = (R[c, a] + R[a, c]) * s
        q = Quaternion((R[c, b] - R[b, c]) * s, *v)
    return canonical_sign(q.normalized())


def canonical_sign(q: Quaternion, threshold: float = 1e-8) -> Quaternion:
    """Representative of {q, -q} whose first significant coefficient is >= 0."""
    for c in (q.w, q.x, q.y, q.z):
        if abs(c) > threshold:
            return -q if c < 0 else q
    return q


def _frame_matrix(frame) -> np.ndarray:
    return np.array([[q.x, q.y, q.z] for q in frame]).T


def su2_lift_from_frames(alphas, betas, tol: float = 1e-9) -> Quaternion:
    """Unit quaternion c with c a_i c^{-1} = b_i for two frames of Im(H).

    Both triples must be bases of the imaginary quaternions with matching
    Gram tables (the map a_i -> b_i is then a rotation).  The two valid
    answers differ by sign; the one with nonnegative first significant
    coefficient is returned.

    Raises GramMismatchError / DegenerateBasisError / OrientationMismatchError
    when no such c exists.
    """
    A = _frame_matrix(alphas)
    B = _frame_matrix(betas)
    ga, gb = A.T @ A, B.T @ B
    scale = max(1.0, float(np.max(np.abs(ga))))
    if np.max(np.abs(ga - gb)) > tol * scale:
        raise GramMismatchError(
            f"frame Gram tables differ by {np.max(np.abs(ga - gb)):.3e} (tol {tol:.3e})"
        )
    if abs(np.linalg.det(A)) < 1e-9 * scale ** 1.5:
        raise DegenerateBasisError("input frame is numerically dependent")
    # Orthonormalize both frames with the same coefficients; the rotation
    # between the Q factors is the rotation between the frames.  Matching
    # Gram tables force equal triangular factors once both are normalized
    # to a positive diagonal.
    qa, ra = np.linalg.qr(A)
    qb, rb = np.linalg.qr(B)
    qa = qa * np.sign(np.diag(ra))
    qb = qb * np.sign(np.diag(rb))
    R = qb @ qa.T
    if np.linalg.det(R) < 0.0:
        raise OrientationMismatchError(
            "frames have opposite orientation; conjugation only realizes rotations"
        )
    return rotation_to_quaternion(R)
