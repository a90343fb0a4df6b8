"""Small complex-matrix algebra: group membership tests and random sampling.

Conventions fixed here and used everywhere else:

* the symplectic form on C^4 is block diagonal with 2x2 blocks
  [[0, 1], [-1, 0]] pairing coordinates (1,2) and (3,4), so each block
  matches one quaternionic coordinate of H^2 = C^4;
* the compact symplectic group Sp(2) is the set of unitary A with
  A^T Omega A = Omega.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatchError

__all__ = [
    "SYMPLECTIC_FORM",
    "is_unitary",
    "is_special_unitary",
    "is_symplectic_unitary",
    "group_membership",
    "unitary_exp",
    "random_unitary",
    "random_special_unitary",
    "random_symplectic_unitary",
    "canonical_sign_matrix",
]

SYMPLECTIC_FORM = np.array(
    [
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0, 0.0],
    ],
    dtype=complex,
)


def is_unitary(A: np.ndarray, tol: float = 1e-10) -> bool:
    n = A.shape[0]
    return bool(np.max(np.abs(A.conj().T @ A - np.eye(n))) <= tol)


def is_special_unitary(A: np.ndarray, tol: float = 1e-10) -> bool:
    return is_unitary(A, tol) and abs(np.linalg.det(A) - 1.0) <= tol


def is_symplectic_unitary(A: np.ndarray, tol: float = 1e-10) -> bool:
    if A.shape != (4, 4):
        raise DimensionMismatchError("symplectic-unitary test expects a 4x4 matrix")
    if not is_unitary(A, tol):
        return False
    return bool(np.max(np.abs(A.T @ SYMPLECTIC_FORM @ A - SYMPLECTIC_FORM)) <= tol)


def group_membership(A: np.ndarray, group: str, tol: float = 1e-10) -> bool:
    """Membership predicate for one of the groups used in this library."""
    A = np.asarray(A, dtype=complex)
    if group == "unitary":
        return is_unitary(A, tol)
    if group == "special-unitary":
        return is_special_unitary(A, tol)
    if group == "symplectic-unitary":
        return is_symplectic_unitary(A, tol)
    raise ValueError(f"unknown group {group!r}")


def unitary_exp(X: np.ndarray) -> np.ndarray:
    """exp(X) for anti-Hermitian X, via the eigendecomposition of iX."""
    H = 1j * X
    w, V = np.linalg.eigh(H)
    return (V * np.exp(-1j * w)) @ V.conj().T


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary from the QR of a complex Ginibre matrix."""
    Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))


def random_special_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    U = random_unitary(n, rng)
    det = np.linalg.det(U)
    return U * np.exp(-1j * np.angle(det) / n)


def random_symplectic_unitary(rng: np.random.Generator) -> np.ndarray:
    """Random element of Sp(2) = Sp(4,C) intersect U(4).

    Exponential of a random element of the Lie algebra
    { X : X* = -X and X^T Omega + Omega X = 0 }, obtained by averaging an
    anti-Hermitian Ginibre sample with its image under the quaternionic
    involution X -> -Omega conj(X) Omega.
    """
    Z = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    X = (Z - Z.conj().T) / 2.0
    X = (X - SYMPLECTIC_FORM @ X.conj() @ SYMPLECTIC_FORM) / 2.0
    return unitary_exp(X)


def canonical_sign_matrix(A: np.ndarray, threshold: float = 1e-8) -> np.ndarray:
    """Representative of {A, -A}: first significant entry (row-major scan)
    gets positive real part (or positive imaginary part if purely imaginary)."""
    for z in A.ravel():
        if abs(z) > threshold:
            if z.real < -threshold or (abs(z.real) <= threshold and z.imag < 0):
                return -A
            return A.copy()
    return A.copy()
