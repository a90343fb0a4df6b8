"""The nearly Kahler manifold of full flags (line inside plane) in C^3.

Points are classes of special-unitary 3x3 matrices modulo the diagonal
torus diag(e^{i s}, e^{i t}, e^{-i(s+t)}); the columns of a representative
span the line (column 1), the complementary line inside the plane
(column 2), and the plane's orthogonal complement (column 3).

Tangent vectors are stored as coefficient 6-vectors in the left-translated
frame of the six off-diagonal generators m_1..m_6, an orthonormal frame
for the submersion metric <x, y> = -Tr(x y)/2.  The three coefficient
pairs (1,2), (3,4), (5,6) span the vertical distributions V_1, V_2, V_3 of
the three projections to CP^2; J rotates each pair by +pi/2 and the
Kahler companions J_i flip the sign of J off block i.

Isometries are triples (A, sigma, k): A in SU(3) modulo its center, sigma
a column permutation (applied with a sign on the second column to keep the
determinant), k a conjugation flag.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as kernels
from .errors import (
    BasePointMismatchError,
    DecompositionError,
    NotAnIsometryError,
)
from .matrices import is_special_unitary, random_special_unitary

__all__ = [
    "Point",
    "Tangent",
    "Isometry",
    "IsometryOracle",
    "ProjectiveLine",
    "BASIS",
    "PERMUTATIONS",
    "metric",
    "complex_structure",
    "kahler_structure",
    "curvature",
    "hol_sec_curvature",
    "from_subspaces",
    "projection",
    "nabla_J",
    "identity_isometry",
    "decompose_isometry",
    "element_oracle",
    "random_point",
    "random_tangent",
    "random_isometry",
    "chart_fields",
    "chart_frame",
]

BASIS = kernels.FLAG_BASIS
_J_BLOCKS = [kernels.flag_structure_blocks(i) for i in range(4)]
OMEGA = np.exp(2j * np.pi / 3.0)

# Column permutations as image triples: position j receives column sigma[j].
# The six of them, identity first, matching the natural identification of
# the flag's finite symmetries.
PERMUTATIONS = ((0, 1, 2), (1, 0, 2), (2, 1, 0), (0, 2, 1), (1, 2, 0), (2, 0, 1))


def perm_sign(sigma) -> int:
    s = 1
    for i in range(3):
        for j in range(i + 1, 3):
            if sigma[i] > sigma[j]:
                s = -s
    return s


def perm_compose(first, second):
    """Permutation of 'apply first, then second' (matrix product order)."""
    return tuple(second[first[j]] for j in range(3))


def perm_inverse(sigma):
    out = [0, 0, 0]
    for j in range(3):
        out[sigma[j]] = j
    return tuple(out)


def signed_perm_matrix(sigma) -> np.ndarray:
    """Column permutation matrix with the second column carrying the sign of
    the permutation, so the determinant stays one."""
    S = np.zeros((3, 3), dtype=complex)
    sign = perm_sign(sigma)
    for j in range(3):
        S[sigma[j], j] = sign if j == 1 else 1.0
    return S


def coefficients(xi: np.ndarray) -> np.ndarray:
    """Coefficients of the off-diagonal part of xi in the m-basis."""
    return np.array([-0.5 * np.trace(xi @ m).real for m in BASIS])


def from_coefficients(c) -> np.ndarray:
    return np.einsum("i,ijk->jk", np.asarray(c, dtype=float), BASIS)


def _center_canonical(A: np.ndarray) -> np.ndarray:
    """Representative modulo {1, w, w^2} Id: the phase of the first
    significant entry of column one lands in [0, 2pi/3)."""
    third = 2.0 * np.pi / 3.0
    for z in A[:, 0]:
        if abs(z) > 1e-8:
            theta = float(np.angle(z)) % (2.0 * np.pi)
            m = int(math.ceil(-theta / third - 1e-15)) % 3
            for shift in (m, (m + 1) % 3, (m + 2) % 3):
                if (theta + shift * third) % (2.0 * np.pi) < third:
                    return A * OMEGA**shift
    return A.copy()


@dataclass(frozen=True)
class Point:
    """Flag represented by a special-unitary matrix modulo the torus."""

    rep: np.ndarray

    def __post_init__(self):
        rep = np.asarray(self.rep, dtype=complex)
        object.__setattr__(self, "rep", rep)
        if not is_special_unitary(rep, 1e-8):
            raise ValueError("representative must be special unitary")

    def distance(self, other: "Point") -> float:
        """Sup-norm difference after aligning representatives by the torus
        projection of rep1^H rep2; zero iff the flags agree."""
        D = self.rep.conj().T @ other.rep
        phases = np.array(
            [d / abs(d) if abs(d) > 1e-12 else 1.0 for d in np.diag(D)]
        )
        return float(np.max(np.abs(self.rep * phases - other.rep)))


BASE_POINT_REP = np.eye(3, dtype=complex)


@dataclass(frozen=True)
class Tangent:
    """Coefficient vector in the translated generator frame at base.rep."""

    base: Point
    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=float))

    def __add__(self, other: "Tangent") -> "Tangent":
        _check_base(self, other)
        return Tangent(self.base, self.coeffs + other.coeffs)

    def __sub__(self, other: "Tangent") -> "Tangent":
        _check_base(self, other)
        return Tangent(self.base, self.coeffs - other.coeffs)

    def scale(self, t: float) -> "Tangent":
        return Tangent(self.base, t * self.coeffs)

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def ambient(self) -> np.ndarray:
        """The tangent as a matrix attached at the representative."""
        return self.base.rep @ from_coefficients(self.coeffs)

    def with_base_rep(self, new_rep: np.ndarray, tol: float = 1e-8) -> "Tangent":
        """Re-express at another representative of the same flag; the frame
        rotates by the adjoint action of the connecting torus element."""
        new_rep = np.asarray(new_rep, dtype=complex)
        t = new_rep.conj().T @ self.base.rep
        off = t - np.diag(np.diag(t))
        if np.max(np.abs(off)) > tol:
            raise BasePointMismatchError("representatives describe different flags")
        d = np.diag(t)
        t = np.diag(d / np.abs(d))
        m = t @ from_coefficients(self.coeffs) @ t.conj().T
        return Tangent(Point(new_rep), coefficients(m))


def _check_base(X: Tangent, Y: Tangent, tol: float = 1e-7):
    if np.max(np.abs(X.base.rep - Y.base.rep)) > tol:
        raise BasePointMismatchError(
            "tangent vectors expressed at different representatives"
        )


def metric(X: Tangent, Y: Tangent) -> float:
    """Submersion metric: plain dot product in the orthonormal frame."""
    _check_base(X, Y)
    return float(X.coeffs @ Y.coeffs)


def complex_structure(X: Tangent) -> Tangent:
    """J: rotation by +pi/2 on each coefficient pair."""
    return Tangent(X.base, _J_BLOCKS[0] @ X.coeffs)


def kahler_structure(X: Tangent, i: int) -> Tangent:
    """J_i (i in 1..3): equal to J on block i and to -J elsewhere."""
    if i not in (1, 2, 3):
        raise ValueError("block index must be 1, 2 or 3")
    return Tangent(X.base, _J_BLOCKS[i] @ X.coeffs)


def curvature(X: Tangent, Y: Tangent, Z: Tangent) -> Tangent:
    """Closed-form curvature tensor R(X, Y)Z of the nearly Kahler metric."""
    _check_base(X, Y)
    _check_base(X, Z)
    x, y, z = X.coeffs, Y.coeffs, Z.coeffs
    out = 0.25 * ((y @ z) * x - (x @ z) * y)
    for i in range(4):
        B = _J_BLOCKS[i]
        bx, by, bz = B @ x, B @ y, B @ z
        w = (by @ z) * bx - (bx @ z) * by + 2.0 * (x @ by) * bz
        out = out + (-0.25 if i == 0 else 0.5) * w
    return Tangent(X.base, out)


def hol_sec_curvature(X: Tangent) -> float:
    """Sectional curvature of the plane spanned by a unit X and JX.

    Closed form -1/2 + 3/2 sum_i g(J J_i X, X)^2; bounded by 4, with
    equality exactly on the three vertical distributions.
    """
    x = X.coeffs
    if abs(x @ x - 1.0) > 1e-9:
        raise ValueError("holomorphic sectional curvature expects a unit vector")
    acc = 0.0
    J = _J_BLOCKS[0]
    for i in (1, 2, 3):
        acc += float(x @ (J @ (_J_BLOCKS[i] @ x))) ** 2
    return -0.5 + 1.5 * acc


# ---------------------------------------------------------------------------
# flags from subspaces and the three projections
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProjectiveLine:
    """A line in C^3: unit vector modulo phase."""

    vec: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vec, dtype=complex)
        n = np.linalg.norm(v)
        if n < 1e-12:
            raise ValueError("zero vector does not span a line")
        object.__setattr__(self, "vec", v / n)

    def distance(self, other: "ProjectiveLine") -> float:
        overlap = complex(np.vdot(other.vec, self.vec))
        phase = overlap / abs(overlap) if abs(overlap) > 1e-12 else 1.0
        return float(np.max(np.abs(self.vec - phase * other.vec)))


def from_subspaces(line: np.ndarray, second: np.ndarray) -> Point:
    """Flag with the given line and the plane spanned by line and second.

    The third column is the Hermitian complement (a conjugated cross
    product), phase-fixed so the determinant is one.
    """
    v1 = np.asarray(line, dtype=complex)
    n1 = np.linalg.norm(v1)
    if n1 < 1e-12:
        raise ValueError("zero line vector")
    v1 = v1 / n1
    v2 = np.asarray(second, dtype=complex)
    overlap = complex(np.vdot(v1, v2))
    if abs(overlap) > 1e-8 * max(1.0, np.linalg.norm(v2)):
        raise ValueError("plane vector must be Hermitian-orthogonal to the line")
    v2 = v2 - overlap * v1
    n2 = np.linalg.norm(v2)
    if n2 < 1e-12:
        raise ValueError("plane vector is parallel to the line")
    v2 = v2 / n2
    v3 = np.conj(np.cross(v1, v2))
    return Point(np.column_stack([v1, v2, v3]))


def projection(pt: Point, which: int) -> ProjectiveLine:
    """The three submersions to CP^2: which=3 is the line itself, 2 the
    complementary line inside the plane, 1 the plane's complement."""
    if which not in (1, 2, 3):
        raise ValueError("projection index must be 1, 2 or 3")
    return ProjectiveLine(pt.rep[:, 3 - which])


# ---------------------------------------------------------------------------
# isometries
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Isometry:
    """Triple (A, sigma, k) acting by [v] -> [Conj^k(A v S_sigma)]."""

    A: np.ndarray
    sigma: tuple = (0, 1, 2)
    k: int = 0

    def __post_init__(self):
        A = np.asarray(self.A, dtype=complex)
        if not is_special_unitary(A, 1e-8):
            raise NotAnIsometryError("matrix part must be special unitary")
        if tuple(sorted(self.sigma)) != (0, 1, 2):
            raise ValueError("sigma must be a permutation of (0, 1, 2)")
        if self.k not in (0, 1):
            raise ValueError("conjugation flag must be 0 or 1")
        object.__setattr__(self, "A", _center_canonical(A))
        object.__setattr__(self, "sigma", tuple(self.sigma))

    def apply(self, pt: Point) -> Point:
        out = self.A @ pt.rep @ signed_perm_matrix(self.sigma)
        return Point(out.conj() if self.k else out)

    def differential(self, X: Tangent) -> Tangent:
        S = signed_perm_matrix(self.sigma)
        out = self.A @ X.base.rep @ S
        n = S.conj().T @ from_coefficients(X.coeffs) @ S
        if self.k:
            out = out.conj()
            n = n.conj()
        c = coefficients(n)
        residual = np.max(np.abs(n - from_coefficients(c)))
        if residual > 1e-10 * max(1.0, float(np.linalg.norm(X.coeffs))):
            raise RuntimeError("pushforward left the reductive complement")
        return Tangent(Point(out), c)

    def compose(self, other: "Isometry") -> "Isometry":
        """(self * other).apply(pt) == self.apply(other.apply(pt))."""
        A = self.A.conj() if other.k else self.A
        return Isometry(
            A @ other.A,
            perm_compose(self.sigma, other.sigma),
            (self.k + other.k) % 2,
        )

    def inverse(self) -> "Isometry":
        B = self.A.conj().T
        if self.k:
            B = B.conj()
        return Isometry(B, perm_inverse(self.sigma), self.k)

    def distance(self, other: "Isometry") -> float:
        """Matrix-part distance modulo the center; discrete parts must match
        exactly (returns inf otherwise)."""
        if self.sigma != other.sigma or self.k != other.k:
            return math.inf
        return min(
            float(np.max(np.abs(self.A - OMEGA**j * other.A))) for j in range(3)
        )


def identity_isometry() -> Isometry:
    return Isometry(np.eye(3, dtype=complex))


def _distribution_permutation(F: Isometry):
    """Which vertical block each block is sent to by the differential."""
    out = []
    for b in range(3):
        img = F.differential(Tangent(Point(BASE_POINT_REP), np.eye(6)[2 * b]))
        energies = [float(np.linalg.norm(img.coeffs[2 * c : 2 * c + 2])) for c in range(3)]
        out.append(int(np.argmax(energies)))
    if tuple(sorted(out)) != (0, 1, 2):
        raise RuntimeError("distribution images do not form a permutation")
    return tuple(out)


def _build_permutation_tables():
    dist = {}
    jsign = {}
    base = Point(BASE_POINT_REP)
    X = Tangent(base, np.array([1.0, 0.5, -0.25, 0.75, 0.4, -0.6]))
    for sigma in PERMUTATIONS:
        F = Isometry(np.eye(3, dtype=complex), sigma, 0)
        dist[sigma] = _distribution_permutation(F)
        dJX = F.differential(complex_structure(X)).coeffs
        JdX = complex_structure(F.differential(X)).coeffs
        if np.allclose(dJX, JdX, atol=1e-12):
            jsign[sigma] = 1
        elif np.allclose(dJX, -JdX, atol=1e-12):
            jsign[sigma] = -1
        else:
            raise RuntimeError("column permutation neither commutes nor "
                               "anticommutes with J")
    return dist, jsign


DISTRIBUTION_PERMUTATION, PERMUTATION_J_SIGN = _build_permutation_tables()


@dataclass(frozen=True)
class IsometryOracle:
    """Black-box isometry of the flag space: point map plus differential."""

    apply: object
    differential: object


def element_oracle(F: Isometry) -> IsometryOracle:
    return IsometryOracle(apply=F.apply, differential=F.differential)


def random_point(rng: np.random.Generator) -> Point:
    return Point(random_special_unitary(3, rng))


def random_tangent(rng: np.random.Generator, base: Point) -> Tangent:
    return Tangent(base, rng.standard_normal(6))


def random_isometry(rng: np.random.Generator) -> Isometry:
    return Isometry(
        random_special_unitary(3, rng),
        PERMUTATIONS[int(rng.integers(6))],
        int(rng.integers(2)),
    )


# ---------------------------------------------------------------------------
# decomposition of a black-box isometry
# ---------------------------------------------------------------------------

def _check_isometry(oracle: IsometryOracle, tol: float, rng: np.random.Generator):
    for _ in range(4):
        pt = random_point(rng)
        X, Y = random_tangent(rng, pt), random_tangent(rng, pt)
        dX, dY = oracle.differential(X), oracle.differential(Y)
        if abs(metric(dX, dY) - metric(X, Y)) > tol * max(1.0, abs(metric(X, Y))):
            raise NotAnIsometryError(
                "metric distortion beyond tolerance; input is not an isometry"
            )
        lin = oracle.differential(X.scale(0.5) + Y.scale(2.0))
        if (lin - dX.scale(0.5) - dY.scale(2.0)).norm() > 1e2 * tol:
            raise NotAnIsometryError("oracle differential is not linear")


def decompose_isometry(
    oracle: IsometryOracle, tol: float = 1e-8, rng: np.random.Generator | None = None
) -> Isometry:
    """Recover the (A, sigma, k) coordinates of a black-box isometry.

    Classifies the images of the three vertical blocks, cancels the block
    permutation, translates the image of the identity flag back, removes
    the residual torus rotation (whose three block angles must sum to
    zero), and detects a leftover conjugation by the sign of the block
    determinants.
    """
    if rng is None:
        rng = np.random.default_rng(np.random.Philox(0xF1A6))
    _check_isometry(oracle, tol, rng)
    base = Point(BASE_POINT_REP)

    # 1. block images at the identity flag
    rho = []
    for b in range(3):
        img = oracle.differential(Tangent(base, np.eye(6)[2 * b]))
        energies = [np.linalg.norm(img.coeffs[2 * c : 2 * c + 2]) for c in range(3)]
        top = int(np.argmax(energies))
        total = float(np.linalg.norm(img.coeffs))
        if energies[top] < (1.0 - 1e2 * tol) * total:
            raise DecompositionError(
                f"image of vertical block {b + 1} has no dominant block"
            )
        rho.append(top)
    if tuple(sorted(rho)) != (0, 1, 2):
        raise DecompositionError("vertical blocks are not permuted consistently")
    rho = tuple(rho)

    # 2. cancel the permutation
    want = perm_inverse(rho)
    (sigma_fix,) = [s for s in PERMUTATIONS if DISTRIBUTION_PERMUTATION[s] == want]
    E = Isometry(np.eye(3, dtype=complex), sigma_fix, 0)
    step1 = _compose_oracle_left(E, oracle)

    # 3. translate the image of the identity flag back to it
    W = step1.apply(base).rep
    T = Isometry(_su3_normalize(W.conj().T), (0, 1, 2), 0)
    step2 = _compose_oracle_left(T, step1)
    if step2.apply(base).distance(base) > 1e3 * tol:
        raise DecompositionError("translation correction failed to fix the base flag")

    # 4. block rotation angles of the residue at the identity flag
    blocks = []
    for b in range(3):
        c0 = step2.differential(Tangent(base, np.eye(6)[2 * b]))
        c1 = step2.differential(Tangent(base, np.eye(6)[2 * b + 1]))
        B = np.column_stack(
            [
                c0.with_base_rep(BASE_POINT_REP).coeffs[2 * b : 2 * b + 2],
                c1.with_base_rep(BASE_POINT_REP).coeffs[2 * b : 2 * b + 2],
            ]
        )
        blocks.append(B)
    reflected = [float(np.linalg.det(B)) < 0.0 for B in blocks]
    if len(set(reflected)) != 1:
        raise DecompositionError("blocks disagree about the conjugation residue")
    k = 1 if reflected[0] else 0
    theta = [math.atan2(B[1, 0], B[0, 0]) for B in blocks]
    closure = (theta[0] + theta[1] + theta[2]) % (2.0 * math.pi)
    closure = min(closure, 2.0 * math.pi - closure)
    if closure > 1e3 * tol:
        raise DecompositionError(
            f"block angles do not close up (defect {closure:.2e}); "
            "the map is not an isometry of this space"
        )

    t1, t2 = theta[0], theta[1]
    torus = Isometry(
        np.diag(
            [
                np.exp(1j * (t1 - t2) / 3.0),
                np.exp(-1j * (2.0 * t1 + t2) / 3.0),
                np.exp(1j * (t1 + 2.0 * t2) / 3.0),
            ]
        ),
        (0, 1, 2),
        0,
    )
    conj = Isometry(np.eye(3, dtype=complex), (0, 1, 2), k)

    # T o E o F o torus o conj = Id  =>  F = E^{-1} T^{-1} conj^{-1} torus^{-1}
    result = (
        E.inverse()
        .compose(T.inverse())
        .compose(conj.inverse())
        .compose(torus.inverse())
    )

    for _ in range(4):
        pt = random_point(rng)
        if result.apply(pt).distance(oracle.apply(pt)) > 1e4 * tol:
            raise DecompositionError("recovered element does not reproduce the map")
    return result


def _su3_normalize(A: np.ndarray) -> np.ndarray:
    det = np.linalg.det(A)
    return A * np.exp(-1j * np.angle(det) / 3.0)


def _compose_oracle_left(F: Isometry, oracle: IsometryOracle) -> IsometryOracle:
    return IsometryOracle(
        apply=lambda pt: F.apply(oracle.apply(pt)),
        differential=lambda X: F.differential(oracle.differential(X)),
    )


def pointwise_defect(
    F: Isometry, oracle: IsometryOracle, samples: int, rng: np.random.Generator
) -> float:
    worst = 0.0
    for _ in range(samples):
        pt = random_point(rng)
        worst = max(worst, F.apply(pt).distance(oracle.apply(pt)))
    return worst


# ---------------------------------------------------------------------------
# oracle-backed covariant derivative and charts
# ---------------------------------------------------------------------------

def nabla_J(X: Tangent, Y: Tangent, h: float = 1e-3) -> Tangent:
    """Covariant derivative (nabla_X J) Y from the numeric oracle on the
    chart centered at the common base point."""
    _check_base(X, Y)
    met, struct = chart_fields(Point(X.base.rep))
    T = kernels.nabla_structure(met, struct, np.zeros(6), h)
    return Tangent(X.base, np.einsum("ikj,i,j->k", T, X.coeffs, Y.coeffs))


def chart_fields(center: Point, weighted_block: int = -1, structure: int = 0):
    """Backend metric and structure fields for the chart
    x -> [U0 E1(x1) ... E6(x6)] (one-parameter groups of the generators).

    weighted_block in {0,1,2} selects a Kahler companion metric g_i;
    structure 0 is J and 1..3 the J_i.
    """
    met = kernels.flag_metric_field(center.rep, weighted_block)
    struct = kernels.flag_structure_field(center.rep, structure)
    return met, struct


def chart_frame(center: Point):
    """Chart partials at x = 0: the translated generator frame (exact)."""
    return [Tangent(center, np.eye(6)[i]) for i in range(6)]
