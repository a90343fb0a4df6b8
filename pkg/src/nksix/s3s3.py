"""The nearly Kahler product of two round three-spheres.

Points are pairs (p, q) of unit quaternions; a tangent vector at (p, q) is
(p*a, q*b) with a, b imaginary and is stored as the pair (a, b).  In that
coefficient form the structures are

    g((a,b),(c,d)) = 4/3 (<a,c> + <b,d>) - 2/3 (<b,c> + <a,d>)
    J(a,b)         = ((-a + 2b)/sqrt(3), (-2a + b)/sqrt(3))
    P(a,b)         = (b, a)

and the curvature tensor has a closed form in g, J, P alone.

The full isometry group is generated by the two-sided translations
phi_{(a,b,c)}(p,q) = (a p c^{-1}, b q c^{-1}) together with six
permutation-type maps Psi indexed by (kappa, tau): kappa in {0,1} gives
the sign in J dPsi = +/- dPsi J, and tau in {0, 2pi/3, 4pi/3} gives the
rotation in P dPsi = dPsi (cos(tau) P + sin(tau) J P).  The index of each
map is fixed by those two relations.
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
from .quaternions import (
    I,
    J as JQ,
    K,
    ONE,
    Quaternion,
    im,
    im_inner,
    random_unit_quaternion,
    su2_lift_from_frames,
)

__all__ = [
    "Point",
    "Tangent",
    "Isometry",
    "IsometryOracle",
    "TAU_ANGLES",
    "metric",
    "almost_complex",
    "product_structure",
    "curvature",
    "psi_apply",
    "identity_isometry",
    "decompose_isometry",
    "element_oracle",
    "random_point",
    "random_tangent",
    "random_isometry",
    "chart_fields",
    "chart_frame",
]

SQRT3 = math.sqrt(3.0)
TAU_ANGLES = (0.0, 2.0 * math.pi / 3.0, 4.0 * math.pi / 3.0)
COS_TAU = (1.0, -0.5, -0.5)
SIN_TAU = (0.0, 0.5 * SQRT3, -0.5 * SQRT3)


@dataclass(frozen=True)
class Point:
    p: Quaternion
    q: Quaternion

    def __post_init__(self):
        if not (self.p.is_unit(1e-9) and self.q.is_unit(1e-9)):
            raise ValueError("Point components must be unit quaternions")

    def distance(self, other: "Point") -> float:
        return max((self.p - other.p).norm(), (self.q - other.q).norm())


BASE_POINT = Point(ONE, ONE)


@dataclass(frozen=True)
class Tangent:
    base: Point
    alpha: Quaternion
    beta: Quaternion

    def __post_init__(self):
        if not (self.alpha.is_imaginary(1e-9) and self.beta.is_imaginary(1e-9)):
            raise ValueError("tangent components must be imaginary quaternions")

    def __add__(self, other: "Tangent") -> "Tangent":
        _check_base(self, other)
        return Tangent(self.base, self.alpha + other.alpha, self.beta + other.beta)

    def __sub__(self, other: "Tangent") -> "Tangent":
        _check_base(self, other)
        return Tangent(self.base, self.alpha - other.alpha, self.beta - other.beta)

    def scale(self, t: float) -> "Tangent":
        return Tangent(self.base, self.alpha.scale(t), self.beta.scale(t))

    def __neg__(self) -> "Tangent":
        return self.scale(-1.0)

    def norm(self) -> float:
        return math.sqrt(max(metric(self, self), 0.0))

    def coeffs(self) -> np.ndarray:
        return np.array([*self.alpha.imag, *self.beta.imag])

    @staticmethod
    def from_coeffs(base: Point, c) -> "Tangent":
        return Tangent(base, im(c[0], c[1], c[2]), im(c[3], c[4], c[5]))


def _check_base(X: Tangent, Y: Tangent, tol: float = 1e-9):
    if X.base.distance(Y.base) > tol:
        raise BasePointMismatchError("tangent vectors live at different points")


def metric(X: Tangent, Y: Tangent) -> float:
    """Homogeneous nearly Kahler metric; positive definite."""
    _check_base(X, Y)
    a, b, c, d = X.alpha, X.beta, Y.alpha, Y.beta
    return (4.0 / 3.0) * (im_inner(a, c) + im_inner(b, d)) - (2.0 / 3.0) * (
        im_inner(b, c) + im_inner(a, d)
    )


def almost_complex(X: Tangent) -> Tangent:
    """Canonical almost complex structure J; J^2 = -Id and g(JX,JY)=g(X,Y)."""
    a, b = X.alpha, X.beta
    return Tangent(
        X.base,
        (-a + b.scale(2.0)).scale(1.0 / SQRT3),
        (a.scale(-2.0) + b).scale(1.0 / SQRT3),
    )


def product_structure(X: Tangent, tau_idx: int = 0) -> Tangent:
    """Almost product structure family cos(tau) P + sin(tau) J P.

    tau_idx indexes tau in {0, 2pi/3, 4pi/3}; each member is an involution
    compatible with g and anti-commuting with J.
    """
    swapped = Tangent(X.base, X.beta, X.alpha)
    if tau_idx == 0:
        return swapped
    ct, st = COS_TAU[tau_idx], SIN_TAU[tau_idx]
    rotated = almost_complex(swapped)
    return Tangent(
        X.base,
        swapped.alpha.scale(ct) + rotated.alpha.scale(st),
        swapped.beta.scale(ct) + rotated.beta.scale(st),
    )


def curvature(U: Tangent, V: Tangent, W: Tangent, tau_idx: int = 0) -> Tangent:
    """Closed-form curvature tensor R(U, V)W.

    The product structure entering the formula may be replaced by any member
    of the compatible family (tau_idx); the value is unchanged.
    """
    _check_base(U, V)
    _check_base(U, W)
    JU, JV, JW = almost_complex(U), almost_complex(V), almost_complex(W)
    PU, PV = product_structure(U, tau_idx), product_structure(V, tau_idx)
    JPU, JPV = almost_complex(PU), almost_complex(PV)

    out = U.scale((5.0 / 12.0) * metric(V, W)) - V.scale((5.0 / 12.0) * metric(U, W))
    out = out + JU.scale(metric(JV, W) / 12.0) - JV.scale(metric(JU, W) / 12.0)
    out = out - JW.scale(metric(JU, V) / 6.0)
    out = out + PU.scale(metric(PV, W) / 3.0) - PV.scale(metric(PU, W) / 3.0)
    out = out + JPU.scale(metric(JPV, W) / 3.0) - JPV.scale(metric(JPU, W) / 3.0)
    return out


# ---------------------------------------------------------------------------
# permutation-type isometries Psi_{kappa, tau}
# ---------------------------------------------------------------------------

def psi_apply(kappa: int, tau_idx: int, pt: Point) -> Point:
    """The six permutation-type isometries, indexed by their J sign and
    P rotation (see module docstring)."""
    p, q = pt.p, pt.q
    if tau_idx == 0:
        return pt if kappa == 0 else Point(q, p)
    if tau_idx == 1:
        pi = p.inverse()
        return Point(q * pi, pi) if kappa == 0 else Point(pi, q * pi)
    qi = q.inverse()
    return Point(qi, p * qi) if kappa == 0 else Point(p * qi, qi)


def psi_push(kappa: int, tau_idx: int, X: Tangent) -> Tangent:
    """Differential of Psi_{kappa,tau}; exact chain rule, no discretization."""
    pt, a, b = X.base, X.alpha, X.beta
    image = psi_apply(kappa, tau_idx, pt)
    if tau_idx == 0:
        return X if kappa == 0 else Tangent(image, b, a)
    if tau_idx == 1:
        u, v = (b - a), -a
        if kappa == 1:
            u, v = v, u
        cj = pt.p
    else:
        u, v = -b, (a - b)
        if kappa == 1:
            u, v = v, u
        cj = pt.q
    return Tangent(image, u.conjugate_by(cj), v.conjugate_by(cj))


def _psi_index(fn, tol: float = 1e-9):
    """Identify which Psi a point map equals, by evaluation at fixed probes."""
    probes = (
        Point(Quaternion.exp_imag(0.31, -0.42, 0.23), Quaternion.exp_imag(-0.11, 0.52, 0.74)),
        Point(Quaternion.exp_imag(0.92, 0.13, -0.35), Quaternion.exp_imag(0.21, -0.63, 0.44)),
    )
    matches = []
    for kappa in (0, 1):
        for t in (0, 1, 2):
            if all(fn(pt).distance(psi_apply(kappa, t, pt)) <= tol for pt in probes):
                matches.append((kappa, t))
    if len(matches) != 1:
        raise RuntimeError(f"permutation-map identification failed: {matches}")
    return matches[0]


def _translate(a: Quaternion, b: Quaternion, c: Quaternion, pt: Point) -> Point:
    ci = c.inverse()
    return Point(a * pt.p * ci, b * pt.q * ci)


def _derive_tables():
    """Composition table of the six Psi and their conjugation action on
    translation triples, derived from pointwise action identities."""
    labels = [(k, t) for k in (0, 1) for t in (0, 1, 2)]
    compose = {}
    for l1 in labels:
        for l2 in labels:
            compose[(l1, l2)] = _psi_index(
                lambda pt, l1=l1, l2=l2: psi_apply(*l1, psi_apply(*l2, pt))
            )
    inverse = {}
    for l in labels:
        (inv,) = [m for m in labels if compose[(l, m)] == (0, 0)]
        if compose[(inv, l)] != (0, 0):
            raise RuntimeError("inverse table inconsistent")
        inverse[l] = inv

    # sigma with Psi^{-1} o phi_v o Psi = phi_{sigma(v)}; sigma permutes the
    # three slots of the triple.
    triple = (
        Quaternion.exp_imag(0.21, 0.43, -0.17),
        Quaternion.exp_imag(-0.52, 0.11, 0.36),
        Quaternion.exp_imag(0.14, -0.27, 0.61),
    )
    probe = Point(Quaternion.exp_imag(0.37, -0.21, 0.54), Quaternion.exp_imag(0.62, 0.15, -0.33))
    perms = [(0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)]
    sigma = {}
    for l in labels:
        inv = inverse[l]
        target = psi_apply(*inv, _translate(*triple, psi_apply(*l, probe)))
        hits = [
            perm
            for perm in perms
            if _translate(*(triple[i] for i in perm), probe).distance(target) <= 1e-9
        ]
        if len(hits) != 1:
            raise RuntimeError(f"slot permutation identification failed for {l}: {hits}")
        sigma[l] = hits[0]
    return compose, inverse, sigma


PSI_COMPOSE, PSI_INVERSE, PSI_SIGMA = _derive_tables()


def _canonical_triple(a: Quaternion, b: Quaternion, c: Quaternion):
    """Sign representative of {(a,b,c), (-a,-b,-c)}: first significant
    coefficient of the concatenated list is nonnegative."""
    for q in (a, b, c):
        for coeff in (q.w, q.x, q.y, q.z):
            if abs(coeff) > 1e-8:
                if coeff < 0:
                    return -a, -b, -c
                return a, b, c
    return a, b, c


@dataclass(frozen=True)
class Isometry:
    """Group element (a, b, c, Psi_{kappa,tau}) acting by Psi o phi_{(a,b,c)}.

    The triple is stored sign-canonically; (a,b,c) and (-a,-b,-c) describe
    the same isometry.
    """

    a: Quaternion
    b: Quaternion
    c: Quaternion
    kappa: int = 0
    tau_idx: int = 0

    def __post_init__(self):
        for q in (self.a, self.b, self.c):
            if not q.is_unit(1e-9):
                raise ValueError("translation triple must consist of unit quaternions")
        if self.kappa not in (0, 1) or self.tau_idx not in (0, 1, 2):
            raise ValueError("invalid permutation-part index")
        a, b, c = _canonical_triple(self.a, self.b, self.c)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    @property
    def tau(self) -> float:
        return TAU_ANGLES[self.tau_idx]

    def apply(self, pt: Point) -> Point:
        return psi_apply(self.kappa, self.tau_idx, _translate(self.a, self.b, self.c, pt))

    def differential(self, X: Tangent) -> Tangent:
        mid = Tangent(
            _translate(self.a, self.b, self.c, X.base),
            X.alpha.conjugate_by(self.c),
            X.beta.conjugate_by(self.c),
        )
        return psi_push(self.kappa, self.tau_idx, mid)

    def compose(self, other: "Isometry") -> "Isometry":
        """Group law: (self * other).apply(pt) == self.apply(other.apply(pt))."""
        perm = PSI_SIGMA[(other.kappa, other.tau_idx)]
        mine = (self.a, self.b, self.c)
        permuted = tuple(mine[i] for i in perm)
        kappa, tau_idx = PSI_COMPOSE[
            ((self.kappa, self.tau_idx), (other.kappa, other.tau_idx))
        ]
        return Isometry(
            permuted[0] * other.a,
            permuted[1] * other.b,
            permuted[2] * other.c,
            kappa,
            tau_idx,
        )

    def inverse(self) -> "Isometry":
        inv_k, inv_t = PSI_INVERSE[(self.kappa, self.tau_idx)]
        perm = PSI_SIGMA[(inv_k, inv_t)]
        mine = (self.a, self.b, self.c)
        permuted = tuple(mine[i] for i in perm)
        return Isometry(
            permuted[0].inverse(),
            permuted[1].inverse(),
            permuted[2].inverse(),
            inv_k,
            inv_t,
        )

    def distance(self, other: "Isometry") -> float:
        """Continuous-part distance modulo the sign quotient; discrete parts
        must match exactly (returns inf otherwise)."""
        if (self.kappa, self.tau_idx) != (other.kappa, other.tau_idx):
            return math.inf
        direct = max(
            (x - y).norm()
            for x, y in ((self.a, other.a), (self.b, other.b), (self.c, other.c))
        )
        flipped = max(
            (x + y).norm()
            for x, y in ((self.a, other.a), (self.b, other.b), (self.c, other.c))
        )
        return min(direct, flipped)


def identity_isometry() -> Isometry:
    return Isometry(ONE, ONE, ONE, 0, 0)


@dataclass(frozen=True)
class IsometryOracle:
    """Black-box isometry: a point map and its differential."""

    apply: object
    differential: object


def element_oracle(F: Isometry) -> IsometryOracle:
    return IsometryOracle(apply=F.apply, differential=F.differential)


# ---------------------------------------------------------------------------
# random sampling
# ---------------------------------------------------------------------------

def random_point(rng: np.random.Generator) -> Point:
    return Point(random_unit_quaternion(rng), random_unit_quaternion(rng))


def random_tangent(rng: np.random.Generator, base: Point) -> Tangent:
    v = rng.standard_normal(6)
    return Tangent.from_coeffs(base, v)


def random_isometry(rng: np.random.Generator) -> Isometry:
    return Isometry(
        random_unit_quaternion(rng),
        random_unit_quaternion(rng),
        random_unit_quaternion(rng),
        int(rng.integers(2)),
        int(rng.integers(3)),
    )


# ---------------------------------------------------------------------------
# decomposition of a black-box isometry into group coordinates
# ---------------------------------------------------------------------------

def _probe_frame(pt: Point):
    return [Tangent(pt, e, im(0, 0, 0)) for e in (I, JQ, K)] + [
        Tangent(pt, im(0, 0, 0), e) for e in (I, JQ, K)
    ]


def _check_isometry(oracle: IsometryOracle, tol: float, rng: np.random.Generator):
    for _ in range(4):
        pt = random_point(rng)
        X = random_tangent(rng, pt)
        Y = random_tangent(rng, pt)
        dX, dY = oracle.differential(X), oracle.differential(Y)
        if abs(metric(dX, dY) - metric(X, Y)) > tol * max(1.0, abs(metric(X, Y))):
            raise NotAnIsometryError(
                "metric distortion beyond tolerance; input is not an isometry"
            )
        lin = oracle.differential(X.scale(0.5) + Y.scale(2.0))
        expect = dX.scale(0.5) + dY.scale(2.0)
        if (lin - expect).norm() > 1e2 * tol:
            raise NotAnIsometryError("oracle differential is not linear")


def _detect_kappa(oracle: IsometryOracle, pt: Point, tol: float) -> int:
    plus = minus = 0.0
    for X in _probe_frame(pt):
        dJX = oracle.differential(almost_complex(X))
        JdX = almost_complex(oracle.differential(X))
        plus += (dJX - JdX).norm()
        minus += (dJX + JdX).norm()
    if min(plus, minus) > tol * 6.0 * 10.0:
        raise DecompositionError("differential is compatible with neither sign of J")
    return 0 if plus <= minus else 1


def _detect_tau(oracle: IsometryOracle, pt: Point, tol: float) -> int:
    """Index t with P dF = dF (cos tau_t P + sin tau_t J P), by projecting
    onto the P and JP components over a probe frame."""
    num_c = num_s = den = 0.0
    for X in _probe_frame(pt):
        t = product_structure(oracle.differential(X))
        u = oracle.differential(product_structure(X))
        w = oracle.differential(almost_complex(product_structure(X)))
        num_c += metric(t, u)
        num_s += metric(t, w)
        den += metric(X, X)
    cos_t, sin_t = num_c / den, num_s / den
    idx = 0 if cos_t > 0.25 else (1 if sin_t > 0.0 else 2)
    residual = math.hypot(cos_t - COS_TAU[idx], sin_t - SIN_TAU[idx])
    if residual > 100.0 * tol:
        raise DecompositionError(
            f"projection onto the product-structure family leaves residual {residual:.2e}"
        )
    return idx


def _compose_oracle_right(oracle: IsometryOracle, F: Isometry) -> IsometryOracle:
    return IsometryOracle(
        apply=lambda pt: oracle.apply(F.apply(pt)),
        differential=lambda X: oracle.differential(F.differential(X)),
    )


def _compose_oracle_left(F: Isometry, oracle: IsometryOracle) -> IsometryOracle:
    return IsometryOracle(
        apply=lambda pt: F.apply(oracle.apply(pt)),
        differential=lambda X: F.differential(oracle.differential(X)),
    )


def decompose_isometry(
    oracle: IsometryOracle, tol: float = 1e-8, rng: np.random.Generator | None = None
) -> Isometry:
    """Recover explicit group coordinates of a black-box isometry.

    Detects the J sign and the product-structure rotation, cancels them with
    the matching Psi, translates the image of (1,1) back, and lifts the
    residual frame rotation to a unit quaternion acting by conjugation.
    """
    if rng is None:
        rng = np.random.default_rng(np.random.Philox(0x5353))
    _check_isometry(oracle, tol, rng)

    kappa = _detect_kappa(oracle, BASE_POINT, tol)
    tau_m = _detect_tau(oracle, BASE_POINT, tol)
    # cancel the twist: for kappa = 0 the compensating rotation is -tau.
    comp_tau = (-tau_m) % 3 if kappa == 0 else tau_m
    psi = Isometry(ONE, ONE, ONE, kappa, comp_tau)

    G = _compose_oracle_right(oracle, psi)
    image = G.apply(BASE_POINT)
    shift = Isometry(image.p.inverse(), image.q.inverse(), ONE, 0, 0)
    H = _compose_oracle_left(shift, G)

    if H.apply(BASE_POINT).distance(BASE_POINT) > 1e3 * tol:
        raise DecompositionError("translation correction failed to fix the base point")

    betas = []
    for e in (I, JQ, K):
        img = H.differential(Tangent(BASE_POINT, e, im(0, 0, 0)))
        if img.beta.norm() > 1e3 * tol:
            raise DecompositionError(
                "corrected map does not preserve the first-factor slice; "
                "structure detection was inconsistent"
            )
        betas.append(img.alpha)
    c = su2_lift_from_frames((I, JQ, K), betas, tol=1e-6)

    # shift o F o psi o phi_{(c,c,c)}^{-1} = Id, hence
    # F = phi_{(p0 c, q0 c, c)} o psi^{-1}; rewrite with the Psi part leading.
    v = (image.p * c, image.q * c, c)
    inv_k, inv_t = PSI_INVERSE[(kappa, comp_tau)]
    perm = PSI_SIGMA[(inv_k, inv_t)]
    result = Isometry(v[perm[0]], v[perm[1]], v[perm[2]], inv_k, inv_t)

    for _ in range(4):
        pt = random_point(rng)
        if result.apply(pt).distance(oracle.apply(pt)) > 1e4 * tol:
            raise DecompositionError("recovered element does not reproduce the map")
    return result


def pointwise_defect(
    F: Isometry, oracle: IsometryOracle, samples: int, rng: np.random.Generator
) -> float:
    """Max distance between the element action and the oracle over random points."""
    worst = 0.0
    for _ in range(samples):
        pt = random_point(rng)
        worst = max(worst, F.apply(pt).distance(oracle.apply(pt)))
    return worst


# ---------------------------------------------------------------------------
# charts feeding the finite-difference oracle
# ---------------------------------------------------------------------------

def chart_fields(center: Point, structure: bool = True):
    """Backend metric (and J) field for the chart centered at the point.

    The chart is x -> (p0 E1(x1) E2(x2) E3(x3), q0 E4(x4) E5(x5) E6(x6)) with
    Ei one-parameter groups of i, j, k; its partial derivatives are exact.
    """
    p0 = center.p.coeffs()
    q0 = center.q.coeffs()
    met = kernels.s3s3_metric_field(p0, q0)
    if not structure:
        return met, None
    return met, kernels.s3s3_structure_field(p0, q0)


def chart_frame(center: Point):
    """Chart partials at x = 0 as tangent vectors (exact)."""
    return _probe_frame(center)
