"""Verification suites: seeded, deterministic property checks per space.

Every check draws from its own counter-based stream (Philox keyed by the
run seed and a stable per-check tag), so reports are reproducible and
independent of check ordering.  Sample counts scale linearly with the
configured ``samples`` relative to the per-check default at 1000.
"""

from __future__ import annotations

import math
import time
import zlib
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as kernels
from . import cp3, flag, oracle, s3s3
from .matrices import random_special_unitary
from .quaternions import im
from .report import CheckRecord, VerificationReport

__all__ = ["RunConfig", "run", "SPACES", "SUITES", "TOLERANCE_DEFAULTS"]

SPACES = ("s3s3", "cp3", "flag")
SUITES = ("invariants", "curvature", "nk-defect", "decompose", "fuzz-group", "all")

TOLERANCE_DEFAULTS = {
    "algebraic": 1e-12,
    "isometry": 1e-10,
    "curvature": 1e-4,
    "numeric-symmetry": 1e-3,
    "nk-defect": 1e-5,
    "kahler-defect": 1e-5,
    "compatibility": 1e-8,
    "decompose": 1e-8,
    "group": 1e-12,
    "bound": 1e-9,
}


@dataclass
class RunConfig:
    """Configuration of one verification run; equal configs give equal reports."""

    space: str
    suite: str
    samples: int = 1000
    seed: int = 42
    tolerances: dict = field(default_factory=dict)
    step: float = 1e-3

    def tol(self, key: str) -> float:
        return float(self.tolerances.get(key, TOLERANCE_DEFAULTS[key]))


@dataclass
class Check:
    name: str
    anchor: str
    tol_key: str
    base_count: int
    fn: object

    def record(self, cfg: RunConfig) -> CheckRecord:
        count = (cfg.samples * self.base_count) // 1000
        if cfg.samples > 0:
            count = max(count, 1)
        tol = cfg.tol(self.tol_key)
        if count == 0:
            return CheckRecord(self.name, self.anchor, 0, math.inf, tol, note="vacuous")
        rng = np.random.default_rng(
            np.random.Philox(np.random.SeedSequence(cfg.seed, spawn_key=(zlib.crc32(self.anchor.encode()),)))
        )
        defect = self.fn(cfg, rng, count)
        return CheckRecord(self.name, self.anchor, count, float(defect), tol)


_REGISTRY: dict = {}


def _check(space, suite, name, anchor, tol_key, base_count):
    def deco(fn):
        _REGISTRY.setdefault((space, suite), []).append(
            Check(name, anchor, tol_key, base_count, fn)
        )
        return fn

    return deco


# ===========================================================================
# product of spheres
# ===========================================================================

def _s3_scene(rng):
    pt = s3s3.random_point(rng)
    return pt, s3s3.random_tangent(rng, pt), s3s3.random_tangent(rng, pt)


@_check("s3s3", "invariants", "product structure is an involution",
        "s3s3.structure.p_squared", "algebraic", 1000)
def _(cfg, rng, n):
    worst = 0.0
    for _ in range(n):
        pt, X, _y = _s3_scene(rng)
        for t in range(3):
            PP = s3s3.product_structure(s3s3.product_structure(X, t), t)
            worst = max(worst, (PP - X).norm())
    return worst


@_check("s3s3", "invariants", "product structure preserves the metric",
        "s3s3.structure.p_isometric", "algebraic", 1000)
def _(cfg, rng, n):
    worst = 0.0
    for _ in range(n):
        pt, X, Y = _s3_scene(rng)
        for t in range(3):
            worst = max(worst, abs(
                s3s3.metric(s3s3.product_structure(X, t), s3s3.product_structure(Y, t))
                - s3s3.metric(X, Y)))
    return worst


@_check("s3s3", "invariants", "product structure is symmetric",
        "s3s3.structure.p_symmetric", "algebraic", 1000)
def _(cfg, rng, n):
    worst = 0.0
    for _ in range(n):
        pt, X, Y = _s3_scene(rng)
        for t in range(3):
            worst = max(worst, abs(
                s3s3.metric(s3s3.product_structure(X, t), Y)
                - s3s3.metric(X, s3s3.product_structure(Y, t))))
    return worst


@_check("s3s3", "invariants", "product and complex structures anticommute",
        "s3s3.structure.pj_anticommute", "algebraic", 1000)
def _(cfg, rng, n):
    worst = 0.0
    for _ in range(n):
        pt, X, _y = _s3_scene(rng)
        for t in range(3):
            lhs = s3s3.product_structure(s3s3.almost_complex(X), t)
            rhs = s3s3.almost_complex(s3s3.product_structure(X, t))
            worst = max(worst, (lhs + rhs).norm())
    return worst


@_check("s3s3", "invariants", "J squares to minus the identity and is isometric",
        "s3s3.structure.j_identities", "algebraic", 1000)
def _(cfg, rng, n):
    worst = 0.0
    for _ in range(n):
        pt, X, Y = _s3_scene(rng)
        worst = max(worst, (s3s3.almost_complex(s3s3.almost_complex(X)) + X).norm())
        worst = max(worst, abs(
            s3s3.metric(s3s3.almost_complex(X), s3s3.almost_complex(Y)) - s3s3.metric(X, Y)))
    return worst


@_check("s3s3", "invariants", "nabla J anticommutes with the product structure",
        "s3s3.structure.nablaJ_p_equivariance", "nk-defect", 50)
def _(cfg, rng, n):
    P = np.zeros((6, 6))
    P[:3, 3:] = np.eye(3)
    P[3:, :3] = np.eye(3)
    worst = 0.0
    for _ in range(n):
        center = s3s3.random_point(rng)
        met, jf = s3s3.chart_fields(center)
        T = kernels.nabla_structure(met, jf, np.zeros(6), cfg.step)
        x, y = rng.standard_normal(6), rng.standard_normal(6)
        v = P @ np.einsum("ikj,i,j->k", T, x, y)
        w = np.einsum("ikj,i,j->k", T, P @ x, P @ y)
        worst = max(worst, float(np.max(np.abs(v + w))) / (np.linalg.norm(x) * np.linalg.norm(y)))
    return worst


@_check("s3s3", "invariants", "curvature is invariant under substituting the structure family",
        "s3s3.curvature.family_substitution", "algebraic", 300)
def _(cfg, rng, n):
    worst = 0.0
    for _ in range(n):
        pt = s3s3.random_point(rng)
        U, V, W = (s3s3.random_tangent(rng, pt) for _ in range(3))
        R0 = s3s3.curvature(U, V, W, 0)
        for t in (1, 2):
            worst = max(worst, (s3s3.curvature(U, V, W, t) - R0).norm())
    return worst


@_check("s3s3", "invariants", "generators preserve the metric",
        "s3s3.isometry.generators_preserve_metric", "isometry", 1000)
def _(cfg, rng, n):
    worst = 0.0
    for i in range(n):
        pt, X, Y = _s3_scene(rng)
        F = s3s3.random_isometry(rng)
        worst = max(worst, abs(s3s3.metric(F.differential(X), F.differential(Y))
                               - s3s3.metric(X, Y)))
    return worst


@_check("s3s3", "invariants", "permutation maps: J sign relation",
        "s3s3.isometry.psi_j_relation", "algebraic", 1000)
def _(cfg, rng, n):
    worst = 0.0
    labels = [(k, t) for k in (0, 1) for t in (0, 1, 2)]
    for i in range(n):
        kappa, t = labels[i % 6]
        pt, X, _y = _s3_scene(rng)
        lhs = s3s3.almost_complex(s3s3.psi_push(kappa, t, X))
        rhs = s3s3.psi_push(kappa, t, s3s3.almost_complex(X)).scale((-1.0) ** kappa)
        worst = max(worst, (lhs - rhs).norm())
    return worst


@_check("s3s3", "invariants", "permutation maps: product-structure rotation relation",
        "s3s3.isometry.psi_p_relation", "algebraic", 1000)
def _(cfg, rng, n):
    worst = 0.0
    labels = [(k, t) for k in (0, 1) for t in (0, 1, 2)]
    for i in range(n):
        kappa, t = labels[i % 6]
        pt, X, _y = _s3_scene(rng)
        lhs = s3s3.product_structure(s3s3.psi_push(kappa, t, X))
        rhs = s3s3.psi_push(kappa, t, s3s3.product_structure(X, t))
        worst = max(worst, (lhs - rhs).norm())
    return worst


@_check("s3s3", "curvature", "curvature antisymmetry and first Bianchi identity",
        "s3s3.curvature.symmetries", "algebraic", 500)
def _(cfg, rng, n):
    worst = 0.0
    for _ in range(n):
        pt = s3s3.random_point(rng)
        U, V, W = (s3s3.random_tangent(rng, pt) for _ in range(3))
        worst = max(worst, (s3s3.curvature(U, V, W) + s3s3.curvature(V, U, W)).norm())
        bianchi = (s3s3.curvature(U, V, W) + s3s3.curvature(V, W, U)
                   + s3s3.curvature(W, U, V))
        worst = max(worst, bianchi.norm())
        worst = max(worst, (s3s3.curvature(U, U, U)).norm())
    return worst


@_check("s3s3", "curvature", "closed-form spot value at the unit pair",
        "s3s3.curvature.spot_value", "algebraic", 1)
def _(cfg, rng, n):
    pt = s3s3.BASE_POINT
    U = s3s3.Tangent(pt, im(1, 0, 0), im(0, 0, 0))
    V = s3s3.Tangent(pt, im(0, 1, 0), im(0, 0, 0))
    R = s3s3.curvature(U, V, V)
    defect = (R - U).norm()
    sec = s3s3.metric(R, U) / (
        s3s3.metric(U, U) * s3s3.metric(V, V) - s3s3.metric(U, V) ** 2
    )
    return max(defect, abs(sec - 0.75))


def _s3s3_curvature_samplers():
    def scene(rng):
        center = s3s3.random_point(rng)
        return center, rng.standard_normal(6), rng.standard_normal(6), rng.standard_normal(6)

    def closed(rng):
        center, u, v, w = scene(rng)
        frame = s3s3.chart_frame(center)
        U = s3s3.Tangent.from_coeffs(center, u)
        V = s3s3.Tangent.from_coeffs(center, v)
        W = s3s3.Tangent.from_coeffs(center, w)
        R = s3s3.curvature(U, V, W)
        return np.array([s3s3.metric(R, f) for f in frame])

    def numeric(rng, step):
        center, u, v, w = scene(rng)
        met, _ = s3s3.chart_fields(center, structure=False)
        R = kernels.riemann(met, np.zeros(6), step)
        Rl = oracle.lower_curvature(met, np.zeros(6), R)
        return np.einsum("ijkl,i,j,k->l", Rl, u, v, w)

    return closed, numeric


@_check("s3s3", "curvature", "closed form matches the numeric curvature",
        "s3s3.curvature.closed_vs_numeric", "curvature", 100)
def _(cfg, rng, n):
    closed, numeric = _s3s3_curvature_samplers()
    cmp = oracle.compare_tensor(
        closed, lambda r: numeric(r, cfg.step), n, cfg.seed, cfg.tol("curvature")
    )
    return cmp.max_rel


@_check("s3s3", "nk-defect", "symmetrized covariant derivative of J vanishes",
        "s3s3.nk.symmetrized_nablaJ", "nk-defect", 100)
def _(cfg, rng, n):
    worst = 0.0
    for _ in range(n):
        center = s3s3.random_point(rng)
        met, jf = s3s3.chart_fields(center)
        g0 = met.components(np.zeros(6))
        T = kernels.nabla_structure(met, jf, np.zeros(6), cfg.step)
        x = rng.standard_normal(6)
        v = np.einsum("ikj,i,j->k", T, x, x)
        worst = max(worst, math.sqrt(max(v @ g0 @ v, 0.0)) / (x @ g0 @ x))
    return worst


@_check("s3s3", "nk-defect", "numeric connection is metric compatible",
        "s3s3.nk.metric_compatibility", "compatibility", 20)
def _(cfg, rng, n):
    worst = 0.0
    for _ in range(n):
        met, _ = s3s3.chart_fields(s3s3.random_point(rng), structure=False)
        worst = max(worst, oracle.metric_compatibility_defect(met, np.zeros(6), cfg.step))
    return worst


@_check("s3s3", "decompose", "identity oracle decomposes to the identity",
        "s3s3.decompose.identity", "decompose", 1)
def _(cfg, rng, n):
    G = s3s3.decompose_isometry(s3s3.element_oracle(s3s3.identity_isometry()),
                                cfg.tol("decompose"), rng)
    return G.distance(s3s3.identity_isometry())


@_check("s3s3", "decompose", "random elements round-trip through decomposition",
        "s3s3.decompose.round_trip", "decompose", 500)
def _(cfg, rng, n):
    worst = 0.0
    for _ in range(n):
        F = s3s3.random_isometry(rng)
        G = s3s3.decompose_isometry(s3s3.element_oracle(F), cfg.tol("decompose"), rng)
        worst = max(worst, F.distance(G))
    return worst


@_check("s3s3", "fuzz-group", "composition is associative",
        "s3s3.group.associativity", "group", 1000)
def _(cfg, rng, n):
    worst = 0.0
    for _ in range(n):
        F1, F2, F3 = (s3s3.random_isometry(rng) for _ in range(3))
        worst = max(worst, F1.compose(F2).compose(F3).distance(F1.compose(F2.compose(F3))))
    return worst


@_check("s3s3", "fuzz-group", "identity and inverses",
        "s3s3.group.identity_inverse", "group", 1000)
def _(cfg, rng, n):
    worst = 0.0
    e = s3s3.identity_isometry()
    for _ in range(n):
        F = s3s3.random_isometry(rng)
        worst = max(worst, F.compose(e).distance(F), e.compose(F).distance(F))
        worst = max(worst, F.compose(F.inverse()).distance(e))
        worst = max(worst, F.inverse().compose(F).distance(e))
    return worst


@_check("s3s3", "fuzz-group", "composition is action compatible",
        "s3s3.group.action_compatibility", "group", 1000)
def _(cfg, rng, n):
    worst = 0.0
    for _ in range(n):
        F1, F2 = s3s3.random_isometry(rng), s3s3.random_isometry(rng)
        pt = s3s3.random_point(rng)
        worst = max(worst, F1.compose(F2).apply(pt).distance(F1.apply(F2.apply(pt))))
    return worst


# ===========================================================================
# complex projective space
# ===========================================================================

@_check("cp3", "invariants", "structure relations (involution, squares, product)",
        "cp3.structure.relations", "algebraic", 1000)
def _(cfg, rng, n):
    worst = 0.0
    for _ in range(n):
        pt = cp3.random_point(rng)
        X = cp3.random_tangent(rng, pt)
        PP = cp3.product_structure(cp3.product_structure(X))
        worst = max(worst, float(np.max(np.abs(PP.horiz - X.horiz))))
        JJ = cp3.complex_structure_kahler(cp3.complex_structure_kahler(X))
        worst = max(worst, float(np.max(np.abs(JJ.horiz + X.horiz))))
        NN = cp3.complex_structure(cp3.complex_structure(X))
        worst = max(worst, float(np.max(np.abs(NN.horiz + X.horiz))))
        a = cp3.product_structure(cp3.complex_structure_kahler(X))
        b = cp3.complex_structure_kahler(cp3.product_structure(X))
        c = cp3.complex_structure(X)
        worst = max(worst, float(np.max(np.abs(a.horiz - c.horiz))))
        worst = max(worst, float(np.max(np.abs(b.horiz - c.horiz))))
    return worst


@_check("cp3", "invariants", "generators preserve the metric",
        "cp3.isometry.generators_preserve_metric", "isometry", 1000)
def _(cfg, rng, n):
    worst = 0.0
    conj = cp3.Isometry(np.eye(4, dtype=complex), 1)
    for i in range(n):
        pt = cp3.random_point(rng)
        X, Y = cp3.random_tangent(rng, pt), cp3.random_tangent(rng, pt)
        F = conj if i % 4 == 0 else cp3.random_isometry(rng)
        worst = max(worst, abs(cp3.metric(F.differential(X), F.differential(Y))
                               - cp3.metric(X, Y)))
    return worst


@_check("cp3", "invariants", "generators preserve the distribution splitting",
        "cp3.isometry.splitting_preservation", "isometry", 1000)
def _(cfg, rng, n):
    worst = 0.0
    for _ in range(n):
        pt = cp3.random_point(rng)
        X = cp3.random_tangent(rng, pt)
        F = cp3.random_isometry(rng)
        img2 = F.differential(cp3.Tangent(pt, X.d2))
        img4 = F.differential(cp3.Tangent(pt, X.d4))
        worst = max(worst, float(np.max(np.abs(img2.d4))), float(np.max(np.abs(img4.d2))))
    return worst


@_check("cp3", "invariants", "phase correction of unitaries into the symplectic group",
        "cp3.isometry.phase_correction", "algebraic", 200)
def _(cfg, rng, n):
    worst = 0.0
    for _ in range(n):
        F = cp3.random_isometry(rng)
        lifted = cp3.nk_isometry_from_unitary(F.A)
        worst = max(worst, lifted.distance(cp3.Isometry(F.A, 0)))
        lam = np.exp(1j * rng.uniform(0, 2 * np.pi))
        relifted = cp3.nk_isometry_from_unitary(lam * F.A)
        pt = cp3.random_point(rng)
        worst = max(worst, relifted.apply(pt).distance(cp3.Isometry(F.A, 0).apply(pt)))
        broken = cp3.nk_isometry_from_unitary(
            F.A @ np.diag([1.0, 1.0, 1.0, np.exp(0.5j)]))
        if broken is not None:
            worst = max(worst, 1.0)
    return worst


@_check("cp3", "curvature", "numeric curvature tensor symmetries",
        "cp3.curvature.numeric_symmetries", "numeric-symmetry", 20)
def _(cfg, rng, n):
    worst = 0.0
    for _ in range(n):
        met, _ = cp3.chart_fields(cp3.random_point(rng), "nk")
        R = kernels.riemann(met, np.zeros(6), cfg.step)
        Rl = oracle.lower_curvature(met, np.zeros(6), R)
        scale = float(np.max(np.abs(Rl)))
        worst = max(worst, float(np.max(np.abs(Rl + np.einsum("jikl->ijkl", Rl)))) / scale)
        worst = max(worst, float(np.max(np.abs(Rl + np.einsum("ijlk->ijkl", Rl)))) / scale)
        bianchi = Rl + np.einsum("jkil->ijkl", Rl) + np.einsum("kijl->ijkl", Rl)
        worst = max(worst, float(np.max(np.abs(bianchi))) / scale)
    return worst


@_check("cp3", "curvature", "numeric connection is metric compatible",
        "cp3.curvature.metric_compatibility", "compatibility", 20)
def _(cfg, rng, n):
    worst = 0.0
    for _ in range(n):
        met, _ = cp3.chart_fields(cp3.random_point(rng), "nk")
        worst = max(worst, oracle.metric_compatibility_defect(met, np.zeros(6), cfg.step))
    return worst


@_check("cp3", "nk-defect", "symmetrized covariant derivative of J vanishes",
        "cp3.nk.symmetrized_nablaJ", "nk-defect", 100)
def _(cfg, rng, n):
    worst = 0.0
    for _ in range(n):
        met, jf = cp3.chart_fields(cp3.random_point(rng), "nk")
        g0 = met.components(np.zeros(6))
        T = kernels.nabla_structure(met, jf, np.zeros(6), cfg.step)
        x = rng.standard_normal(6)
        v = np.einsum("ikj,i,j->k", T, x, x)
        worst = max(worst, math.sqrt(max(v @ g0 @ v, 0.0)) / (x @ g0 @ x))
    return worst


@_check("cp3", "nk-defect", "the unrescaled pair is Kahler (full nabla J vanishes)",
        "cp3.kahler.fs_nablaJ", "kahler-defect", 100)
def _(cfg, rng, n):
    worst = 0.0
    for _ in range(n):
        met, jf = cp3.chart_fields(cp3.random_point(rng), "fs")
        T = kernels.nabla_structure(met, jf, np.zeros(6), cfg.step)
        worst = max(worst, float(np.max(np.abs(T))))
    return worst


@_check("cp3", "fuzz-group", "composition is associative",
        "cp3.group.associativity", "group", 1000)
def _(cfg, rng, n):
    worst = 0.0
    for _ in range(n):
        F1, F2, F3 = (cp3.random_isometry(rng) for _ in range(3))
        worst = max(worst, F1.compose(F2).compose(F3).distance(F1.compose(F2.compose(F3))))
    return worst


@_check("cp3", "fuzz-group", "identity and inverses",
        "cp3.group.identity_inverse", "group", 1000)
def _(cfg, rng, n):
    worst = 0.0
    e = cp3.identity_isometry()
    for _ in range(n):
        F = cp3.random_isometry(rng)
        worst = max(worst, F.compose(e).distance(F), e.compose(F).distance(F))
        worst = max(worst, F.compose(F.inverse()).distance(e))
        worst = max(worst, F.inverse().compose(F).distance(e))
    return worst


@_check("cp3", "fuzz-group", "composition is action compatible",
        "cp3.group.action_compatibility", "group", 1000)
def _(cfg, rng, n):
    worst = 0.0
    for _ in range(n):
        F1, F2 = cp3.random_isometry(rng), cp3.random_isometry(rng)
        pt = cp3.random_point(rng)
        worst = max(worst, F1.compose(F2).apply(pt).distance(F1.apply(F2.apply(pt))))
    return worst


# ===========================================================================
# flag space
# ===========================================================================

# expected commutation behaviour of the column permutations and conjugation
# against J (index 0) and the Kahler structures (indices 1..3):
# sigma -> {structure: (sign, structure')} meaning  dF o C = sign * C' o dF.
FLAG_COMMUTATION = {
    (1, 0, 2): {0: (-1, 0), 1: (-1, 1), 2: (-1, 3), 3: (-1, 2)},
    (2, 1, 0): {0: (-1, 0), 1: (-1, 3), 2: (-1, 2), 3: (-1, 1)},
    (0, 2, 1): {0: (-1, 0), 1: (-1, 2), 2: (-1, 1), 3: (-1, 3)},
    (1, 2, 0): {0: (1, 0), 1: (1, 2), 2: (1, 3), 3: (1, 1)},
    (2, 0, 1): {0: (1, 0), 1: (1, 3), 2: (1, 1), 3: (1, 2)},
    "conj": {0: (-1, 0), 1: (-1, 1), 2: (-1, 2), 3: (-1, 3)},
}


def _flag_structure(X, i):
    return flag.complex_structure(X) if i == 0 else flag.kahler_structure(X, i)


@_check("flag", "invariants", "translated generator frame is orthonormal",
        "flag.frame.orthonormal", "algebraic", 1)
def _(cfg, rng, n):
    G = np.array([[-0.5 * np.trace(a @ b).real for b in flag.BASIS] for a in flag.BASIS])
    return float(np.max(np.abs(G - np.eye(6))))


@_check("flag", "invariants", "J and its Kahler companions square to minus one",
        "flag.structure.squares", "algebraic", 500)
def _(cfg, rng, n):
    worst = 0.0
    for _ in range(n):
        X = flag.random_tangent(rng, flag.random_point(rng))
        worst = max(worst, (flag.complex_structure(flag.complex_structure(X)) + X).norm())
        for i in (1, 2, 3):
            worst = max(worst, (flag.kahler_structure(flag.kahler_structure(X, i), i) + X).norm())
    return worst


@_check("flag", "invariants", "J commutes with changing the representative",
        "flag.structure.torus_welldefined", "algebraic", 500)
def _(cfg, rng, n):
    worst = 0.0
    for _ in range(n):
        pt = flag.random_point(rng)
        X = flag.random_tangent(rng, pt)
        s, t = rng.uniform(0, 2 * np.pi, size=2)
        torus = np.diag(np.exp(1j * np.array([s, t, -(s + t)])))
        rep2 = pt.rep @ torus
        lhs = flag.complex_structure(X.with_base_rep(rep2))
        rhs = flag.complex_structure(X).with_base_rep(rep2)
        worst = max(worst, float(np.max(np.abs(lhs.coeffs - rhs.coeffs))))
    return worst


@_check("flag", "invariants", "unitary rotations preserve metric, structures, blocks",
        "flag.isometry.su3_preserves", "isometry", 1000)
def _(cfg, rng, n):
    worst = 0.0
    for _ in range(n):
        F = flag.Isometry(random_special_unitary(3, rng))
        pt = flag.random_point(rng)
        X, Y = flag.random_tangent(rng, pt), flag.random_tangent(rng, pt)
        dX, dY = F.differential(X), F.differential(Y)
        worst = max(worst, abs(flag.metric(dX, dY) - flag.metric(X, Y)))
        worst = max(worst, (F.differential(flag.complex_structure(X))
                            - flag.complex_structure(dX)).norm())
        for i in (1, 2, 3):
            worst = max(worst, (F.differential(flag.kahler_structure(X, i))
                                - flag.kahler_structure(dX, i)).norm())
        for b in range(3):
            Xb = flag.Tangent(pt, np.concatenate([
                X.coeffs[2 * b:2 * b + 2] if c == b else np.zeros(2) for c in range(3)]))
            img = F.differential(Xb).coeffs
            leak = np.linalg.norm(np.delete(img, [2 * b, 2 * b + 1]))
            worst = max(worst, leak)
    return worst


@_check("flag", "invariants", "discrete generators preserve the metric",
        "flag.isometry.discrete_preserve_metric", "isometry", 1000)
def _(cfg, rng, n):
    worst = 0.0
    for i in range(n):
        sigma = flag.PERMUTATIONS[i % 6]
        k = (i // 6) % 2
        F = flag.Isometry(random_special_unitary(3, rng), sigma, k)
        pt = flag.random_point(rng)
        X, Y = flag.random_tangent(rng, pt), flag.random_tangent(rng, pt)
        worst = max(worst, abs(flag.metric(F.differential(X), F.differential(Y))
                               - flag.metric(X, Y)))
    return worst


@_check("flag", "invariants", "commutation table of the finite symmetries",
        "flag.isometry.commutation_table", "algebraic", 240)
def _(cfg, rng, n):
    worst = 0.0
    entries = [(s, i) for s in FLAG_COMMUTATION for i in range(4)]
    reps = max(1, n // len(entries))
    for key, i in entries:
        F = (flag.Isometry(np.eye(3, dtype=complex), (0, 1, 2), 1)
             if key == "conj"
             else flag.Isometry(np.eye(3, dtype=complex), key, 0))
        sign, j = FLAG_COMMUTATION[key][i]
        for _ in range(reps):
            X = flag.random_tangent(rng, flag.random_point(rng))
            lhs = F.differential(_flag_structure(X, i))
            rhs = _flag_structure(F.differential(X), j).scale(sign)
            worst = max(worst, float(np.max(np.abs(lhs.coeffs - rhs.coeffs))))
    return worst


@_check("flag", "invariants", "projections are class functions intertwined by the symmetries",
        "flag.projections.intertwine", "algebraic", 300)
def _(cfg, rng, n):
    worst = 0.0
    for i in range(n):
        pt = flag.random_point(rng)
        s, t = rng.uniform(0, 2 * np.pi, size=2)
        torus = np.diag(np.exp(1j * np.array([s, t, -(s + t)])))
        other = flag.Point(pt.rep @ torus)
        for a in (1, 2, 3):
            worst = max(worst, flag.projection(pt, a).distance(flag.projection(other, a)))
        sigma = flag.PERMUTATIONS[i % 6]
        F = flag.Isometry(np.eye(3, dtype=complex), sigma, 0)
        image = F.apply(pt)
        for a in (1, 2, 3):
            # new column j holds old column sigma[j]
            b = 3 - sigma[3 - a]
            worst = max(worst, flag.projection(image, a).distance(flag.projection(pt, b)))
    return worst


@_check("flag", "invariants", "flags rebuild from their line and plane",
        "flag.point.from_subspaces", "algebraic", 300)
def _(cfg, rng, n):
    worst = 0.0
    e = np.eye(3, dtype=complex)
    worst = max(worst, flag.from_subspaces(e[:, 0], e[:, 1]).distance(
        flag.Point(np.eye(3, dtype=complex))))
    for _ in range(n):
        pt = flag.random_point(rng)
        l = flag.projection(pt, 3).vec * np.exp(1j * rng.uniform(0, 2 * np.pi))
        m = flag.projection(pt, 2).vec * np.exp(1j * rng.uniform(0, 2 * np.pi))
        worst = max(worst, flag.from_subspaces(l, m).distance(pt))
    return worst


@_check("flag", "curvature", "curvature antisymmetry and first Bianchi identity",
        "flag.curvature.symmetries", "algebraic", 500)
def _(cfg, rng, n):
    worst = 0.0
    for _ in range(n):
        pt = flag.random_point(rng)
        X, Y, Z = (flag.random_tangent(rng, pt) for _ in range(3))
        worst = max(worst, (flag.curvature(X, Y, Z) + flag.curvature(Y, X, Z)).norm())
        bianchi = (flag.curvature(X, Y, Z) + flag.curvature(Y, Z, X)
                   + flag.curvature(Z, X, Y))
        worst = max(worst, bianchi.norm())
        worst = max(worst, flag.curvature(X, X, X).norm())
    return worst


@_check("flag", "curvature", "holomorphic sectional curvature spot values",
        "flag.curvature.holsec_spot", "algebraic", 1)
def _(cfg, rng, n):
    base = flag.Point(flag.BASE_POINT_REP)
    worst = 0.0
    for b in range(3):
        X = flag.Tangent(base, np.eye(6)[2 * b])
        worst = max(worst, abs(flag.hol_sec_curvature(X) - 4.0))
    mixed = flag.Tangent(base, np.array([1.0, 0, 1.0, 0, 0, 0]) / math.sqrt(2))
    worst = max(worst, abs(flag.hol_sec_curvature(mixed) - 1.0))
    return worst


@_check("flag", "curvature", "holomorphic curvature agrees with the tensor contraction",
        "flag.curvature.holsec_consistency", "algebraic", 1000)
def _(cfg, rng, n):
    worst = 0.0
    for _ in range(n):
        pt = flag.random_point(rng)
        v = rng.standard_normal(6)
        v /= np.linalg.norm(v)
        X = flag.Tangent(pt, v)
        JX = flag.complex_structure(X)
        worst = max(worst, abs(flag.metric(flag.curvature(X, JX, JX), X)
                               - flag.hol_sec_curvature(X)))
    return worst


@_check("flag", "curvature", "holomorphic sectional curvature never exceeds four",
        "flag.curvature.holsec_bound", "bound", 10000)
def _(cfg, rng, n):
    base = flag.Point(flag.BASE_POINT_REP)
    worst = -math.inf
    for _ in range(n):
        v = rng.standard_normal(6)
        v /= np.linalg.norm(v)
        worst = max(worst, flag.hol_sec_curvature(flag.Tangent(base, v)))
    return max(worst - 4.0, 0.0)


def _flag_curvature_samplers():
    def scene(rng):
        center = flag.random_point(rng)
        return center, rng.standard_normal(6), rng.standard_normal(6), rng.standard_normal(6)

    def closed(rng):
        center, u, v, w = scene(rng)
        X = flag.Tangent(center, u)
        Y = flag.Tangent(center, v)
        Z = flag.Tangent(center, w)
        return flag.curvature(X, Y, Z).coeffs  # frame is orthonormal at 0

    def numeric(rng, step):
        center, u, v, w = scene(rng)
        met, _ = flag.chart_fields(center)
        R = kernels.riemann(met, np.zeros(6), step)
        Rl = oracle.lower_curvature(met, np.zeros(6), R)
        return np.einsum("ijkl,i,j,k->l", Rl, u, v, w)

    return closed, numeric


@_check("flag", "curvature", "closed form matches the numeric curvature",
        "flag.curvature.closed_vs_numeric", "curvature", 100)
def _(cfg, rng, n):
    closed, numeric = _flag_curvature_samplers()
    cmp = oracle.compare_tensor(
        closed, lambda r: numeric(r, cfg.step), n, cfg.seed, cfg.tol("curvature")
    )
    return cmp.max_rel


@_check("flag", "nk-defect", "symmetrized covariant derivative of J vanishes",
        "flag.nk.symmetrized_nablaJ", "nk-defect", 100)
def _(cfg, rng, n):
    worst = 0.0
    for _ in range(n):
        met, jf = flag.chart_fields(flag.random_point(rng))
        g0 = met.components(np.zeros(6))
        T = kernels.nabla_structure(met, jf, np.zeros(6), cfg.step)
        x = rng.standard_normal(6)
        v = np.einsum("ikj,i,j->k", T, x, x)
        worst = max(worst, math.sqrt(max(v @ g0 @ v, 0.0)) / (x @ g0 @ x))
    return worst


@_check("flag", "nk-defect", "the weighted companions are Kahler",
        "flag.kahler.companions_nablaJ", "kahler-defect", 60)
def _(cfg, rng, n):
    worst = 0.0
    for i in range(n):
        b = i % 3
        met, jf = flag.chart_fields(flag.random_point(rng), weighted_block=b, structure=b + 1)
        T = kernels.nabla_structure(met, jf, np.zeros(6), cfg.step)
        worst = max(worst, float(np.max(np.abs(T))))
    return worst


@_check("flag", "nk-defect", "nabla J maps block pairs to the remaining block",
        "flag.nk.nablaJ_cross_blocks", "nk-defect", 30)
def _(cfg, rng, n):
    worst = 0.0
    pairs = ((0, 1, 2), (1, 2, 0), (2, 0, 1))
    for s in range(n):
        pt = flag.random_point(rng)
        met, jf = flag.chart_fields(pt)
        T = kernels.nabla_structure(met, jf, np.zeros(6), cfg.step)
        i, j, k = pairs[s % 3]
        x = np.zeros(6)
        y = np.zeros(6)
        x[2 * i:2 * i + 2] = rng.standard_normal(2)
        y[2 * j:2 * j + 2] = rng.standard_normal(2)
        v = np.einsum("ikj,i,j->k", T, x, y)
        leak = np.linalg.norm(np.delete(v, [2 * k, 2 * k + 1]))
        worst = max(worst, leak / (np.linalg.norm(x) * np.linalg.norm(y)))
        # same-block arguments must vanish
        v2 = np.einsum("ikj,i,j->k", T, x, x)
        worst = max(worst, float(np.linalg.norm(v2)) / (x @ x))
    return worst


@_check("flag", "nk-defect", "numeric connection is metric compatible",
        "flag.nk.metric_compatibility", "compatibility", 20)
def _(cfg, rng, n):
    worst = 0.0
    for _ in range(n):
        met, _ = flag.chart_fields(flag.random_point(rng))
        worst = max(worst, oracle.metric_compatibility_defect(met, np.zeros(6), cfg.step))
    return worst


@_check("flag", "decompose", "identity oracle decomposes to the identity",
        "flag.decompose.identity", "decompose", 1)
def _(cfg, rng, n):
    G = flag.decompose_isometry(flag.element_oracle(flag.identity_isometry()),
                                cfg.tol("decompose"), rng)
    return G.distance(flag.identity_isometry())


@_check("flag", "decompose", "random elements round-trip through decomposition",
        "flag.decompose.round_trip", "decompose", 500)
def _(cfg, rng, n):
    worst = 0.0
    for _ in range(n):
        F = flag.random_isometry(rng)
        G = flag.decompose_isometry(flag.element_oracle(F), cfg.tol("decompose"), rng)
        worst = max(worst, F.distance(G))
    return worst


@_check("flag", "fuzz-group", "composition is associative",
        "flag.group.associativity", "group", 1000)
def _(cfg, rng, n):
    worst = 0.0
    for _ in range(n):
        F1, F2, F3 = (flag.random_isometry(rng) for _ in range(3))
        worst = max(worst, F1.compose(F2).compose(F3).distance(F1.compose(F2.compose(F3))))
    return worst


@_check("flag", "fuzz-group", "identity and inverses",
        "flag.group.identity_inverse", "group", 1000)
def _(cfg, rng, n):
    worst = 0.0
    e = flag.identity_isometry()
    for _ in range(n):
        F = flag.random_isometry(rng)
        worst = max(worst, F.compose(e).distance(F), e.compose(F).distance(F))
        worst = max(worst, F.compose(F.inverse()).distance(e))
        worst = max(worst, F.inverse().compose(F).distance(e))
    return worst


@_check("flag", "fuzz-group", "composition is action compatible",
        "flag.group.action_compatibility", "group", 1000)
def _(cfg, rng, n):
    worst = 0.0
    for _ in range(n):
        F1, F2 = flag.random_isometry(rng), flag.random_isometry(rng)
        pt = flag.random_point(rng)
        worst = max(worst, F1.compose(F2).apply(pt).distance(F1.apply(F2.apply(pt))))
    return worst


# ===========================================================================
# runner
# ===========================================================================

def checks_for(space: str, suite: str):
    if space not in SPACES:
        raise ValueError(f"unknown space {space!r}; expected one of {SPACES}")
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; expected one of {SUITES}")
    if suite == "all":
        out = []
        for s in ("invariants", "curvature", "nk-defect", "decompose", "fuzz-group"):
            out.extend(_REGISTRY.get((space, s), []))
        return out
    found = _REGISTRY.get((space, suite), [])
    if not found:
        raise ValueError(f"suite {suite!r} is not available for space {space!r}")
    return found


def run(config: RunConfig) -> VerificationReport:
    """Execute the configured suite and assemble the report."""
    checks = checks_for(config.space, config.suite)
    start = time.perf_counter()
    records = [c.record(config) for c in checks]
    echo = {
        "space": config.space,
        "suite": config.suite,
        "samples": config.samples,
        "seed": config.seed,
        "step": format(config.step, ".17g"),
        "tol": ",".join(f"{k}={v:.3e}" for k, v in sorted(config.tolerances.items()))
        or "(defaults)",
        "kernels": kernels.backend_name,
    }
    report = VerificationReport(config=echo, records=records)
    report.seconds = time.perf_counter() - start
    return report
