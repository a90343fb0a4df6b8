"""Chart-based finite-difference differential geometry.

Independent of every closed-form tensor in the space modules: metric
components sampled through a chart feed central-difference Christoffel
symbols, the curvature tensor, and covariant derivatives of endomorphism
fields.  Used to validate the closed forms, never the other way around.

Conventions:

* ``christoffel`` returns Gamma[k, i, j] = Gamma^k_{ij};
* ``riemann_numeric`` returns R[i, j, k, l] = (R(d_i, d_j) d_k)^l with
  R(X, Y) = nabla_X nabla_Y - nabla_Y nabla_X - nabla_{[X,Y]};
* ``nabla_J_numeric`` returns T[i] = nabla_{d_i} J as matrices.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as kernels

__all__ = [
    "Chart",
    "MetricField",
    "as_metric_field",
    "as_structure_field",
    "pullback_metric",
    "christoffel",
    "riemann_numeric",
    "lower_curvature",
    "nabla_J_numeric",
    "metric_compatibility_defect",
    "TensorComparison",
    "compare_tensor",
]


def as_metric_field(obj, dim: int = 6):
    """Accept a backend field, anything with .components, or a callable."""
    if hasattr(obj, "components"):
        return obj
    if callable(obj):
        return kernels.callback_metric_field(obj, dim)
    raise TypeError("not a metric field: expected .components or a callable")


def as_structure_field(obj, dim: int = 6):
    if hasattr(obj, "matrix"):
        return obj
    if callable(obj):
        return kernels.callback_structure_field(obj, dim)
    raise TypeError("not a structure field: expected .matrix or a callable")


@dataclass
class Chart:
    """Local parametrization of a space around a center point.

    ``map`` sends a coordinate vector to a manifold point.  ``frame`` gives
    the chart partials as tangent objects; when absent it is built by
    central differences of ``map`` through the ``embed``/``tangent`` hooks
    (embed: point -> ambient array, tangent: (point, ambient) -> tangent).
    """

    dim: int
    center: object
    map: object
    frame: object = None
    embed: object = None
    tangent: object = None
    fd_step: float = 1e-6

    def __post_init__(self):
        origin = self.map(np.zeros(self.dim))
        if hasattr(origin, "distance") and origin.distance(self.center) > 1e-8:
            raise ValueError("chart map does not send 0 to the center point")

    def frame_at(self, x):
        x = np.asarray(x, dtype=float)
        if self.frame is not None:
            return self.frame(x)
        if self.embed is None or self.tangent is None:
            raise ValueError("finite-difference frames need embed/tangent hooks")
        pt = self.map(x)
        out = []
        for i in range(self.dim):
            xp, xm = x.copy(), x.copy()
            xp[i] += self.fd_step
            xm[i] -= self.fd_step
            vel = (self.embed(self.map(xp)) - self.embed(self.map(xm))) / (
                2.0 * self.fd_step
            )
            out.append(self.tangent(pt, vel))
        return out


@dataclass
class MetricField:
    """Symmetric-matrix field in chart coordinates."""

    fn: object
    dim: int = 6

    def components(self, x) -> np.ndarray:
        return np.asarray(self.fn(np.asarray(x, dtype=float)), dtype=float)


def pullback_metric(chart: Chart, metric_fn) -> MetricField:
    """Metric components from a chart and a tangent-space inner product."""

    def components(x):
        frame = chart.frame_at(x)
        n = len(frame)
        g = np.empty((n, n))
        for i in range(n):
            for j in range(i, n):
                g[i, j] = g[j, i] = metric_fn(frame[i], frame[j])
        return g

    return MetricField(components, chart.dim)


def christoffel(m, x, h: float = 1e-3, richardson: bool = True) -> np.ndarray:
    """Levi-Civita connection symbols by central differences."""
    return kernels.christoffel(as_metric_field(m), np.asarray(x, dtype=float), h, richardson)


def riemann_numeric(m, x, h: float = 1e-3, richardson: bool = True) -> np.ndarray:
    """Curvature tensor from derivatives of the connection symbols."""
    return kernels.riemann(as_metric_field(m), np.asarray(x, dtype=float), h, richardson)


def lower_curvature(m, x, R: np.ndarray) -> np.ndarray:
    """R_{ijkl} from R[i,j,k,l] = R^l and the metric at x."""
    g = as_metric_field(m).components(np.asarray(x, dtype=float))
    return np.einsum("ijkm,ml->ijkl", R, g)


def nabla_J_numeric(m, jfield, x, h: float = 1e-3, richardson: bool = True) -> np.ndarray:
    """Covariant derivative of an endomorphism field along each coordinate."""
    return kernels.nabla_structure(
        as_metric_field(m), as_structure_field(jfield), np.asarray(x, dtype=float), h, richardson
    )


def metric_compatibility_defect(m, x, h: float = 1e-3, richardson: bool = True) -> float:
    """Max component of the numeric nabla g (a sanity check of the symbols)."""
    field = as_metric_field(m)
    x = np.asarray(x, dtype=float)
    gamma = kernels.christoffel(field, x, h, richardson)
    dg = np.stack(
        [
            kernels.pure._derivative(field.components, x, i, h, richardson)
            for i in range(field.dim)
        ]
    )
    g = field.components(x)
    nabla_g = dg - np.einsum("lki,lj->kij", gamma, g) - np.einsum("lkj,il->kij", gamma, g)
    return float(np.max(np.abs(nabla_g)))


@dataclass
class TensorComparison:
    """Outcome of a closed-form vs numeric tensor comparison."""

    samples: int
    tolerance: float
    max_abs: float = 0.0
    max_rel: float = 0.0
    per_sample: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return self.samples > 0 and self.max_rel <= self.tolerance


def compare_tensor(closed_sampler, numeric_sampler, samples: int, seed: int,
                   tolerance: float = 1e-4) -> TensorComparison:
    """Drive two samplers with identically seeded generators and compare.

    Both samplers must consume identical random draws so that sample i
    describes the same scene on both sides.  The relative deviation of a
    sample uses the larger tensor magnitude as denominator (tensors contain
    exact zeros).
    """
    out = TensorComparison(samples=samples, tolerance=tolerance)
    rng_closed = np.random.default_rng(np.random.Philox(seed))
    rng_numeric = np.random.default_rng(np.random.Philox(seed))
    start = time.perf_counter()
    for _ in range(samples):
        a = np.asarray(closed_sampler(rng_closed), dtype=float)
        b = np.asarray(numeric_sampler(rng_numeric), dtype=float)
        if a.shape != b.shape:
            raise ValueError("samplers produced tensors of different shapes")
        dev = float(np.max(np.abs(a - b)))
        scale = max(float(np.max(np.abs(a))), float(np.max(np.abs(b))), 1e-300)
        out.per_sample.append((dev, dev / scale))
        out.max_abs = max(out.max_abs, dev)
        out.max_rel = max(out.max_rel, dev / scale)
    out.seconds = time.perf_counter() - start
    return out
