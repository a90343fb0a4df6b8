"""Kernel backend selection.

The compiled extension implements the same evaluators and stencils as the
pure NumPy module; whichever is available is picked at import time.  Set
NKSIX_KERNELS=python to force the fallback (e.g. for benchmarking) or
NKSIX_KERNELS=compiled to fail loudly when the extension is missing.
"""

import os

from . import pure

_choice = os.environ.get("NKSIX_KERNELS", "auto").strip().lower()

if _choice in ("python", "pure"):
    _impl = pure
elif _choice in ("auto", "", "compiled", "fast"):
    try:
        from . import _fast as _impl
    except ImportError:
        if _choice in ("compiled", "fast"):
            raise
        _impl = pure
else:
    raise RuntimeError(f"unrecognized NKSIX_KERNELS value {_choice!r}")

backend_name = _impl.BACKEND

s3s3_metric_field = _impl.s3s3_metric_field
s3s3_structure_field = _impl.s3s3_structure_field
cp3_metric_field = _impl.cp3_metric_field
cp3_structure_field = _impl.cp3_structure_field
flag_metric_field = _impl.flag_metric_field
flag_structure_field = _impl.flag_structure_field
callback_metric_field = _impl.callback_metric_field
callback_structure_field = _impl.callback_structure_field
christoffel = _impl.christoffel
riemann = _impl.riemann
nabla_structure = _impl.nabla_structure
metric_inverse = pure.metric_inverse

FLAG_BASIS = pure.FLAG_BASIS
flag_structure_blocks = pure.flag_structure_blocks
S3S3_METRIC = pure.S3S3_METRIC
S3S3_J = pure.S3S3_J
