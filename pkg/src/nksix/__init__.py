"""Numerical models of the homogeneous nearly Kahler six-manifolds.

Subpackages model the product of two three-spheres (``s3s3``), complex
projective three-space (``cp3``) and the manifold of full flags in C^3
(``flag``): their metrics, almost complex and product structures,
curvature tensors, and full isometry groups with constructive
decomposition of black-box isometries into group coordinates.  The
``oracle`` module provides independent chart-based finite-difference
geometry used to verify every closed form, and ``suites`` packages the
checks behind the ``nksix`` command line.
"""

from . import _kernels

__version__ = "0.1.0"

kernel_backend = _kernels.backend_name
