"""Kernel backend selection.

The compiled ``_ccore`` module is used when it is importable; otherwise
the pure-Python ``_purecore`` twin is used. Setting the environment
variable ``GCASIMIR_BACKEND=python`` forces the pure-Python kernels.
"""
import os

if os.environ.get("GCASIMIR_BACKEND", "").lower() == "python":
    from . import _purecore as kernels

    BACKEND = "python"
else:
    try:
        from . import _ccore as kernels

        BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on the build
        from . import _purecore as kernels

        BACKEND = "python"

BARE, GRAPHENE, IDEAL = kernels.BARE, kernels.GRAPHENE, kernels.IDEAL
EXACT, APPROX, ZERO_T, ORDER0 = kernels.EXACT, kernels.APPROX, kernels.ZERO_T, kernels.ORDER0

__all__ = ["kernels", "BACKEND", "BARE", "GRAPHENE", "IDEAL", "EXACT", "APPROX", "ZERO_T", "ORDER0"]
