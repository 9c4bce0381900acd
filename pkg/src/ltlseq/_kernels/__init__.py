"""Hot loops with two interchangeable backends.

The numba backend is used when numba imports cleanly; setting the
environment variable ``LTLSEQ_DISABLE_NUMBA=1`` forces the pure-numpy
backend.  Both expose the same functions with identical results.
"""

import importlib
import os

from . import numpy_impl

_disabled = os.environ.get("LTLSEQ_DISABLE_NUMBA", "").strip().lower() in {
    "1", "true", "yes", "on"}

numba_impl = None
if not _disabled:
    try:
        numba_impl = importlib.import_module(f"{__name__}.numba_impl")
    except ImportError:  # numba missing or broken: fall back silently
        numba_impl = None

_active = numba_impl if numba_impl is not None else numpy_impl
BACKEND = "numba" if _active is numba_impl else "numpy"

lasso_accepts = _active.lasso_accepts
value_iteration = _active.value_iteration
q_episode = _active.q_episode


def backend(name: str):
    """Return the module for ``"numba"`` or ``"numpy"`` explicitly."""
    if name == "numpy":
        return numpy_impl
    if name == "numba":
        if numba_impl is None:
            raise RuntimeError("numba backend unavailable")
        return numba_impl
    raise ValueError(f"unknown backend {name!r}")
