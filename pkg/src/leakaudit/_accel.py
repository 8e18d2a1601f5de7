"""Backend selection for the hot training kernels.

The numba path is used when numba imports cleanly and ``LEAKAUDIT_BACKEND``
is unset or ``"numba"``.  Setting ``LEAKAUDIT_BACKEND=numpy`` forces the
pure-numpy path everywhere (handy for debugging and for the benchmark).
"""

import os

BACKEND_ENV = "LEAKAUDIT_BACKEND"

try:
    import numba  # noqa: F401

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    HAS_NUMBA = False


def requested_backend():
    value = os.environ.get(BACKEND_ENV, "numba").strip().lower()
    if value not in ("numba", "numpy"):
        raise ValueError(f"{BACKEND_ENV} must be 'numba' or 'numpy', got {value!r}")
    return value


def use_numba():
    """True when the numba kernels should be used for this call."""
    return HAS_NUMBA and requested_backend() == "numba"
