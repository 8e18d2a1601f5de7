"""Inner loops for two-layer networks: predictions, batch gradients, one epoch.

Two implementations share one calling convention:

* ``_numba_kernels``: the activation is evaluated through a polynomial
  exponential so LLVM can vectorize the hidden-unit loops (libm ``tanh`` does
  not vectorize); it agrees with ``tanh(z / 2)`` to about 5e-15.
* ``_numpy_kernels``: plain numpy, using ``np.tanh``.

Parameters are passed as raw arrays: ``AT`` is the input weight matrix stored
transposed, shape ``(q, k)``; ``b`` and ``c`` have shape ``(k,)``; ``c0`` is a
length-1 array so kernels can update it in place.

Loss codes: 0 is squared loss, 1 is log loss on the squashed output
``p = (1 + clip(h, -1 + LOG_EPS, 1 - LOG_EPS)) / 2``.
Optimizer codes: 0 is SGD, 1 is Adam.
"""

from .._accel import HAS_NUMBA, requested_backend
from ._consts import ADAM, ADAM_EPS, LOG, LOG_EPS, SGD, SQUARED  # noqa: F401

_NAMES = ("sigma", "predict", "losses", "batch_grad", "train_epoch")


def _table(module, prefix):
    return {name: getattr(module, prefix + name) for name in _NAMES}


def get_kernels(backend=None):
    """Kernel table for ``backend`` ('numba' or 'numpy'); default from the environment."""
    backend = backend or requested_backend()
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "numba" and HAS_NUMBA:
        from . import _numba_kernels

        return _table(_numba_kernels, "nb_")
    from . import _numpy_kernels

    return _table(_numpy_kernels, "np_")
