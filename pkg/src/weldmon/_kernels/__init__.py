"""Numeric kernels: compiled fast path with a pure-numpy fallback.

The compiled extension (built from ``_fast.pyx`` at install time) and the
numpy fallback implement the same operations with the same update ordering,
so either backend yields a valid, internally deterministic pipeline.  The
backend is chosen once at import:

* default: use the compiled kernels, silently falling back to numpy when
  the extension was not built;
* ``WELDMON_BACKEND=numpy`` forces the fallback;
* ``WELDMON_BACKEND=compiled`` requires the extension and raises if absent.
"""

import os

import numpy as np

from . import _numpy

_requested = os.environ.get("WELDMON_BACKEND", "").strip().lower()

if _requested == "numpy":
    _impl = _numpy
    BACKEND = "numpy"
elif _requested in ("", "compiled"):
    try:
        from . import _fast as _impl

        BACKEND = "compiled"
    except ImportError:
        if _requested == "compiled":
            raise
        _impl = _numpy
        BACKEND = "numpy"
else:
    raise ImportError(f"unknown WELDMON_BACKEND {_requested!r}")

moving_average = _impl.moving_average
som_epoch = _impl.som_epoch
mlp_epoch = _impl.mlp_epoch
linear_epoch = _impl.linear_epoch


def compiled_available() -> bool:
    try:
        from . import _fast  # noqa: F401
    except ImportError:
        return False
    return True


def get_impl(name: str):
    """Return a specific backend module ("numpy" or "compiled")."""
    if name == "numpy":
        return _numpy
    if name == "compiled":
        from . import _fast

        return _fast
    raise ValueError(f"unknown backend {name!r}")


def mlp_grad(ws, bs, x, t):
    """Per-sample loss and analytic gradients of the active training kernel.

    Runs a one-pattern epoch with unit learning rate on scratch copies and
    reads the gradients back from the weight deltas, so the gradient returned
    is exactly the one the selected backend applies during training.
    """
    ws_c = [w.copy() for w in ws]
    bs_c = [b.copy() for b in bs]
    order = np.zeros(1, dtype=np.intp)
    mse = mlp_epoch(ws_c, bs_c, x[None, :], t[None, :], order, 1.0)
    gws = [w - wc for w, wc in zip(ws, ws_c)]
    gbs = [b - bc for b, bc in zip(bs, bs_c)]
    return 2.0 * mse, gws, gbs


def linear_grad(wout, phi_row, t_row, l2):
    """Analytic gradient of the linear output-layer kernel for one pattern."""
    wout_c = np.ascontiguousarray(wout.copy())
    order = np.zeros(1, dtype=np.intp)
    linear_epoch(wout_c, phi_row[None, :], t_row[None, :], order, 1.0, l2)
    return wout - wout_c
