"""Backend selection for the DP layer relaxation.

The compiled kernel (``_dpkernel``, Cython + C++ hash map) is used when it
imports and every key/value of the layer provably fits in int64. Otherwise
the pure-Python implementation runs. Set ``DELTAFPT_PURE_PYTHON=1`` to force
the fallback.
"""

import os

import numpy as np

from . import _dpkernel_py

_compiled = None
if not os.environ.get("DELTAFPT_PURE_PYTHON"):
    try:
        from . import _dpkernel as _compiled
    except ImportError:  # extension not built
        _compiled = None

HAVE_COMPILED = _compiled is not None
INT64_LIMIT = 2 ** 62

__all__ = ["HAVE_COMPILED", "INT64_LIMIT", "backend_name", "relax_layer"]


def backend_name(backend=None):
    if backend is None:
        return "cython" if HAVE_COMPILED else "python"
    return backend


def relax_layer(prev_keys, prev_vals, gamma_next, digits, costs, eta_steps,
                lo, hi, box, *, track_nonzero, use_max, ub, max_states,
                magnitude, backend=None):
    """Relax one layer; ``magnitude`` bounds every key and value in absolute value.

    ``backend`` may be ``"cython"``, ``"python"`` or None (automatic).
    Always returns plain Python lists.
    """
    want = backend_name(backend)
    if want == "cython" and not HAVE_COMPILED:
        raise RuntimeError("compiled DP kernel is not available")
    use_compiled = want == "cython" and magnitude < INT64_LIMIT
    if use_compiled:
        m = len(box)
        out = _compiled.relax_layer(
            np.asarray(prev_keys, dtype=np.int64),
            np.asarray(prev_vals, dtype=np.int64),
            np.ascontiguousarray(gamma_next, dtype=np.int64),
            np.asarray(digits, dtype=np.int64),
            np.asarray(costs, dtype=np.int64),
            np.asarray(eta_steps, dtype=np.int64).reshape(len(digits), m),
            np.asarray(lo, dtype=np.int64),
            np.asarray(hi, dtype=np.int64),
            np.asarray(box, dtype=np.int64),
            bool(track_nonzero),
            bool(use_max),
            INT64_LIMIT if ub is None else int(ub),
            INT64_LIMIT if max_states is None else int(max_states),
        )
        return tuple(arr.tolist() for arr in out)
    gn = gamma_next.tolist() if isinstance(gamma_next, np.ndarray) else gamma_next
    return _dpkernel_py.relax_layer(
        list(prev_keys), list(prev_vals), gn, list(digits), list(costs),
        [tuple(s) for s in eta_steps], list(lo), list(hi), list(box),
        track_nonzero, use_max, ub, max_states,
    )
