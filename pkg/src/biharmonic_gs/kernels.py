"""Backend selection for the hot loops of the radial solver.

The compiled Cython module is used when it was built; otherwise the numpy/scipy
fallback is used. Set ``BIHARMONIC_GS_BACKEND=python`` to force the fallback.
"""

import os
from contextlib import contextmanager

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    BACKENDS["cython"] = _ckernels

_requested = os.environ.get("BIHARMONIC_GS_BACKEND", "").strip().lower()
if _requested and _requested not in ("python", "cython"):
    raise ImportError(f"unknown BIHARMONIC_GS_BACKEND {_requested!r}")
if _requested == "cython" and _ckernels is None:
    raise ImportError("BIHARMONIC_GS_BACKEND=cython but the extension is not built")

_active = _requested or ("cython" if _ckernels is not None else "python")


def backend_name():
    return _active


def active():
    return BACKENDS[_active]


@contextmanager
def use_backend(name):
    """Temporarily switch the active backend (tests and benchmarks)."""
    global _active
    if name not in BACKENDS:
        raise KeyError(f"backend {name!r} unavailable; have {sorted(BACKENDS)}")
    previous, _active = _active, name
    try:
        yield BACKENDS[name]
    finally:
        _active = previous


def available():
    return sorted(BACKENDS)
