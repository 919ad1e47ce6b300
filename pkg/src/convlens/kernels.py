"""Backend selection for the hot kernels.

The compiled Cython extension is preferred when importable; the numpy
implementation is the fallback. CONVLENS_BACKEND=python|cython forces a
choice, CONVLENS_THREADS caps the compiled backend's parallelism (results
are identical for any thread count by construction).
"""

import os
import sys

from . import _kernels_py

_forced = os.environ.get("CONVLENS_BACKEND", "auto").lower()

if _forced == "python":
    _impl = _kernels_py
else:
    try:
        from . import _kernels_cy as _impl
    except ImportError:
        if _forced == "cython":
            raise
        _impl = _kernels_py

BACKEND = "cython" if _impl is not _kernels_py else "python"


def thread_count() -> int:
    """Parallelism cap from CONVLENS_THREADS (default 1; bad values ignored)."""
    raw = os.environ.get("CONVLENS_THREADS", "")
    if not raw:
        return 1
    try:
        n = int(raw)
        if n < 1:
            raise ValueError
    except ValueError:
        print(f"convlens: ignoring invalid CONVLENS_THREADS={raw!r}", file=sys.stderr)
        return 1
    return n


def conv2d_forward(x, w, b, stride, pad):
    return _impl.conv2d_forward(x, w, b, stride, pad, thread_count())


def conv2d_input_grad(gy, w, stride, pad, in_shape):
    return _impl.conv2d_input_grad(gy, w, stride, pad, tuple(in_shape), thread_count())


def maxpool2x2(x):
    return _impl.maxpool2x2(x, thread_count())


def dense_forward(x, w, b):
    return _impl.dense_forward(x, w, b, thread_count())


def dense_input_grad(gy, w):
    return _impl.dense_input_grad(gy, w, thread_count())
