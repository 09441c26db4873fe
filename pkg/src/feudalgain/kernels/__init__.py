"""Numeric kernel backend selection.

The compiled extension (built from ``_fast.pyx``) is used when available;
otherwise the numpy reference implementation takes over. Set the
environment variable ``FEUDALGAIN_PURE=1`` to force the numpy backend.
"""

import os

from . import pure

if os.environ.get("FEUDALGAIN_PURE"):
    _impl = pure
else:
    try:
        from . import _fast as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = pure

BACKEND = _impl.BACKEND

affine = _impl.affine
affine_backward = _impl.affine_backward
relu = _impl.relu
relu_backward = _impl.relu_backward
tanh = _impl.tanh
tanh_backward = _impl.tanh_backward
adam_step = _impl.adam_step
js_divergence = _impl.js_divergence
