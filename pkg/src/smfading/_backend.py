"""Selects the compiled kernels when the extension is built.

Set ``SMFADING_PURE_PYTHON=1`` to force the numpy fallback.
"""

import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("SMFADING_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl  # noqa: F811
        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels

mb_real_sum = _impl.mb_real_sum
ml_bit_errors = _impl.ml_bit_errors
polar_gains = _impl.polar_gains
