"""Select the LSTM kernel backend at import time.

The compiled extension is used when it is importable; setting
``LDGBA_PLANNER_PURE=1`` forces the numpy fallback.
"""
from __future__ import annotations

import os

from . import _kernels_py

BACKEND = "python"
if os.environ.get("LDGBA_PLANNER_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _kernels_py
else:
    _impl = _kernels_py

lstm_forward = _impl.lstm_forward
lstm_backward = _impl.lstm_backward
