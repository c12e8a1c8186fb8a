"""Kernel backend selection.

The compiled extension (Cython) is preferred; the pure-numpy fallback is
used when the extension was not built.  Override with NEXTPM_KERNEL=python
or NEXTPM_KERNEL=cython (the latter raises if the extension is missing).
Both backends produce identical results; see tests/test_kernels.py and
benchmarks/bench_kernels.py.
"""
from __future__ import annotations

import os

from . import _renewal_py

_choice = os.environ.get("NEXTPM_KERNEL", "auto").lower()

if _choice == "python":
    _impl = _renewal_py
    backend_name = "python"
else:
    try:
        from . import _renewal as _impl  # type: ignore[no-redef]

        backend_name = "cython"
    except ImportError:
        if _choice == "cython":
            raise ImportError(
                "NEXTPM_KERNEL=cython but the compiled extension is not built; "
                "run `pip install -e . --no-build-isolation`"
            )
        _impl = _renewal_py
        backend_name = "python"

accumulate_pm_g = _impl.accumulate_pm_g
accumulate_horizon_cm = _impl.accumulate_horizon_cm
accumulate_shifted_cm = _impl.accumulate_shifted_cm


def get_backend(name: str):
    """Return the module implementing the named backend (for benchmarks/tests)."""
    if name == "python":
        return _renewal_py
    if name == "cython":
        from . import _renewal

        return _renewal
    raise ValueError(f"unknown kernel backend {name!r}")
