"""Backend selection for the numerical inner loops.

At import time the compiled extension (``wnpreg._core``) is preferred;
if it is missing, or ``WNPREG_BACKEND=python`` is set, the pure-numpy
implementation is used instead.  ``WNPREG_BACKEND=compiled`` insists on
the extension and fails loudly when it cannot be imported.
"""

from __future__ import annotations

import os

from . import _core_py

_requested = os.environ.get("WNPREG_BACKEND", "auto").lower()
if _requested not in ("auto", "compiled", "python"):
    raise ValueError(
        f"WNPREG_BACKEND={_requested!r} not understood (auto|compiled|python)")

_core = None
if _requested in ("auto", "compiled"):
    try:
        from . import _core  # type: ignore[no-redef]
    except ImportError:
        if _requested == "compiled":
            raise
        _core = None

if _core is not None:
    BACKEND = "compiled"
    ftilde_tstats_gauss = _core.ftilde_tstats_gauss
    wp_sums_gauss = _core.wp_sums_gauss
else:
    BACKEND = "python"
    ftilde_tstats_gauss = _core_py.ftilde_tstats_gauss
    wp_sums_gauss = _core_py.wp_sums_gauss

# generic-kernel paths are numpy-only
ftilde_tstats_kernel = _core_py.ftilde_tstats_kernel
wp_sums_kernel = _core_py.wp_sums_kernel
