"""Backend selection for the hot kernels.

The compiled Cython module is used when it was built and imports cleanly.
Setting ``SBRECON_PURE_PYTHON=1`` forces the numpy fallback.
"""

import os

from . import _kernels_py

_compiled = None
if os.environ.get("SBRECON_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled  # type: ignore[attr-defined]
    except ImportError:  # pragma: no cover - depends on the build
        _compiled = None

_active = _compiled if _compiled is not None else _kernels_py

BACKEND = _active.BACKEND

soft_threshold = _active.soft_threshold
banded_soft_threshold = _active.banded_soft_threshold
group_soft_threshold = _active.group_soft_threshold
cramer3 = _active.cramer3
radon_triplets = _active.radon_triplets


def available_backends():
    """Return the kernel modules that can be used in this process, by name."""
    out = {"python": _kernels_py}
    if _compiled is not None:
        out["cython"] = _compiled
    return out
