"""Hot kernels with a compiled backend and a NumPy fallback.

The compiled extension ``_ckernels`` is used when it imports cleanly; set
``FRESNEL_RIS_PURE_PYTHON=1`` to force the NumPy path.
"""

import os

from . import _pykernels

_BACKENDS = {"python": _pykernels}

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None
else:
    _BACKENDS["cython"] = _ckernels

if _ckernels is not None and not os.environ.get("FRESNEL_RIS_PURE_PYTHON"):
    BACKEND = "cython"
else:
    BACKEND = "python"

ellipse_min_distance = _BACKENDS[BACKEND].ellipse_min_distance


def available_backends():
    return sorted(_BACKENDS)


def get_backend(name):
    """Module implementing the kernels for backend ``name`` ("python" or "cython")."""
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} unavailable; have {available_backends()}") from None
