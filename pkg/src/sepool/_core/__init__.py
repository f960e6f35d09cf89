"""Greedy hierarchy kernels.

The compiled backend is used when the extension imports; otherwise, or when
``SEP_PURE_PYTHON=1`` is set, the pure-Python module takes over. Both expose
``greedy_hierarchy`` with identical results.
"""

import os

from . import _greedy_py

try:
    from . import _greedy as _compiled
except ImportError:  # extension not built
    _compiled = None

BACKENDS = {"python": _greedy_py}
if _compiled is not None:
    BACKENDS["compiled"] = _compiled

if _compiled is not None and os.environ.get("SEP_PURE_PYTHON", "") in ("", "0"):
    DEFAULT_BACKEND = "compiled"
else:
    DEFAULT_BACKEND = "python"


def get_backend(name=None):
    """Return the kernel module called ``name`` (default: the import-time choice)."""
    name = name or DEFAULT_BACKEND
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"unknown or unavailable backend {name!r}; have {sorted(BACKENDS)}") from None
