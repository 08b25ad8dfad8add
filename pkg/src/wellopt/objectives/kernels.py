"""Backend selection for the transport kernel.

The compiled extension is used when it imports; otherwise, or when
``WELLOPT_BACKEND=python`` is set, the numpy implementation is used.
"""
import os

from . import _transport_py

try:
    from . import _transport_ext
except ImportError:  # extension not built
    _transport_ext = None

BACKENDS = {"python": _transport_py.advance_saturation}
if _transport_ext is not None:
    BACKENDS["compiled"] = _transport_ext.advance_saturation

_requested = os.environ.get("WELLOPT_BACKEND", "").strip().lower()
if _requested and _requested not in ("python", "compiled"):
    raise ImportError(f"WELLOPT_BACKEND must be 'python' or 'compiled', got {_requested!r}")
if _requested == "compiled" and "compiled" not in BACKENDS:
    raise ImportError("WELLOPT_BACKEND=compiled but the extension module is not built")

BACKEND = _requested or ("compiled" if "compiled" in BACKENDS else "python")
advance_saturation = BACKENDS[BACKEND]


def get_kernel(name=None):
    """Return the transport kernel for ``name`` (default: the active backend)."""
    if name is None:
        return advance_saturation
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} unavailable; have {sorted(BACKENDS)}") from None
