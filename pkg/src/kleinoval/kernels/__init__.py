"""Hot-loop kernels with a compiled core and a numpy fallback.

The Cython module `_native` is preferred when its build artifact is
importable; otherwise the numpy twin in `pure` serves.  Set the
environment variable KLEINOVAL_PURE=1 to force the fallback (the
benchmark and the parity tests import both twins directly).
"""

import os

from . import pure

if os.environ.get("KLEINOVAL_PURE"):
    _impl = pure
    HAVE_NATIVE = False
else:
    try:
        from . import _native as _impl  # type: ignore[attr-defined]

        HAVE_NATIVE = True
    except ImportError:
        _impl = pure
        HAVE_NATIVE = False

linear_form_values = _impl.linear_form_values
quadratic_form_values = _impl.quadratic_form_values
incidence_counts = _impl.incidence_counts
conic_plane_scan = _impl.conic_plane_scan


def backend_name() -> str:
    return "native" if HAVE_NATIVE else "pure"
