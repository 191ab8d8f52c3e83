"""Backend selection for the dense mod-p elimination kernels.

Prefers the compiled Cython extension, falls back to the numpy
implementation.  ``BACKEND`` records which one is active; set
``SQUARECAT_FORCE_PURE=1`` in the environment to force the fallback
(used by the backend-comparison benchmark and tests).
"""

import os

from . import pure

if os.environ.get("SQUARECAT_FORCE_PURE"):
    _impl = pure
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = pure

BACKEND = _impl.BACKEND
rref_inplace = _impl.rref_inplace
rref_f2_inplace = _impl.rref_f2_inplace
