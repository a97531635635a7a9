"""Backend selection for the search kernels.

The compiled module is used when it imports; set ``MCAYLEY_PURE_PYTHON=1``
to force the reference implementation.
"""

import os

if os.environ.get("MCAYLEY_PURE_PYTHON", "") not in ("", "0"):
    from . import _pykernels as backend
else:
    try:
        from . import _ckernels as backend
    except ImportError:
        from . import _pykernels as backend

automorphisms = backend.automorphisms
isomorphism = backend.isomorphism
closure = backend.closure
BACKEND = backend.BACKEND
