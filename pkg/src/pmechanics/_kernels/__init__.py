"""Hot kernels: compiled Cython versions when built, numpy fallbacks otherwise.

Set ``PMECH_PURE_PYTHON=1`` to force the fallback.  ``BACKEND`` names the
implementation that was selected at import.
"""

import os

from . import _pykernels as python

compiled = None
if os.environ.get("PMECH_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as compiled
    except ImportError:
        compiled = None

_impl = compiled if compiled is not None else python
BACKEND = "cython" if compiled is not None else "python"

twisted_convolution_direct = _impl.twisted_convolution_direct
clifford_product_dense = _impl.clifford_product_dense
kg_leapfrog = _impl.kg_leapfrog

__all__ = [
    "BACKEND",
    "compiled",
    "python",
    "twisted_convolution_direct",
    "clifford_product_dense",
    "kg_leapfrog",
]
