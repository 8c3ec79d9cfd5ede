"""Scalar special functions callable from numba kernels.

The scipy (Cephes) implementations are registered with LLVM under stable
symbol names so that jitted samplers share the numpy-side code paths and
remain cacheable across processes.
"""

import llvmlite.binding as llvm
from numba import types
from numba.extending import get_cython_function_address

_MODULE = "scipy.special.cython_special"
_SYMBOLS = {
    "dalasso_ndtri": "ndtri",
    "dalasso_ndtr": "__pyx_fuse_1ndtr",
    "dalasso_log_ndtr": "__pyx_fuse_1log_ndtr",
}

for _alias, _name in _SYMBOLS.items():
    llvm.add_symbol(_alias, get_cython_function_address(_MODULE, _name))

_sig = types.float64(types.float64)
ndtri = types.ExternalFunction("dalasso_ndtri", _sig)
ndtr = types.ExternalFunction("dalasso_ndtr", _sig)
log_ndtr = types.ExternalFunction("dalasso_log_ndtr", _sig)
