"""Backend selection for the enumeration kernels.

The compiled ``_kernels`` extension is used when it was built; otherwise, or
when ``AMBIGUITY_LAB_PURE=1`` is set, the numpy implementation is loaded.
"""

import os

if os.environ.get("AMBIGUITY_LAB_PURE") == "1":
    from . import _kernels_py as _impl

    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl

        BACKEND = "cython"
    except ImportError:
        from . import _kernels_py as _impl

        BACKEND = "python"

enum_rank_tables = _impl.enum_rank_tables
enum_list_functions = _impl.enum_list_functions
enum_sideinfo_functions = _impl.enum_sideinfo_functions

__all__ = ["BACKEND", "enum_rank_tables", "enum_list_functions", "enum_sideinfo_functions"]
