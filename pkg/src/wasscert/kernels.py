"""Backend selection for the table kernels.

The compiled extension is used when it was built; setting the environment
variable ``WASSCERT_PURE_PYTHON=1`` forces the numpy fallback.
"""
import os

if os.environ.get("WASSCERT_PURE_PYTHON", "") not in ("", "0"):
    from wasscert import _kernels_py as _impl
    BACKEND = "python"
else:
    try:
        from wasscert import _kernels as _impl
        BACKEND = "cython"
    except ImportError:  # extension not built
        from wasscert import _kernels_py as _impl
        BACKEND = "python"

leg_eval = _impl.leg_eval
table_pdf = _impl.table_pdf
table_cdf = _impl.table_cdf
table_sf = _impl.table_sf
table_ppf = _impl.table_ppf
table_isf = _impl.table_isf

__all__ = ["BACKEND", "leg_eval", "table_pdf", "table_cdf", "table_sf",
           "table_ppf", "table_isf"]
