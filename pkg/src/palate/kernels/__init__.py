"""Hot-kernel backend selection.

Imports the compiled extension when present, else the pure numpy
implementation. PALATE_PURE_PYTHON=1 forces the fallback (used by the
benchmark and the backend-equivalence tests). Results are deterministic
within a backend; across backends they agree to floating-point rounding.
"""

import os

if os.environ.get("PALATE_PURE_PYTHON") == "1":
    from . import _pykernels as _impl
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:
        from . import _pykernels as _impl
        BACKEND = "python"

assign_points = _impl.assign_points
centroid_sums = _impl.centroid_sums
weighted_column_sums = _impl.weighted_column_sums
gmm_log_densities = _impl.gmm_log_densities
row_dots = _impl.row_dots
minibatch_update = _impl.minibatch_update
glove_epoch = _impl.glove_epoch
