"""Backend selection for the hot lattice kernels.

The compiled extension is used when it imports; set ``SCOPKIT_PURE_PYTHON=1``
to force the numpy fallback. Both backends take a square 0/1 matrix where
``m[i, j]`` means ``i <= j``.
"""

import os

from . import _pykernels

if os.environ.get("SCOPKIT_PURE_PYTHON") == "1":
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on build
        _impl = _pykernels
        BACKEND = "python"


def transitive_closure(adjacency):
    """Reflexive-transitive closure of a generator relation (uint8 matrix)."""
    return _impl.transitive_closure(adjacency)


def meet_table(leq):
    """Pairwise greatest lower bounds; ``-1`` where no infimum exists.

    Join tables are obtained from the transposed order.
    """
    return _impl.meet_table(leq)
