"""Backend selection for the edge-subset kernel.

The compiled ``_speedups`` extension is used when it was built and the
``PBGT_PURE_PYTHON`` environment variable is unset; otherwise the
pure-Python implementation runs. Both yield identical results in identical
order, including the ``examined`` count that feeds the search budget.
"""

from __future__ import annotations

import os

from . import _kernels_py

_fast = None
if not os.environ.get("PBGT_PURE_PYTHON"):
    try:
        from . import _speedups as _fast  # type: ignore[no-redef]
    except ImportError:  # extension not built
        _fast = None

BACKEND = "compiled" if _fast is not None else "python"


def edge_subsets(n_nodes, pairs, max_edges, init=-1, end=-1, limit=-1):
    if _fast is not None and n_nodes <= 64 and len(pairs) <= 64:
        return _fast.edge_subsets(n_nodes, pairs, max_edges, init, end, limit)
    return _kernels_py.edge_subsets(n_nodes, pairs, max_edges, init, end, limit)
