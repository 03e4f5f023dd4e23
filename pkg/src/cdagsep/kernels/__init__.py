"""Bitmask kernels with a compiled backend and a pure-Python fallback.

The compiled module is used when it imports and ``CDAGSEP_PURE_PYTHON`` is
unset.  Graphs larger than 64 vertices always go to the pure backend.
"""

import os

from . import _pure

try:
    if os.environ.get("CDAGSEP_PURE_PYTHON"):
        raise ImportError("pure backend requested")
    from . import _ckernels as _compiled
except ImportError:
    _compiled = None

BACKEND = "compiled" if _compiled is not None else "pure"

_LIMIT = 64


def ancestors(parents, seeds):
    if _compiled is not None and len(parents) <= _LIMIT:
        return _compiled.ancestors(parents, seeds)
    return _pure.ancestors(parents, seeds)


def is_acyclic(parents):
    if _compiled is not None and len(parents) <= _LIMIT:
        return _compiled.is_acyclic(parents)
    return _pure.is_acyclic(parents)


def dconnected(parents, bidi, xmask, zmask):
    if _compiled is not None and len(parents) <= _LIMIT:
        return _compiled.dconnected(parents, bidi, xmask, zmask)
    return _pure.dconnected(parents, bidi, xmask, zmask)


def oracle_search(sizes, pred, dep, required, bidi, over, under, xmask, ymask, zmask):
    if _compiled is not None and sum(sizes) <= _LIMIT:
        return _compiled.oracle_search(
            sizes, pred, dep, required, bidi, over, under, xmask, ymask, zmask
        )
    return _pure.oracle_search(
        sizes, pred, dep, required, bidi, over, under, xmask, ymask, zmask
    )
