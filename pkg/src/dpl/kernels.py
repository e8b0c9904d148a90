"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the pure-Python
module is used.  Set ``DPL_PURE_PYTHON=1`` to force the fallback.
"""

import os

from dpl import _kernels_py

_impl = _kernels_py
BACKEND = "python"

if not os.environ.get("DPL_PURE_PYTHON"):
    try:
        from dpl import _kernels_c as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        pass

transpose = _impl.transpose
closure = _impl.closure
is_preorder = _impl.is_preorder
strict_down = _impl.strict_down
box = _impl.box
diamond = _impl.diamond
minimal = _impl.minimal
lex_revise = _impl.lex_revise
degrees = _impl.degrees
lex_contract = _impl.lex_contract
preorders = _impl.preorders


def bits(mask):
    """Indices of the set bits of ``mask`` in increasing order."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def popcount(mask):
    return bin(mask).count("1")
