"""Kernel backend selection: compiled extension with numpy fallback.

The hot loops (trajectory simulation, per-state second-moment sampling,
uniform reference draws) live in ``shuffle_lab._kernels`` (Cython) with a
vectorized numpy twin in ``shuffle_lab._kernels_py``.  Both implement the
same counter-based stream contract (see ``shuffle_lab.rng``): trajectory j of
a call uses stream ``stream0 + j``, and within a trajectory draws are
consumed in step order (overhand: one per slot; circular: one per slot per
attempt, zero-cut attempts redrawn; rudvalis: one per step; Fisher-Yates:
one per swap).  This makes results independent of batching and backend.

Selection happens at import: the compiled module when present, else the
fallback.  Override with SHUFFLE_LAB_BACKEND=compiled|fallback.
``benchmarks/compare_backends.py`` times one against the other.
"""

from __future__ import annotations

import os

from . import _kernels_py as _fallback

try:
    from . import _kernels as _compiled
except ImportError:  # pure install or failed build
    _compiled = None

KIND_OVERHAND = _fallback.KIND_OVERHAND
KIND_CIRCULAR = _fallback.KIND_CIRCULAR
KIND_RUDVALIS = _fallback.KIND_RUDVALIS

_KIND_OF = {
    "overhand": KIND_OVERHAND,
    "circular": KIND_CIRCULAR,
    "rudvalis": KIND_RUDVALIS,
}


def kind_id(kind: str) -> int:
    return _KIND_OF[kind]


def get_backend(name: str | None = None):
    """Return the kernel module for ``name`` (compiled | fallback | None=active)."""
    if name is None:
        return active
    if name == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not available in this install")
        return _compiled
    if name == "fallback":
        return _fallback
    raise ValueError(f"unknown backend {name!r}")


_choice = os.environ.get("SHUFFLE_LAB_BACKEND", "auto")
if _choice == "fallback":
    active = _fallback
elif _choice == "compiled":
    if _compiled is None:
        raise ImportError(
            "SHUFFLE_LAB_BACKEND=compiled but the extension is not importable"
        )
    active = _compiled
else:
    active = _compiled if _compiled is not None else _fallback

BACKEND_NAME = "compiled" if active is _compiled and _compiled is not None else "fallback"

# Stream-index ranges, one block per purpose so no two call sites collide.
STREAMS_CHAIN = 1 << 32
STREAMS_UNIFORM = 2 << 32
STREAMS_SECOND_MOMENT = 3 << 32
