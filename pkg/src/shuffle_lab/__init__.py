"""Shuffle-chain mixing lab.

Exact and Monte Carlo machinery for the overhand and Rudvalis card shuffles:
step samplers and exact step laws, single-card position kernels, the cosine
distinguishing statistic with its eigenvalue/defect analysis, executable
lower-bound lemmas, and total-variation curves.
"""

import os as _os

# Cap worker parallelism before numpy initializes its thread pools.
_threads = _os.environ.get("SHUFFLE_LAB_THREADS")
if _threads:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        _os.environ.setdefault(_var, _threads)

__version__ = "0.1.0"

from . import backend, bounds, chain, models, perm, rng, spectral, tvlab  # noqa: E402

__all__ = [
    "backend",
    "bounds",
    "chain",
    "models",
    "perm",
    "rng",
    "spectral",
    "tvlab",
    "__version__",
]
