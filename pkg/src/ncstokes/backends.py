"""Kernel backend selection.

The hot loops (CSR matvec, the CG iteration, the telescoping path sum) exist
twice: numba-compiled in `_kernels_numba` and pure numpy in `_kernels_numpy`.
The environment variable NCSTOKES_BACKEND picks one:

    NCSTOKES_BACKEND=numba   force the compiled kernels (error if unavailable)
    NCSTOKES_BACKEND=numpy   force the pure-numpy fallback
    NCSTOKES_BACKEND=auto    numba when importable, numpy otherwise (default)

Both backends implement the same algorithms with fixed summation order per
run, so results are deterministic per backend and agree to rounding between
backends.  `benchmarks/bench_backends.py` compares their speed.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Callable

from . import _kernels_numpy

ENV_VAR = "NCSTOKES_BACKEND"

try:
    from . import _kernels_numba

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba installed
    _kernels_numba = None
    HAS_NUMBA = False


@dataclass(frozen=True)
class Backend:
    name: str
    csr_matvec: Callable
    pcg: Callable
    path_sum: Callable


_NUMPY = Backend(
    name="numpy",
    csr_matvec=_kernels_numpy.csr_matvec,
    pcg=_kernels_numpy.pcg,
    path_sum=_kernels_numpy.path_sum,
)

_NUMBA = (
    Backend(
        name="numba",
        csr_matvec=_kernels_numba.csr_matvec,
        pcg=_kernels_numba.pcg,
        path_sum=_kernels_numba.path_sum,
    )
    if HAS_NUMBA
    else None
)


def available_backends() -> list[str]:
    return ["numba", "numpy"] if HAS_NUMBA else ["numpy"]


def get_backend(name: str | None = None) -> Backend:
    """Resolve a backend by name, or from NCSTOKES_BACKEND when name is None."""
    if name is None:
        name = os.environ.get(ENV_VAR, "auto").strip().lower() or "auto"
    if name == "auto":
        return _NUMBA if _NUMBA is not None else _NUMPY
    if name == "numpy":
        return _NUMPY
    if name == "numba":
        if _NUMBA is None:
            raise RuntimeError(
                "NCSTOKES_BACKEND=numba requested but numba is not importable"
            )
        return _NUMBA
    raise ValueError(f"unknown backend {name!r}; expected numba, numpy, or auto")
