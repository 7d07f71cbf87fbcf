"""Backend selection for the hot kernels.

The compiled extension is used when it was built; otherwise the numpy
implementation takes over. ``POSNB_KERNELS=python`` forces the fallback,
``POSNB_KERNELS=cython`` makes a missing extension an error (useful in CI
and in the benchmark).
"""

from __future__ import annotations

import os

_requested = os.environ.get("POSNB_KERNELS", "auto").lower()
if _requested not in ("auto", "cython", "python"):
    raise ValueError(f"POSNB_KERNELS must be auto, cython, or python, got {_requested!r}")

if _requested == "python":
    from . import _kernels_py as _impl

    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        if _requested == "cython":
            raise
        from . import _kernels_py as _impl  # type: ignore[no-redef]

        BACKEND = "python"

accumulate_mass = _impl.accumulate_mass
score_documents = _impl.score_documents


def available_backends() -> list[str]:
    """Importable backend names, compiled one first."""
    names = []
    try:
        from . import _kernels  # noqa: F401

        names.append("cython")
    except ImportError:
        pass
    names.append("python")
    return names
