"""NumPy implementations of the hot kernels.

Reference behavior for the compiled extension and the fallback used when it
is not built. See ``_kernels.pyx`` for the scoring formula.
"""

from __future__ import annotations

import numpy as np


def _segment_sums(values: np.ndarray, indptr: np.ndarray) -> np.ndarray:
    """Sum ``values`` over the CSR segments delimited by ``indptr``.

    Safe for empty segments and for -inf entries (unlike a cumsum-based
    difference, which would turn -inf into NaN downstream).
    """
    starts = indptr[:-1]
    if values.shape[0] == 0:
        return np.zeros(starts.shape[0])
    sums = np.add.reduceat(values, np.minimum(starts, values.shape[0] - 1))
    # reduceat yields values[start] for empty segments; zero them out
    sums[indptr[1:] == starts] = 0.0
    return sums


def accumulate_mass(ids: np.ndarray, weights: np.ndarray, out: np.ndarray) -> None:
    """Add sparse (id, weight) pairs into the dense mass vector ``out``."""
    out += np.bincount(ids, weights=weights, minlength=out.shape[0])


def score_documents(
    indptr: np.ndarray,
    ids: np.ndarray,
    weights: np.ndarray,
    mass: np.ndarray,
    seen: np.ndarray,
    smoothing: float,
    log_denom: np.ndarray,
    log_prior: np.ndarray,
    out: np.ndarray,
) -> None:
    """Per-document, per-class log scores over CSR attribute vectors."""
    keep = seen[ids].astype(bool)
    kept_weights = np.where(keep, weights, 0.0)
    wsum = _segment_sums(kept_weights, indptr)
    with np.errstate(divide="ignore"):  # log(0) -> -inf is intended at s=0
        for c in range(mass.shape[0]):
            smoothed = mass[c, ids] + smoothing
            logs = np.zeros_like(smoothed)
            np.log(smoothed, out=logs, where=keep)
            out[:, c] = (
                log_prior[c]
                + _segment_sums(kept_weights * logs, indptr)
                - wsum * log_denom[c]
            )
