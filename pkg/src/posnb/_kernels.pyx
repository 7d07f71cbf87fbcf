"""Compiled hot kernels: class-mass accumulation and batch log-score evaluation.

Call signatures and semantics match ``_kernels_py``; the dispatcher in
``kernels`` picks whichever implementation is importable.
"""

from libc.math cimport log


def accumulate_mass(const int[::1] ids, const double[::1] weights, double[::1] out):
    """Add sparse (id, weight) pairs into the dense mass vector ``out``."""
    cdef Py_ssize_t j, n = ids.shape[0]
    with nogil:
        for j in range(n):
            out[ids[j]] += weights[j]


def score_documents(const long long[::1] indptr,
                    const int[::1] ids,
                    const double[::1] weights,
                    const double[:, ::1] mass,
                    const unsigned char[::1] seen,
                    double smoothing,
                    const double[::1] log_denom,
                    const double[::1] log_prior,
                    double[:, ::1] out):
    """Per-document, per-class log scores over CSR attribute vectors.

    out[d, c] = log_prior[c]
                + sum over occurrences j of doc d with seen[ids[j]]
                  of weights[j] * (log(mass[c, ids[j]] + smoothing) - log_denom[c])

    With smoothing 0 an attribute unseen in class c contributes
    weights[j] * log(0) = -inf, i.e. the class is eliminated.
    Stored weights must be > 0 so 0 * -inf never occurs.
    """
    cdef Py_ssize_t d, c, j
    cdef Py_ssize_t n_docs = out.shape[0], n_classes = out.shape[1]
    cdef double acc, wsum, x
    with nogil:
        for d in range(n_docs):
            for c in range(n_classes):
                acc = 0.0
                wsum = 0.0
                for j in range(indptr[d], indptr[d + 1]):
                    if seen[ids[j]]:
                        x = weights[j]
                        acc += x * log(mass[c, ids[j]] + smoothing)
                        wsum += x
                out[d, c] = log_prior[c] + acc - wsum * log_denom[c]
