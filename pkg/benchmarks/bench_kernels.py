#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy fallback.

Times the two hot operations (class-mass accumulation and batch log-score
evaluation) on synthetic CSR data shaped like the real workload, then an
end-to-end cross-validation for each backend.

    python benchmarks/bench_kernels.py [--docs N] [--vocab V] [--nnz-per-doc K]
"""

import argparse
import statistics
import time

import numpy as np

from posnb import _kernels_py
from posnb.corpus import POLARITY_CLASSES, STRATIFIED_ROUND_ROBIN, Document, LabeledCorpus
from posnb.evaluate import ExperimentConfig, cross_validate
from posnb.features import WeightScheme


def get_backends():
    impls = {"python": _kernels_py}
    try:
        from posnb import _kernels

        impls["cython"] = _kernels
    except ImportError:
        print("note: compiled extension not built; benchmarking the fallback only")
    return impls


def synthetic_csr(rng, n_docs, vocab, nnz_per_doc):
    counts = rng.integers(nnz_per_doc // 2, nnz_per_doc * 2, size=n_docs)
    indptr = np.zeros(n_docs + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    nnz = int(indptr[-1])
    ids = rng.integers(0, vocab, size=nnz).astype(np.int32)
    weights = rng.uniform(0.01, 1.5, size=nnz)
    return indptr, ids, weights


def bench(fn, repeats=7):
    fn()  # warm up caches and lazy imports
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return statistics.median(times)


def bench_kernels(backends, args):
    rng = np.random.default_rng(0)
    indptr, ids, weights = synthetic_csr(rng, args.docs, args.vocab, args.nnz_per_doc)
    mass = rng.uniform(0.0, 4.0, size=(2, args.vocab))
    seen = (mass.sum(axis=0) > 0).astype(np.uint8)
    log_denom = np.log(mass.sum(axis=1) + seen.sum())
    log_prior = np.full(2, np.log(0.5))
    nnz = len(ids)
    print(f"\nsynthetic workload: {args.docs} docs, vocab {args.vocab}, nnz {nnz}")
    print(f"{'kernel':<18}{'backend':<10}{'median':>12}{'throughput':>22}")
    rows = {}
    for name, impl in backends.items():
        out = np.zeros(args.vocab)
        t_mass = bench(lambda: impl.accumulate_mass(ids, weights, out))
        scores = np.empty((args.docs, 2))
        t_score = bench(
            lambda: impl.score_documents(
                indptr, ids, weights, mass, seen, 1.0, log_denom, log_prior, scores
            )
        )
        rows[name] = (t_mass, t_score)
        print(f"{'accumulate_mass':<18}{name:<10}{t_mass * 1e3:>10.2f}ms"
              f"{nnz / t_mass / 1e6:>14.0f} Mnnz/s")
        print(f"{'score_documents':<18}{name:<10}{t_score * 1e3:>10.2f}ms"
              f"{nnz / t_score / 1e6:>14.0f} Mnnz/s")
    if len(rows) == 2:
        for i, kernel in enumerate(("accumulate_mass", "score_documents")):
            speedup = rows["python"][i] / rows["cython"][i]
            print(f"{kernel}: compiled is {speedup:.1f}x the fallback")


def bench_end_to_end(args):
    rng = np.random.default_rng(1)
    vocab = [f"w{i}" for i in range(5000)]
    docs = []
    for i in range(args.docs_e2e):
        words = rng.choice(vocab, size=rng.integers(100, 600))
        label = POLARITY_CLASSES[i % 2]
        docs.append(Document(f"d{i:04d}", (tuple(words),), label))
    corpus = LabeledCorpus(tuple(docs), POLARITY_CLASSES)
    config = ExperimentConfig(
        scheme=WeightScheme(0.0, 1.0), rule="last",
        fold_strategy=STRATIFIED_ROUND_ROBIN, outer_k=10,
    )
    # document encoding happens once per call and is backend-independent;
    # the kernel share of the runtime is what separates the two rows
    print(f"\nend-to-end 10-fold CV on {args.docs_e2e} synthetic docs")
    import importlib
    import os

    for backend in ("cython", "python"):
        os.environ["POSNB_KERNELS"] = backend
        import posnb.kernels

        importlib.reload(posnb.kernels)
        if posnb.kernels.BACKEND != backend:
            continue
        t = bench(lambda: cross_validate(corpus, config), repeats=5)
        print(f"{backend:<10}{t * 1e3:>10.1f}ms per cross_validate")
    os.environ.pop("POSNB_KERNELS", None)
    importlib.reload(posnb.kernels)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--docs", type=int, default=2000)
    parser.add_argument("--vocab", type=int, default=50000)
    parser.add_argument("--nnz-per-doc", type=int, default=400)
    parser.add_argument("--docs-e2e", type=int, default=1000)
    args = parser.parse_args()
    backends = get_backends()
    bench_kernels(backends, args)
    bench_end_to_end(args)


if __name__ == "__main__":
    main()
