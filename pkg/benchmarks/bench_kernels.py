"""Compare the compiled and pure-Python search/cut kernels.

    python3 benchmarks/bench_kernels.py [--repeat N]

Workloads: UNSAT proofs for the Star family (k=1, 2), SAT search and full
counting on a fixed corpus, and small-cut scans on the same corpus.
"""
from __future__ import annotations

import argparse
import time

from z3flow import cuts, families, kernels, oracle


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def _workloads():
    stars = [families.gen_star(k) for k in (1, 2)]
    corpus = families.gen_corpus(7, 12, "DTS", count=40)
    small = [i for i in corpus if len(i.unoriented()) <= 22]

    def star_unsat(name):
        return lambda: [oracle.solve(s, backend=name) for s in stars]

    def corpus_solve(name):
        return lambda: [oracle.solve(i, backend=name) for i in corpus]

    def corpus_count(name):
        return lambda: [oracle.count(i, backend=name) for i in small]

    def cut_scan(name):
        def run():
            k = kernels.backend(name)
            for i in corpus:
                _, eu, ev = cuts._dense(i)
                k.cut_scan(i.n, eu, ev, 3)
        return run

    return [("star UNSAT k=1,2", star_unsat), ("corpus solve x40", corpus_solve),
            (f"corpus count x{len(small)}", corpus_count), ("cut scan kmax=3 x40", cut_scan)]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if not kernels.have_compiled():
        print("compiled kernels not built; only the Python backend is timed")
    print(f"{'workload':<26}{'python s':>12}{'compiled s':>12}{'speedup':>10}")
    for label, make in _workloads():
        tp = _time(make("python"), args.repeat)
        if kernels.have_compiled():
            tc = _time(make("compiled"), args.repeat)
            print(f"{label:<26}{tp:>12.4f}{tc:>12.4f}{tp / tc:>9.1f}x")
        else:
            print(f"{label:<26}{tp:>12.4f}{'-':>12}{'-':>10}")


if __name__ == "__main__":
    main()
