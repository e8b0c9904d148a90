"""Compare the compiled kernels with the pure-Python fallback.

Usage: python bench/bench_kernels.py [--worlds N] [--repeat R] [--audit]

Each kernel runs over the same batch of random preorders on both backends.
With --audit the n<=3 revision audit is also timed end to end under each
backend (in a subprocess, since the backend is fixed at import time).
"""

import argparse
import os
import random
import subprocess
import sys
import time

from dpl import _kernels_py as py

try:
    from dpl import _kernels_c as cy
except ImportError:
    cy = None

AUDIT = ("from dpl.harness import AuditConfig, UniverseSpec, run_audit;"
         "from dpl.postulates import PostulateId as P;"
         "run_audit(AuditConfig(UniverseSpec('enumerate', 3, ('p',)),"
         " postulates=(P.Faith, P.DP1comp, P.DP2comp, P.RECcomp)))")


def batch(n, count, seed):
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        rows = tuple((1 << w) | rng.getrandbits(n) & rng.getrandbits(n) for w in range(n))
        out.append((py.closure(rows, n), rng.getrandbits(n)))
    return out


def workloads(n):
    return {
        "closure": lambda k, d, s: k.closure(d, n),
        "is_preorder": lambda k, d, s: k.is_preorder(d, n),
        "strict_down": lambda k, d, s: k.strict_down(d, n),
        "minimal": lambda k, d, s: k.minimal(d, n, s),
        "lex_revise": lambda k, d, s: k.lex_revise(d, n, s),
        "degrees": lambda k, d, s: k.degrees(d, n, s),
        "lex_contract": lambda k, d, s: k.lex_contract(d, n, s),
    }


def clock(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--worlds", type=int, default=8)
    ap.add_argument("--count", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--audit", action="store_true")
    args = ap.parse_args(argv)
    if cy is None:
        print("compiled kernels are not built; run `pip install -e . --no-build-isolation`")
        return 1

    data = batch(args.worlds, args.count, args.seed)
    print(f"{args.count} random preorders on {args.worlds} worlds, best of {args.repeat}")
    print(f"{'kernel':<14}{'python ms':>12}{'cython ms':>12}{'speedup':>10}")
    rows = list(workloads(args.worlds).items())
    rows.append(("preorders(5)", None))
    for name, work in rows:
        if work is None:
            tp = clock(lambda: py.preorders(5), args.repeat)
            tc = clock(lambda: cy.preorders(5), args.repeat)
        else:
            for d, s in data:
                assert work(py, d, s) == work(cy, d, s), name
            tp = clock(lambda: [work(py, d, s) for d, s in data], args.repeat)
            tc = clock(lambda: [work(cy, d, s) for d, s in data], args.repeat)
        print(f"{name:<14}{tp * 1e3:>12.2f}{tc * 1e3:>12.2f}{tp / tc:>9.1f}x")

    if args.audit:
        for label, extra in (("python", {"DPL_PURE_PYTHON": "1"}), ("cython", {})):
            env = {k: v for k, v in os.environ.items() if k != "DPL_PURE_PYTHON"}
            env.update(extra)
            t = time.perf_counter()
            subprocess.run([sys.executable, "-c", AUDIT], env=env, check=True)
            print(f"audit n<=3 rev ({label}): {time.perf_counter() - t:.2f}s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
