"""Compare the compiled and pure-Python DP kernels on seeded instances.

    python benchmarks/bench_dp.py [--seed N] [--count N] [--repeat N]
"""

import argparse
import math
import random
import time

from deltafpt import dpkernel
from deltafpt.ilp import IlpInstance, solve_ilp
from deltafpt.slvp import SlvpInstance, solve_dp
from deltafpt.suites import random_full_rank


def slvp_cases(rng, count):
    out = []
    for _ in range(count):
        n, m = rng.randint(3, 5), rng.randint(1, 2)
        out.append(SlvpInstance.from_matrix(random_full_rank(rng, n + m, n, 4), rng.choice([1, 2, math.inf])))
    return out


def ilp_cases(rng, count):
    out = []
    while len(out) < count:
        n, m = rng.randint(3, 5), rng.randint(1, 2)
        h = random_full_rank(rng, n + m, n, 4)
        # objective inside the cone of the rows keeps the relaxation bounded
        c = [sum(h[i, j] * w for i, w in enumerate(rng.choices(range(3), k=n + m))) for j in range(n)]
        b = [rng.randint(0, 10) for _ in range(n + m)]
        inst = IlpInstance.build(h, b, c)
        if solve_ilp(inst).status == "optimal":
            out.append(inst)
    return out


def clock(fn, cases, backend, repeat):
    runs = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        for inst in cases:
            fn(inst, backend=backend)
        runs.append(time.perf_counter() - t0)
    return min(runs)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--count", type=int, default=40)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not dpkernel.HAVE_COMPILED:
        raise SystemExit("compiled kernel not built: run `python setup.py build_ext --inplace`")
    rng = random.Random(args.seed)
    suites = {"slvp": (solve_dp, slvp_cases(rng, args.count)),
              "ilp": (solve_ilp, ilp_cases(rng, args.count))}
    print(f"{'suite':<6} {'cython s':>10} {'python s':>10} {'speedup':>8}")
    for name, (fn, cases) in suites.items():
        fast = clock(fn, cases, "cython", args.repeat)
        slow = clock(fn, cases, "python", args.repeat)
        print(f"{name:<6} {fast:>10.3f} {slow:>10.3f} {slow / fast:>7.1f}x")
        for inst in cases[:5]:
            a, b = fn(inst, backend="cython"), fn(inst, backend="python")
            assert (a.x, a.stats.get("states")) == (b.x, b.stats.get("states")), "backends disagree"


if __name__ == "__main__":
    main()
