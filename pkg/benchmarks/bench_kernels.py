"""Compare the compiled kernels with the pure-Python fallback.

Run ``python3 benchmarks/bench_kernels.py`` (``--quick`` for a smoke run).
Each workload is timed on both backends and the results are checked equal.
"""

import argparse
import random
import sys
import timeit

from cdagsep.kernels import _pure

try:
    from cdagsep.kernels import _ckernels
except ImportError:
    _ckernels = None


def random_dag(rng, n, p):
    parents = [0] * n
    bidi = [0] * n
    for v in range(n):
        for u in range(v):
            if rng.random() < p:
                parents[v] |= 1 << u
            if rng.random() < p / 3:
                bidi[v] |= 1 << u
                bidi[u] |= 1 << v
    return parents, bidi


def workloads(rng):
    dags = [random_dag(rng, 40, 0.1) for _ in range(20)]
    masks = [(rng.getrandbits(40) & rng.getrandbits(40) & rng.getrandbits(40),
              rng.getrandbits(40) & rng.getrandbits(40)) for _ in dags]

    def dconnected(mod):
        return [mod.dconnected(p, b, x, z & ~x) for (p, b), (x, z) in zip(dags, masks)]

    def acyclic(mod):
        return [mod.is_acyclic(p) for p, _ in dags]

    # maximal-graph search over a 4-cluster ring (A has a self-loop) where x
    # and y are separated, so every interleaving of slots is visited
    sizes = [3, 3, 3, 2]
    offsets = [0, 3, 6, 9]
    slots = [((1 << s) - 1) << o for s, o in zip(sizes, offsets)]
    pred = [0b1001, 0b0001, 0b0010, 0b0100]
    dep = [0b1011, 0b0111, 0b1110, 0b1101]
    required = [0b1000, 0b0001, 0b0010, 0b0100]
    bidi = [0] * sum(sizes)

    def oracle(mod):
        return mod.oracle_search(sizes, pred, dep, required, bidi,
                                 0, 0, slots[0], slots[2], slots[1] | slots[3])

    return {"dconnected": dconnected, "is_acyclic": acyclic, "oracle_search": oracle}


def main(argv=None):
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true")
    args = parser.parse_args(argv)
    if _ckernels is None:
        print("compiled kernels unavailable; only the pure backend is installed")
        return 1
    number = 1 if args.quick else 20
    rng = random.Random(0)
    print(f"{'kernel':<15}{'pure (ms)':>12}{'compiled (ms)':>15}{'speedup':>10}")
    for name, fn in workloads(rng).items():
        if fn(_pure) != fn(_ckernels):
            print(f"{name}: backends disagree")
            return 2
        pure = min(timeit.repeat(lambda: fn(_pure), number=number, repeat=3)) / number
        fast = min(timeit.repeat(lambda: fn(_ckernels), number=number, repeat=3)) / number
        print(f"{name:<15}{pure * 1e3:>12.3f}{fast * 1e3:>15.3f}{pure / fast:>9.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
