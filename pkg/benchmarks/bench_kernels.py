"""Time the compiled kernels against the pure-Python ones.

    python benchmarks/bench_kernels.py [--repeat N]

Both backends are imported side by side, so CURVEX_PURE has no effect here.
"""
import argparse
import random
import sys
import timeit
from math import gcd

from curvex import _pycore
from curvex.markings import random_word

try:
    from curvex import _core
except ImportError:
    _core = None


def workloads(rng: random.Random):
    def slope():
        while True:
            p, q = rng.randint(-10 ** 6, 10 ** 6), rng.randint(1, 10 ** 6)
            if gcd(p, q) == 1:
                return p, q

    pairs = [slope() + slope() for _ in range(2000)]
    targets = [(p, q) for q in range(1, 40) for p in range(q + 1) if gcd(p, q) == 1]
    mats = [random_word(rng, 4, 3).entries for _ in range(20)]
    return {
        "pair_distance x2000": lambda m: [m.pair_distance(*t) for t in pairs],
        f"pair_distances ({len(targets)} targets)": lambda m: m.pair_distances(3, 7, targets),
        "farey_bfs height 320": lambda m: m.farey_bfs(0, 1, 320, targets),
        "marking_bfs x20 cap 14": lambda m: [m.marking_bfs(g, 14) for g in mats],
    }


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if _core is None:
        print("compiled core not built; nothing to compare", file=sys.stderr)
        return 1
    print(f"{'kernel':32} {'pure s':>9} {'compiled s':>11} {'speedup':>8}")
    for name, fn in workloads(random.Random(1)).items():
        a, b = fn(_pycore), fn(_core)
        assert list(a) == list(b), name
        tp = min(timeit.repeat(lambda: fn(_pycore), number=1, repeat=args.repeat))
        tc = min(timeit.repeat(lambda: fn(_core), number=1, repeat=args.repeat))
        print(f"{name:32} {tp:9.4f} {tc:11.4f} {tp / tc:7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
