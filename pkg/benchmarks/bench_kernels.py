"""Time the compiled and pure-Python fusion kernels on the same searches.

    python benchmarks/bench_kernels.py [--repeat 3] [--heavy]
"""

import argparse
import time

from ternarycc import _core_py
from ternarycc.fusion import search_inputs
from ternarycc.kernels import BACKEND, core
from ternarycc.permgroup import make_named_group
from ternarycc.tensor import orb_coloring

CASES = [
    ("cyclic:5", False),
    ("cyclotomic:7:3", False),
    ("cyclic:7", True),
    ("cyclic:7", False),
]
HEAVY = [("cyclic:11", True)]


def best_of(kernel, args, repeat: int) -> tuple[float, int, int]:
    best = float("inf")
    for _ in range(repeat):
        fresh = [a.copy() for a in args]
        t0 = time.perf_counter()
        results, nodes, complete = kernel.search(*fresh, 10**9, 3600.0)
        best = min(best, time.perf_counter() - t0)
        assert complete
    return best, nodes, len(results)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--heavy", action="store_true", help="include the p=11 AST search (python side is slow)")
    args = ap.parse_args()
    if BACKEND != "cython":
        raise SystemExit("compiled kernel not built; run `pip install -e . --no-build-isolation` first")
    cases = CASES + (HEAVY if args.heavy else [])
    print(f"{'base':<18}{'ast':<6}{'nodes':>8}{'found':>7}{'cython s':>11}{'python s':>11}{'speedup':>9}")
    for spec, ast_only in cases:
        inputs = search_inputs(orb_coloring(make_named_group(spec), 3), ast_only)
        tc, nodes, found = best_of(core, inputs, args.repeat)
        tp, nodes_p, found_p = best_of(_core_py, inputs, 1 if args.heavy else args.repeat)
        assert (nodes, found) == (nodes_p, found_p)
        print(f"{spec:<18}{str(ast_only).lower():<6}{nodes:>8}{found:>7}{tc:>11.4f}{tp:>11.4f}{tp / tc:>8.1f}x")


if __name__ == "__main__":
    main()
