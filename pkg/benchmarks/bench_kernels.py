"""Time the compiled kernels against their numpy twins.

Runs each of the four scan kernels on realistic inputs (the q=8 line
table, the full q=4 plane census) through both backends and prints a
comparison table.  The geometry layer never imports the twins directly,
so this is the one place the two implementations race each other.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--scale 1.0]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from kleinoval.analysis import _packed_mask6
from kleinoval.constructions import h_lambda
from kleinoval.kernels import pure
from kleinoval.projspace import normalized_array, rref_bases_bulk
from kleinoval.quadrics import build_setting

try:
    from kleinoval.kernels import _native as native
except ImportError:
    native = None


def best_of(repeat, fn, *args):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def cases(scale):
    rng = np.random.default_rng(0)
    s8 = build_setting(3)
    s4 = build_setting(2)

    n = int(1_000_000 * scale)
    coords = rng.integers(0, 8, size=(n, 6), dtype=np.uint8)
    form = np.array([1, 0, 5, 3, 0, 7], dtype=np.uint8)
    yield (
        "linear_form_values",
        f"{n} points, q=8",
        lambda impl: impl.linear_form_values(coords, form, s8.field.mul_table),
    )

    terms = np.array([[0, 1, 1], [2, 3, 1], [4, 5, 1], [0, 3, 6]], dtype=np.int64)
    yield (
        "quadratic_form_values",
        f"{n} points, 4 terms, q=8",
        lambda impl: impl.quadratic_form_values(coords, terms, s8.field.mul_table),
    )

    member = (rng.random(s8.model.n_points) < 0.3).astype(np.uint8)
    reps = max(1, int(20 * scale))
    lines = s8.model.lines

    def run_counts(impl):
        for _ in range(reps):
            impl.incidence_counts(lines, member)

    yield (
        "incidence_counts",
        f"{lines.shape[0]} lines x{reps}, q=8",
        run_counts,
    )

    pset = h_lambda(s4, 1)
    bases = np.ascontiguousarray(rref_bases_bulk(s4.field, 3, 6))
    k = int(bases.shape[0] * min(1.0, scale)) or 1
    bases = bases[:k]
    mus = normalized_array(4, 3)
    hmask = _packed_mask6(s4, pset)
    yield (
        "conic_plane_scan",
        f"{k} planes, q=4",
        lambda impl: impl.conic_plane_scan(
            bases, mus, s4.field.mul_table, s4.field.inv_table, hmask, 2
        ),
    )


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5, help="best-of timing runs")
    ap.add_argument("--scale", type=float, default=1.0,
                    help="shrink or grow the input sizes")
    args = ap.parse_args()

    if native is None:
        print("compiled kernels not built; timing the numpy twin alone")

    header = f"{'kernel':<24} {'input':<28} {'pure':>9} {'native':>9} {'ratio':>7}"
    print(header)
    print("-" * len(header))
    for name, desc, call in cases(args.scale):
        t_pure = best_of(args.repeat, call, pure)
        if native is not None:
            t_nat = best_of(args.repeat, call, native)
            ratio = f"{t_pure / t_nat:6.1f}x"
            print(f"{name:<24} {desc:<28} {t_pure:8.4f}s {t_nat:8.4f}s {ratio:>7}")
        else:
            print(f"{name:<24} {desc:<28} {t_pure:8.4f}s {'-':>9} {'-':>7}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
