"""Sweep the differentiating families against their filters and time each query.

Small squares: F_n at ((k-1)/k, 1/k) should be valid exactly when n >= k.
Big squares: F_2*F_k at ((n-2)/2n, (n+2)/2n) should be valid exactly when
k >= n.  Any verdict off the expected pattern is reported and the script
exits nonzero.
"""

import argparse
import sys
import time
from fractions import Fraction

from paratab import Filter, LogicId, Valid, family_f2_odot_fn, family_fn, prove_valid


def sweep_small(max_k: int, max_n: int, logic: LogicId) -> list[tuple]:
    rows = []
    for k in range(2, max_k + 1):
        d = Filter(Fraction(k - 1, k), Fraction(1, k))
        for n in range(2, max_n + 1):
            t0 = time.perf_counter()
            verdict = prove_valid(family_fn(n), d, logic)
            dt = time.perf_counter() - t0
            rows.append((f"F_{n} at (({k}-1)/{k},1/{k})", isinstance(verdict, Valid), n >= k, dt))
    return rows


def sweep_big(ns: tuple[int, ...], ks: tuple[int, ...], logic: LogicId) -> list[tuple]:
    rows = []
    for n in ns:
        d = Filter(Fraction(n - 2, 2 * n), Fraction(n + 2, 2 * n))
        for k in ks:
            t0 = time.perf_counter()
            verdict = prove_valid(family_f2_odot_fn(k), d, logic)
            dt = time.perf_counter() - t0
            rows.append((f"F_2*F_{k} at (({n}-2)/2*{n},({n}+2)/2*{n})", isinstance(verdict, Valid), k >= n, dt))
    return rows


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-k", type=int, default=4, help="largest small-squares filter index")
    ap.add_argument("--max-n", type=int, default=4, help="largest family index")
    ap.add_argument("--skip-big", action="store_true", help="small-squares sweep only")
    args = ap.parse_args()

    logic = LogicId.from_name("luk-arrow")
    rows = sweep_small(args.max_k, args.max_n, logic)
    if not args.skip_big:
        big_ns = tuple(n for n in (3, 4) if n <= args.max_n)
        big_ks = tuple(k for k in (3, 4) if k <= args.max_k)
        rows.extend(sweep_big(big_ns, big_ks, logic))

    bad = 0
    for label, got, want, dt in rows:
        mark = "ok " if got == want else "BAD"
        if got != want:
            bad += 1
        print(f"{mark} {label:44s} {'valid' if got else 'invalid':7s} {dt:7.2f}s")
    print(f"{len(rows)} queries, {bad} off-pattern")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
