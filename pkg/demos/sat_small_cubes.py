"""Class colorings of the cube with no monochromatic planar K4.

Solves dimensions 2..5 with the built-in solver, prints the witness size and
checks it.  Pass --n6 to also refute dimension 6 (a few minutes).
"""
import argparse
import time

from graham_bounds.encode import build_cnf, decode_witness, verify_class_coloring
from graham_bounds.solver import DEFAULT_CONFIGS, instance, solve


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n6", action="store_true")
    args = ap.parse_args()
    for n in range(2, 6):
        base, f = build_cnf(n), instance(n)
        r = solve(f)
        bad = verify_class_coloring(decode_witness(r.model, n), n)
        extra = len(f.clauses) - len(base.clauses)
        print(
            f"n={n}: {base.var_count:3d} classes {len(base.clauses):5d} K4 clauses (+{extra} symmetry clauses)"
            f" -> {r.status}, {len(bad)} mono K4s in witness"
        )
    if args.n6:
        f = instance(6)
        for cfg in DEFAULT_CONFIGS:
            t0 = time.perf_counter()
            r = solve(f, cfg)
            print(f"n=6 [{cfg.heuristic}/{cfg.restart}]: {r.status} after {r.stats.conflicts} conflicts, {time.perf_counter() - t0:.0f}s")


if __name__ == "__main__":
    main()
