"""Lift a random 2-coloring of [4]^2 to the edges of {-1,+1}^3 and pull back
every monochromatic square as a monochromatic tic-tac-toe line.
"""
import argparse
import itertools
import random

from graham_bounds.constructions import extract_ttt_space, iter_mono_subcubes, lift_coloring
from graham_bounds.cube import BLUE, RED

ap = argparse.ArgumentParser()
ap.add_argument("--seed", type=int, default=5)
args = ap.parse_args()

rng = random.Random(args.seed)
c4 = {p: rng.choice((RED, BLUE)) for p in itertools.product(range(1, 5), repeat=2)}
for row in range(1, 5):
    print(" ".join(c4[(row, col)].value for col in range(1, 5)))

ec = lift_coloring(c4)
hits = 0
for f, col in iter_mono_subcubes(ec, 3, 2):
    ex = extract_ttt_space(f, c4)
    kind = "crossing" if ex.crossing else "contained"
    print(f"{col.value} square ({kind}) -> line {sorted(ex.points)}")
    hits += 1
print(f"{hits} monochromatic squares, all pulled back")
