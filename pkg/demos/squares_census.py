"""Square census on random colorings, and why 78 dimensions suffice."""
import numpy as np

from graham_bounds.squares import Coloring2, census, lemma_bounds, margin, square_threshold, verify_parity_structure

rng = np.random.default_rng(0)
for n in (5, 6, 7, 8):
    r = census(Coloring2.random(n, rng))
    ra, par, odd = lemma_bounds(n)
    print(
        f"n={n}: mono={float(r.p_mono):.3f} 3-1={float(r.p_31):.3f} "
        f"right-angle={float(r.right_angle_mono):.3f}>={float(ra):.3f} "
        f"parallel={float(r.parallel_mono):.3f}>={float(par):.3f}"
    )
n, m = square_threshold()
print(f"threshold {n}: margin {m}, one below: {margin(n - 1)}")
p = verify_parity_structure(5)
print(f"parity gadget: {p.squares} squares on {p.edges} edges, each edge in {set(p.multiplicities)} squares")
