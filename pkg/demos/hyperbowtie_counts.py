"""Hyperbowties of {-1,+1}^(n+1) against tic-tac-toe spaces of [4]^n."""
from graham_bounds.paramsets import verify_bijection

print(" n  d  hyperbowties  ttt-spaces  bijective")
for n, d in [(1, 1), (2, 1), (2, 2), (3, 1), (3, 2)]:
    r = verify_bijection(n, d)
    print(f"{n:2d} {d:2d} {r.hyperbowtie_count:13d} {r.ttt_space_count:11d}  {r.bijective}")
