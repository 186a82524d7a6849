"""Tower-notation bound chains with their derivation traces."""
from graham_bounds.towers import Nat, TriArrow, compare, hj_chain, nk_bound, render, shelah_f_exact, tet

e, tr = hj_chain(Nat(6))
print(tr.render())
print(f"=> {render(e)} is {compare(e, TriArrow(2, 6)).value} 2^^^6\n")

e, tr = hj_chain(tet(2, 18))
print(f"seed 2^^18 -> {render(e)} (trace reconstructed: {tr.reconstructed})")
print("n(7) <=", render(nk_bound(7)[0]))
print("f(2,2) =", shelah_f_exact(2, 2), " f(2,3) =", shelah_f_exact(2, 3))
