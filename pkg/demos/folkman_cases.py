"""Walk the five-way case split for four disjoint directions."""
import itertools

from graham_bounds.constructions import find_folkman_directions, folkman_case_analysis
from graham_bounds.cube import BLUE, RED, canonical, direction_to_str, enumerate_directions

a, b, c, d = (1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)
branch = [canonical(x) for x in ((1, -1, 0, 0), (0, 0, 1, -1), (1, -1, 1, -1), (1, -1, -1, 1))]

for bits in itertools.product((RED, BLUE), repeat=4):
    colors = dict(zip(branch, bits))
    cert = folkman_case_analysis(a, b, c, d, lambda x: colors.get(x, RED))
    k4 = " ".join(sorted(direction_to_str(x) for x in cert.classes))
    print("".join(x.value for x in bits), "->", cert.color.value, k4)

# toy search for directions whose subset-sum colors depend only on the largest index
cl = {x: RED if sum(map(abs, x)) % 3 else BLUE for x in enumerate_directions(6)}
print("max-determined pair at n=6:", find_folkman_directions(cl, 2, 6))
