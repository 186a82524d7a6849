"""Reduce subcube colorings with a one-colored middle to class colorings."""
import random

from graham_bounds.constructions import (
    lift_induced_k4,
    random_reduction_coloring,
    reduce_to_class_coloring,
    table_coloring,
    verify_point_certificate,
)
from graham_bounds.cube import direction_to_str, enumerate_rectangles, make_k4, vertex_to_str
from graham_bounds.encode import verify_class_coloring

rng = random.Random(1)
for i in range(6):
    d = 2 + i % 2
    ec = table_coloring(random_reduction_coloring(d, rng))
    out = reduce_to_class_coloring(ec, d)
    if out.certificate:
        pts = " ".join(vertex_to_str(p) for p in out.certificate.points)
        print(f"d={d}: direct K4 {pts}, verified={verify_point_certificate(out.certificate, ec)}")
        continue
    cls = " ".join(f"{direction_to_str(k)}:{c.value}" for k, c in out.induced.items())
    mono = verify_class_coloring(out.induced, d)
    print(f"d={d}: induced {cls}; {len(mono)} mono K4s")
    for v in mono[:2]:
        r = next(r for r in enumerate_rectangles(d) if make_k4(r) == v.k4)
        cert = lift_induced_k4(ec, out, r)
        print(f"    lifted to {' '.join(vertex_to_str(p) for p in cert.points)}, verified={verify_point_certificate(cert, ec)}")
