"""Coloring transfers between [4]^n and {-1,+1}^(n+1), the reduction of a
monochromatic-middle subcube to a class coloring, and the four-direction case
analysis producing a monochromatic planar K4.
"""
from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from typing import Callable, Iterator, Mapping, Sequence

from .cube import (
    BLUE,
    RED,
    Color,
    Rectangle,
    Vector,
    add,
    canonical,
    direction_to_str,
    disjoint_support,
    edge_class,
    edges_in_class,
    enumerate_directions,
    k4_base_vertices,
    k4_vertices,
    make_edge,
    make_k4,
    sub,
    vertex_to_str,
)
from .paramsets import (
    FLIP,
    SIGNS,
    ParameterMap,
    PointSet,
    Var,
    big_phi,
    canonical_maps,
    hyperbowtie,
    hyperbowtie_to_ttt,
    materialize,
    phi,
)

EdgeColor = Callable[[Sequence[int], Sequence[int]], Color]


class ContractViolation(ValueError):
    pass


# -- lifting a coloring of [4]^n to the cube ------------------------------------------


def lift_coloring(c4: Mapping | Callable) -> EdgeColor:
    """Edge coloring of {-1,+1}^(n+1) induced by a coloring of [4]^n.

    Crossing edges take the color of their image under big_phi.  An edge
    inside one half is oriented from the endpoint holding -1 at the first
    coordinate where the endpoints differ, and colored like the crossing
    edge (-1, x_1..x_n) -> (+1, y_1..y_n).
    """
    color4 = c4 if callable(c4) else c4.__getitem__

    def color(u, v):
        u, v = tuple(u), tuple(v)
        if u[0] != v[0]:
            return color4(big_phi(u, v))
        i = next(k for k in range(len(u)) if u[k] != v[k])
        x, y = (u, v) if u[i] == -1 else (v, u)
        return color4(tuple(phi(a, b) for a, b in zip(x[1:], y[1:])))

    return color


def subcube_is_mono(ec: EdgeColor, pts) -> Color | None:
    pts = sorted(pts)
    c0 = ec(pts[0], pts[1])
    for p, q in itertools.combinations(pts, 2):
        if ec(p, q) is not c0:
            return None
    return c0


def iter_mono_subcubes(ec: EdgeColor, n: int, d: int) -> Iterator[tuple[ParameterMap, Color]]:
    if n > 6 or d > 3 or d < 1:
        raise ValueError("exhaustive subcube search is limited to n <= 6, 1 <= d <= 3")
    for f in canonical_maps(SIGNS, FLIP, d, n):
        col = subcube_is_mono(ec, materialize(f))
        if col is not None:
            yield f, col


def find_mono_subcube(ec: EdgeColor, n: int, d: int) -> ParameterMap | None:
    """First monochromatic d-subcube of {-1,+1}^n, all C(2^d, 2) edges counted."""
    return next((f for f, _ in iter_mono_subcubes(ec, n, d)), None)


@dataclass(frozen=True)
class ExtractedSpace:
    space: ParameterMap
    points: PointSet
    color: Color
    crossing: bool


def extract_ttt_space(f: ParameterMap, c4: Mapping | Callable) -> ExtractedSpace:
    """Monochromatic tic-tac-toe space of [4]^n from a monochromatic subcube of the lift."""
    color4 = c4 if callable(c4) else c4.__getitem__
    ec = lift_coloring(color4)
    if subcube_is_mono(ec, materialize(f)) is None:
        raise ContractViolation("subcube is not monochromatic under the lifted coloring")
    crossing = isinstance(f.patterns[0], Var)
    if crossing:
        g_src = f
    else:
        i = next(k for k, p in enumerate(f.patterns) if isinstance(p, Var))
        # reading coordinate i in place of coordinate 0 turns the edges changing
        # coordinate i into crossing edges with the same colors
        g_src = ParameterMap(f.alphabet, f.group, f.k, (f.patterns[i],) + f.patterns[1:])
    hb = hyperbowtie(g_src)
    if not crossing:
        pts = materialize(f)
        i = next(k for k, p in enumerate(f.patterns) if isinstance(p, Var))
        altered = {
            ((-1,) + p[1:], (1,) + q[1:]) for p in pts for q in pts if p[i] == -1 and q[i] == 1
        }
        assert altered == set(hb.edges)
    img = frozenset(big_phi(lo, hi) for lo, hi in hb.edges)
    g = hyperbowtie_to_ttt(g_src)
    if materialize(g) != img:
        raise AssertionError("case table disagrees with the direct image")
    cols = {color4(z) for z in img}
    if len(cols) != 1:
        raise AssertionError("extracted space is not monochromatic")
    return ExtractedSpace(g, img, cols.pop(), crossing)


# -- certificates -------------------------------------------------------------------------


@dataclass(frozen=True)
class MonoK4Certificate:
    color: Color
    rectangle: Rectangle | None = None
    classes: frozenset | None = None
    points: tuple[Vector, ...] | None = None
    edges: tuple[tuple[Vector, Vector, Color], ...] = field(default=())

    def to_json(self) -> str:
        doc: dict = {"color": self.color.value}
        if self.rectangle is not None:
            doc["rectangle"] = [direction_to_str(self.rectangle.a), direction_to_str(self.rectangle.b)]
        if self.classes is not None:
            doc["classes"] = sorted(direction_to_str(d) for d in self.classes)
        if self.points is not None:
            doc["points"] = [vertex_to_str(p) for p in self.points]
        if self.edges:
            doc["edges"] = [[vertex_to_str(u), vertex_to_str(v), c.value] for u, v, c in self.edges]
        return json.dumps(doc, indent=1)


def is_planar_k4(points: Sequence[Vector]) -> bool:
    """Four distinct points of the form x, x^A, x^B, x^(A u B) with A, B disjoint, nonempty."""
    pts = [tuple(p) for p in points]
    if len(set(pts)) != 4:
        return False
    x = pts[0]
    diff = [frozenset(i for i in range(len(x)) if p[i] != x[i]) for p in pts[1:]]
    for a, b, ab in itertools.permutations(diff):
        if a and b and not a & b and a | b == ab:
            return True
    return False


def verify_point_certificate(cert: MonoK4Certificate, ec: EdgeColor) -> bool:
    if cert.points is None or not is_planar_k4(cert.points):
        return False
    return all(ec(p, q) is cert.color for p, q in itertools.combinations(cert.points, 2))


def verify_class_certificate(cert: MonoK4Certificate, oracle: Mapping | Callable) -> bool:
    col = oracle if callable(oracle) else oracle.__getitem__
    if cert.rectangle is None or not disjoint_support(*cert.rectangle):
        return False
    k4 = make_k4(cert.rectangle)
    return k4 == cert.classes and all(col(d) is cert.color for d in k4)


# -- reduction of a monochromatic-middle subcube ----------------------------------------


@dataclass(frozen=True)
class ReductionOutcome:
    certificate: MonoK4Certificate | None = None
    induced: dict | None = None
    middle: Color = RED

    def __post_init__(self):
        if (self.certificate is None) == (self.induced is None):
            raise ValueError("exactly one of certificate / induced must be set")


def reduce_to_class_coloring(ec: EdgeColor, d: int) -> ReductionOutcome:
    """Apply the three reduction rules to an edge coloring of {-1,+1}^(d+1).

    Coordinate 0 is the middle; its crossing edges must share one color,
    which is treated as Red (colors are swapped internally otherwise).
    Top is x_0 = +1, bottom is x_0 = -1.
    """
    pts = list(itertools.product((-1, 1), repeat=d))
    middle = {ec((-1,) + p, (1,) + q) for p in pts for q in pts}
    if len(middle) != 1:
        raise ContractViolation("middle edges are not monochromatic")
    mid = middle.pop()
    internal = (lambda u, v: ec(u, v)) if mid is RED else (lambda u, v: ec(u, v).swap())
    induced = {}
    for a in enumerate_directions(d):
        edges = edges_in_class(a, d)
        top = [internal((1,) + u, (1,) + v) for u, v in edges]
        bottom = [internal((-1,) + u, (-1,) + v) for u, v in edges]
        if all(c is BLUE for c in top):
            induced[a] = BLUE
        elif all(c is BLUE for c in bottom):
            induced[a] = RED
        else:
            tu, tv = next(e for e, c in zip(edges, top) if c is RED)
            bu, bv = next(e for e, c in zip(edges, bottom) if c is RED)
            # orient the bottom edge parallel to the top one
            if sub(bv, bu) != sub(tv, tu):
                bu, bv = bv, bu
            quad = ((1,) + tu, (1,) + tv, (-1,) + bu, (-1,) + bv)
            edges6 = tuple(
                (*make_edge(p, q), ec(p, q)) for p, q in itertools.combinations(quad, 2)
            )
            cert = MonoK4Certificate(mid, points=quad, edges=edges6)
            return ReductionOutcome(certificate=cert, middle=mid)
    return ReductionOutcome(induced=induced, middle=mid)


def table_coloring(table: Mapping) -> EdgeColor:
    """Edge coloring backed by a dict keyed by vertex pairs (in either order)."""
    sym = {frozenset(k): c for k, c in table.items()}
    return lambda u, v: sym[frozenset((tuple(u), tuple(v)))]


def random_reduction_coloring(d: int, rng: random.Random) -> dict:
    """Edge coloring of {-1,+1}^(d+1) with a one-colored middle.

    Each parallel class is made top-Blue, bottom-Blue or mixed so that direct
    and induced outcomes both occur; "Blue" means the non-middle color.
    """
    mid = rng.choice((RED, BLUE))
    modes = {}
    out = {}
    for u, v in itertools.combinations(itertools.product((-1, 1), repeat=d + 1), 2):
        if u[0] != v[0]:
            col = mid
        else:
            mode = modes.setdefault(edge_class(u[1:], v[1:]), rng.choice(("top", "bottom", "mixed", "mixed")))
            if u[0] == {"top": 1, "bottom": -1}.get(mode):
                col = mid.swap()
            else:
                col = mid.swap() if rng.random() < 0.8 else mid
        out[(u, v)] = col
    return out


def lift_induced_k4(ec: EdgeColor, outcome: ReductionOutcome, r: Rectangle) -> MonoK4Certificate:
    """Concrete monochromatic K4 on the top or bottom for a mono K4 of the induced coloring.

    An internally Blue K4 lives on the top, an internally Red one on the
    bottom; either way the concrete K4 has the internal color Blue.
    """
    if outcome.induced is None:
        raise ValueError("outcome carries no induced coloring")
    k4 = make_k4(r)
    cols = {outcome.induced[c] for c in k4}
    if len(cols) != 1:
        raise ContractViolation("K4 is not monochromatic under the induced coloring")
    head = 1 if cols.pop() is BLUE else -1
    d = len(r.a)
    x = next(k4_base_vertices(r, d))
    pts, _ = k4_vertices(r, x)
    quad = tuple((head,) + p for p in pts)
    color = outcome.middle.swap()
    edges6 = tuple((*make_edge(p, q), ec(p, q)) for p, q in itertools.combinations(quad, 2))
    return MonoK4Certificate(color, rectangle=r, classes=k4, points=quad, edges=edges6)


# -- four directions with max-determined sums ---------------------------------------------


def _check_disjoint(dirs: Sequence[Vector]) -> None:
    for a, b in itertools.combinations(dirs, 2):
        if not disjoint_support(a, b):
            raise ContractViolation(f"directions {a} and {b} overlap")


def subset_sums(dirs: Sequence[Vector]) -> Iterator[tuple[tuple[int, ...], Vector]]:
    """(index subset, canonical sum) for every nonempty subset."""
    n = len(dirs[0])
    for r in range(1, len(dirs) + 1):
        for idx in itertools.combinations(range(len(dirs)), r):
            s = (0,) * n
            for i in idx:
                s = add(s, dirs[i])
            yield idx, canonical(s)


def folkman_branches(a, b, c, d) -> list[Rectangle]:
    """The five candidate K4s of the case analysis, as generating rectangles, in order."""
    amb, cmd = sub(a, b), sub(c, d)
    return [
        Rectangle(a, b),
        Rectangle(c, d),
        Rectangle(add(a, c), add(b, d)),
        Rectangle(add(a, d), add(b, c)),
        Rectangle(amb, cmd),
    ]


def folkman_case_analysis(a, b, c, d, oracle: Mapping | Callable) -> MonoK4Certificate:
    """Monochromatic K4 from four disjoint directions whose 15 subset-sums share a color.

    Decides on the colors of a-b, c-d, a-b+c-d and a-b-c+d in turn; if all
    four have the opposite color they form the K4 themselves.
    """
    col = oracle if callable(oracle) else oracle.__getitem__
    dirs = [tuple(x) for x in (a, b, c, d)]
    _check_disjoint(dirs)
    sums = {col(s) for _, s in subset_sums(dirs)}
    if len(sums) != 1:
        raise ContractViolation("the 15 subset sums are not all the same color")
    main = sums.pop()
    branches = folkman_branches(*dirs)
    deciders = [sub(*branches[0]), sub(*branches[1]), sub(*branches[2]), sub(*branches[3])]
    for rect, dec in zip(branches[:4], deciders):
        if col(canonical(dec)) is main:
            chosen, color = rect, main
            break
    else:
        chosen, color = branches[4], main.swap()
    k4 = make_k4(chosen)
    cert = MonoK4Certificate(color, rectangle=Rectangle(canonical(chosen.a), canonical(chosen.b)), classes=k4)
    if not all(col(x) is color for x in k4):
        raise AssertionError("case analysis produced a non-monochromatic K4")
    return cert


def find_folkman_directions(cl: Mapping | Callable, k: int, n: int) -> tuple[Vector, ...] | None:
    """k disjoint 0/1 directions whose subset-sum colors depend only on the largest index.

    Depth-first over support bitmasks in increasing order; the first hit is returned.
    """
    if n > 12 or k > 4 or k < 1:
        raise ValueError("brute force is limited to n <= 12, 1 <= k <= 4")
    col = cl if callable(cl) else cl.__getitem__
    full = (1 << n) - 1

    def vec(mask):
        return tuple((mask >> i) & 1 for i in range(n))

    color_of = {}

    def c(mask):
        if mask not in color_of:
            color_of[mask] = col(vec(mask))
        return color_of[mask]

    def rec(chosen: list[int], used: int):
        if len(chosen) == k:
            return list(chosen)
        # sums of earlier directions, for the subsets whose max is the new one
        prefix_sums = [0]
        for m in chosen:
            prefix_sums += [s | m for s in prefix_sums]
        free = full & ~used
        m = free
        cands = []
        while m:
            cands.append(m)
            m = (m - 1) & free
        for mask in reversed(cands):
            target = c(mask)
            if all(c(s | mask) is target for s in prefix_sums[1:]):
                chosen.append(mask)
                hit = rec(chosen, used | mask)
                if hit:
                    return hit
                chosen.pop()
        return None

    hit = rec([], 0)
    return tuple(vec(m) for m in hit) if hit else None


def has_max_determined_sums(dirs: Sequence[Vector], cl: Mapping | Callable) -> bool:
    col = cl if callable(cl) else cl.__getitem__
    _check_disjoint(dirs)
    for idx, s in subset_sums(dirs):
        if col(s) is not col(canonical(dirs[max(idx)])):
            return False
    return True
