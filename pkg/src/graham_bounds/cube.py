"""Vertices, directions and planar K4s of the cube {-1,+1}^n.

Vertices are tuples of +-1 and directions (parallel edge classes) are tuples
over {-1, 0, +1} whose first nonzero entry is +1.  Everything here is a pure
function of immutable tuples.
"""
from __future__ import annotations

import enum
import itertools
from functools import lru_cache
from typing import Iterator, NamedTuple, Sequence

MAX_DIM = 63
MAX_EXHAUSTIVE_DIM = 8

Vector = tuple[int, ...]
Edge = tuple[Vector, Vector]
PlanarK4 = frozenset


class Color(enum.Enum):
    RED = "R"
    BLUE = "B"

    def swap(self) -> "Color":
        return Color.BLUE if self is Color.RED else Color.RED

    @classmethod
    def from_bool(cls, value: bool) -> "Color":
        return cls.RED if value else cls.BLUE


RED, BLUE = Color.RED, Color.BLUE


def check_dim(n: int, cap: int = MAX_DIM) -> None:
    if not isinstance(n, int) or not 1 <= n <= cap:
        raise ValueError(f"dimension must be an integer in [1, {cap}], got {n!r}")


def canonical(v: Sequence[int]) -> Vector:
    """Return whichever of v, -v has +1 as its first nonzero coordinate."""
    for x in v:
        if x > 0:
            return tuple(v)
        if x < 0:
            return tuple(-y for y in v)
    raise ValueError("the zero vector is not a direction")


def is_direction(v: Sequence[int]) -> bool:
    return all(x in (-1, 0, 1) for x in v) and any(v) and canonical(v) == tuple(v)


def support(a: Sequence[int]) -> frozenset[int]:
    return frozenset(i for i, x in enumerate(a) if x)


@lru_cache(maxsize=None)
def enumerate_directions(n: int) -> tuple[Vector, ...]:
    """All (3^n - 1)/2 canonical directions, lexicographic with -1 < 0 < +1."""
    check_dim(n, cap=16)
    return tuple(
        v for v in itertools.product((-1, 0, 1), repeat=n) if any(v) and canonical(v) == v
    )


@lru_cache(maxsize=None)
def direction_index(n: int) -> dict[Vector, int]:
    return {d: i for i, d in enumerate(enumerate_directions(n))}


def disjoint_support(a: Sequence[int], b: Sequence[int]) -> bool:
    if len(a) != len(b):
        raise ValueError(f"dimension mismatch: {len(a)} vs {len(b)}")
    return all(not (x and y) for x, y in zip(a, b))


def add(a: Sequence[int], b: Sequence[int]) -> Vector:
    return tuple(x + y for x, y in zip(a, b))


def sub(a: Sequence[int], b: Sequence[int]) -> Vector:
    return tuple(x - y for x, y in zip(a, b))


class Rectangle(NamedTuple):
    a: Vector
    b: Vector


def rectangle(a: Sequence[int], b: Sequence[int]) -> Rectangle:
    """Validated rectangle with its sides stored in lexicographic order."""
    a, b = canonical(a), canonical(b)
    if not disjoint_support(a, b):
        raise ValueError(f"sides {a} and {b} have overlapping support")
    # tuple order on {-1, 0, +1} is the lexicographic order used everywhere
    return Rectangle(*sorted((a, b)))


def make_k4(r: Rectangle | tuple) -> PlanarK4:
    """The four edge classes {a, b, a+b, a-b} of the planar K4 containing r."""
    a, b = r
    if not disjoint_support(a, b):
        raise ValueError(f"sides {a} and {b} have overlapping support")
    return frozenset((canonical(a), canonical(b), canonical(add(a, b)), canonical(sub(a, b))))


def enumerate_rectangles(n: int) -> Iterator[Rectangle]:
    check_dim(n, cap=MAX_EXHAUSTIVE_DIM)
    dirs = enumerate_directions(n)
    masks = [sum(1 << i for i, x in enumerate(d) if x) for d in dirs]
    for i, j in itertools.combinations(range(len(dirs)), 2):
        if not masks[i] & masks[j]:
            yield Rectangle(dirs[i], dirs[j])


def vertices(n: int) -> Iterator[Vector]:
    check_dim(n)
    return itertools.product((-1, 1), repeat=n)


def flip(x: Sequence[int], coords) -> Vector:
    coords = set(coords)
    return tuple(-v if i in coords else v for i, v in enumerate(x))


def make_edge(u: Sequence[int], v: Sequence[int]) -> Edge:
    u, v = tuple(u), tuple(v)
    if len(u) != len(v):
        raise ValueError("endpoints have different dimensions")
    if u == v:
        raise ValueError("an edge needs two distinct endpoints")
    return (u, v) if u < v else (v, u)


def edge_class(u: Sequence[int], v: Sequence[int]) -> Vector:
    """The direction (parallel class) of the edge {u, v}."""
    return canonical(tuple((y - x) // 2 for x, y in zip(u, v)))


def hamming(u: Sequence[int], v: Sequence[int]) -> int:
    return sum(x != y for x, y in zip(u, v))


def step(x: Sequence[int], a: Sequence[int]) -> Vector | None:
    """Other endpoint of the a-edge leaving x, or None if x has no such edge.

    The a-edge leaves x exactly when x agrees with -a on the support of a.
    """
    if any(ai and xi != -ai for xi, ai in zip(x, a)):
        return None
    return tuple(-xi if ai else xi for xi, ai in zip(x, a))


def edges_in_class(a: Sequence[int], n: int) -> list[Edge]:
    a = tuple(a)
    check_dim(n)
    if len(a) != n or not is_direction(a):
        raise ValueError(f"{a} is not a canonical direction of dimension {n}")
    free = [i for i, x in enumerate(a) if not x]
    out = []
    for bits in itertools.product((-1, 1), repeat=len(free)):
        x = [-ai for ai in a]
        for i, s in zip(free, bits):
            x[i] = s
        out.append(make_edge(x, step(x, a)))
    return out


def k4_vertices(r: Rectangle | tuple, x: Sequence[int]) -> tuple[tuple[Vector, ...], list[tuple[Edge, Vector]]]:
    """Concrete planar K4 spanned by rectangle r at base vertex x.

    Returns the four vertices and the six edges, each labelled with its class.
    """
    a, b = r
    x = tuple(x)
    if not disjoint_support(a, b):
        raise ValueError("rectangle sides overlap")
    xa = step(x, a)
    xb = step(x, b)
    if xa is None or xb is None:
        raise ValueError(f"base vertex {x} is incompatible with rectangle {tuple(r)}")
    xab = step(xa, b)
    pts = (x, xa, xb, xab)
    edges = [(make_edge(p, q), edge_class(p, q)) for p, q in itertools.combinations(pts, 2)]
    return pts, edges


def k4_base_vertices(r: Rectangle | tuple, n: int) -> Iterator[Vector]:
    """All base vertices compatible with r (agreeing with -a, -b on the supports)."""
    a, b = r
    fixed = {i: -s for i, s in enumerate(a) if s}
    fixed.update({i: -s for i, s in enumerate(b) if s})
    free = [i for i in range(n) if i not in fixed]
    for bits in itertools.product((-1, 1), repeat=len(free)):
        x = [0] * n
        for i, s in fixed.items():
            x[i] = s
        for i, s in zip(free, bits):
            x[i] = s
        yield tuple(x)


def direction_to_str(a: Sequence[int]) -> str:
    return "".join("-0+"[x + 1] for x in a)


def direction_from_str(s: str) -> Vector:
    try:
        v = tuple("-0+".index(ch) - 1 for ch in s)
    except ValueError:
        raise ValueError(f"bad direction string {s!r}") from None
    if not is_direction(v):
        raise ValueError(f"{s!r} is not a canonical direction")
    return v


def vertex_to_str(x: Sequence[int]) -> str:
    return "".join("-+"[(v + 1) // 2] for v in x)


def vertex_from_str(s: str) -> Vector:
    if not s or any(ch not in "-+" for ch in s):
        raise ValueError(f"bad vertex string {s!r}")
    return tuple(1 if ch == "+" else -1 for ch in s)
