"""2x2 squares with Hamming-length-2 sides: classification, census and threshold.

A length-2 edge is stored as (vertex bitmask, flip pair); vertex x and x ^ pair
name the same edge.  Colorings are boolean arrays of shape (2**n, C(n, 2))
with True meaning Red, kept symmetric under that identification.
"""
from __future__ import annotations

import csv
import enum
import io
import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, NamedTuple, Sequence

import numpy as np

from .cube import Color

MAX_CENSUS_DIM = 10


class SquareType(enum.Enum):
    MONO = "mono"
    THREE_ONE = "3-1"
    TWO_ADJ = "2-2 adjacent"
    TWO_OPP = "2-2 opposite"


class Square2x2(NamedTuple):
    base: int
    pair_a: tuple[int, int]
    pair_b: tuple[int, int]

    def vertices(self) -> tuple[int, int, int, int]:
        a, b = _mask(self.pair_a), _mask(self.pair_b)
        return self.base, self.base ^ a, self.base ^ a ^ b, self.base ^ b

    def cycle_edges(self) -> tuple[tuple[int, tuple[int, int]], ...]:
        """The four sides in cycle order, each as (an endpoint, flip pair)."""
        x, xa, _, xb = self.vertices()
        return (x, self.pair_a), (xa, self.pair_b), (xb, self.pair_a), (x, self.pair_b)


def _mask(pair: Iterable[int]) -> int:
    return sum(1 << i for i in pair)


def square(base: int, pair_a: Sequence[int], pair_b: Sequence[int]) -> Square2x2:
    """Canonical form: least vertex as base, pairs sorted."""
    pa, pb = tuple(sorted(pair_a)), tuple(sorted(pair_b))
    if len(pa) != 2 or len(pb) != 2 or set(pa) & set(pb):
        raise ValueError("a 2x2 square needs two disjoint 2-element coordinate sets")
    ma, mb = _mask(pa), _mask(pb)
    base = min(base, base ^ ma, base ^ mb, base ^ ma ^ mb)
    pa, pb = sorted((pa, pb))
    return Square2x2(base, pa, pb)


@lru_cache(maxsize=None)
def pairs(n: int) -> tuple[tuple[int, int], ...]:
    return tuple(itertools.combinations(range(n), 2))


def _check(n: int, lo: int = 4, hi: int = MAX_CENSUS_DIM) -> None:
    if not lo <= n <= hi:
        raise ValueError(f"n must lie in [{lo}, {hi}], got {n}")


class Coloring2:
    """Coloring of the length-2 edges of {-1,+1}^n (bit i of a vertex set means x_i = +1)."""

    def __init__(self, n: int, red: np.ndarray):
        _check(n, 2)
        red = np.asarray(red, dtype=bool)
        if red.shape != (1 << n, len(pairs(n))):
            raise ValueError(f"expected shape {(1 << n, len(pairs(n)))}, got {red.shape}")
        partner = _partner(n)
        if not np.array_equal(red, red[partner, np.arange(red.shape[1])]):
            raise ValueError("coloring disagrees between the two endpoints of an edge")
        self.n = n
        self.red = red

    def __call__(self, x: int, pair: Sequence[int]) -> Color:
        return Color.from_bool(bool(self.red[x, pairs(self.n).index(tuple(sorted(pair)))]))

    @classmethod
    def constant(cls, n: int, color: Color = Color.RED) -> "Coloring2":
        return cls(n, np.full((1 << n, len(pairs(n))), color is Color.RED))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "Coloring2":
        raw = rng.integers(0, 2, size=(1 << n, len(pairs(n)))).astype(bool)
        lo = np.minimum(np.arange(1 << n)[:, None], _partner(n))
        return cls(n, raw[lo, np.arange(raw.shape[1])])

    @classmethod
    def from_function(cls, n: int, f: Callable[[int, tuple[int, int]], Color]) -> "Coloring2":
        """f(x, pair) for the endpoint x of the edge with the smaller bitmask."""
        ps = pairs(n)
        red = np.zeros((1 << n, len(ps)), dtype=bool)
        for j, p in enumerate(ps):
            m = _mask(p)
            for x in range(1 << n):
                red[x, j] = f(min(x, x ^ m), p) is Color.RED
        return cls(n, red)


@lru_cache(maxsize=None)
def _partner(n: int) -> np.ndarray:
    masks = np.array([_mask(p) for p in pairs(n)], dtype=np.int64)
    return np.arange(1 << n)[:, None] ^ masks[None, :]


# -- classification ---------------------------------------------------------------------


def classify_colors(c0: bool, c1: bool, c2: bool, c3: bool) -> SquareType:
    """Type of a square from its four side colors in cycle order."""
    reds = c0 + c1 + c2 + c3
    if reds in (0, 4):
        return SquareType.MONO
    if reds in (1, 3):
        return SquareType.THREE_ONE
    return SquareType.TWO_OPP if c0 == c2 else SquareType.TWO_ADJ


def classify_square(s: Square2x2, ec: Coloring2) -> SquareType:
    ps = pairs(ec.n)
    return classify_colors(*(bool(ec.red[x, ps.index(p)]) for x, p in s.cycle_edges()))


@lru_cache(maxsize=None)
def _square_index(n: int) -> np.ndarray:
    """Flat edge indices of the four cycle sides of every square, shape (S, 4)."""
    ps = pairs(n)
    P = len(ps)
    rows = []
    for ia, ib in itertools.combinations(range(P), 2):
        a, b = ps[ia], ps[ib]
        if set(a) & set(b):
            continue
        ma, mb = _mask(a), _mask(b)
        for x in range(1 << n):
            if x != min(x, x ^ ma, x ^ mb, x ^ ma ^ mb):
                continue
            rows.append((x * P + ia, (x ^ ma) * P + ib, (x ^ mb) * P + ia, x * P + ib))
    return np.array(rows, dtype=np.int64)


def iter_squares(n: int):
    _check(n)
    ps = pairs(n)
    for a, b in itertools.combinations(ps, 2):
        if set(a) & set(b):
            continue
        ma, mb = _mask(a), _mask(b)
        for x in range(1 << n):
            if x == min(x, x ^ ma, x ^ mb, x ^ ma ^ mb):
                yield Square2x2(x, a, b)


def type_counts(ec: Coloring2) -> dict[SquareType, int]:
    idx = _square_index(ec.n)
    sides = ec.red.reshape(-1)[idx]
    reds = sides.sum(axis=1)
    two = reds == 2
    opp = two & (sides[:, 0] == sides[:, 2])
    return {
        SquareType.MONO: int(np.count_nonzero((reds == 0) | (reds == 4))),
        SquareType.THREE_ONE: int(np.count_nonzero((reds == 1) | (reds == 3))),
        SquareType.TWO_ADJ: int(np.count_nonzero(two & ~opp)),
        SquareType.TWO_OPP: int(np.count_nonzero(opp)),
    }


# -- census -----------------------------------------------------------------------------


@dataclass(frozen=True)
class CensusReport:
    n: int
    squares: int
    counts: dict
    p_mono: Fraction
    p_31: Fraction
    p_2adj: Fraction
    p_2opp: Fraction
    right_angle_mono: Fraction
    parallel_mono: Fraction
    samples: int | None = None

    def total(self) -> Fraction:
        return self.p_mono + self.p_31 + self.p_2adj + self.p_2opp

    def identities_hold(self) -> bool:
        return (
            self.total() == 1
            and self.right_angle_mono == self.p_mono + self.p_31 / 2 + self.p_2adj / 2
            and self.parallel_mono == self.p_mono + self.p_31 / 2 + self.p_2opp
        )


def _report(n, counts, total, ra, par, samples=None) -> CensusReport:
    return CensusReport(
        n,
        total,
        counts,
        Fraction(counts[SquareType.MONO], total),
        Fraction(counts[SquareType.THREE_ONE], total),
        Fraction(counts[SquareType.TWO_ADJ], total),
        Fraction(counts[SquareType.TWO_OPP], total),
        ra,
        par,
        samples,
    )


def pair_statistics(ec: Coloring2) -> tuple[Fraction, Fraction]:
    """Mono right-angle and mono parallel-pair proportions, counted pair by pair.

    Shares nothing with the square classification: right angles are two
    edges at a vertex with disjoint flip pairs, parallel pairs are an edge
    and its translate by a length-2 move disjoint from the flip pair.
    """
    n, red = ec.n, ec.red
    ps = pairs(n)
    ra_mono = ra_all = 0
    par_mono = par_all = 0
    verts = np.arange(1 << n)
    for ia, ib in itertools.combinations(range(len(ps)), 2):
        if set(ps[ia]) & set(ps[ib]):
            continue
        ra_all += 1 << n
        ra_mono += int(np.count_nonzero(red[:, ia] == red[:, ib]))
    for ia, a in enumerate(ps):
        for t in ps:
            if set(a) & set(t):
                continue
            moved = red[verts ^ _mask(t), ia]
            # every unordered pair shows up four times
            par_all += 1 << n
            par_mono += int(np.count_nonzero(red[:, ia] == moved))
    return Fraction(ra_mono, ra_all), Fraction(par_mono, par_all)


def census(ec: Coloring2) -> CensusReport:
    _check(ec.n)
    counts = type_counts(ec)
    total = sum(counts.values())
    ra, par = pair_statistics(ec)
    return _report(ec.n, counts, total, ra, par)


def random_square(n: int, rng: np.random.Generator) -> Square2x2:
    """Uniform over squares: a uniform (vertex, ordered disjoint pair pair) lands on each square 8 times."""
    while True:
        a = tuple(sorted(rng.choice(n, 2, replace=False).tolist()))
        b = tuple(sorted(rng.choice(n, 2, replace=False).tolist()))
        if not set(a) & set(b):
            return square(int(rng.integers(0, 1 << n)), a, b)


def sample_census(ec: Coloring2, samples: int, seed: int) -> CensusReport:
    """Monte Carlo estimate of the census; mono proportions come from the same squares."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    counts = {t: 0 for t in SquareType}
    for _ in range(samples):
        counts[classify_square(random_square(ec.n, rng), ec)] += 1
    p = {t: Fraction(c, samples) for t, c in counts.items()}
    ra = p[SquareType.MONO] + p[SquareType.THREE_ONE] / 2 + p[SquareType.TWO_ADJ] / 2
    par = p[SquareType.MONO] + p[SquareType.THREE_ONE] / 2 + p[SquareType.TWO_OPP]
    return _report(ec.n, counts, samples, ra, par, samples=samples)


# -- bounds and threshold ---------------------------------------------------------------


def lemma_bounds(n: int) -> tuple[Fraction, Fraction, Fraction | None]:
    """(right-angle lower bound, parallel lower bound, 3-1 upper bound); the last needs n >= 5."""
    if n < 4:
        raise ValueError("bounds need n >= 4")
    ra = Fraction(1, 2) - Fraction(1, 2 * (n // 2) - 2)
    par = Fraction(1, 2) - Fraction(1, 2 * (n - 3))
    return ra, par, Fraction(14, 15) if n >= 5 else None


def bounds_hold(r: CensusReport) -> tuple[bool, bool, bool]:
    ra, par, odd = lemma_bounds(r.n)
    return r.right_angle_mono >= ra, r.parallel_mono >= par, odd is None or r.p_31 <= odd


def margin(n: int) -> Fraction:
    """Lower bound for 2 * p_mono from combining the three lemma bounds with eq. sum = 1."""
    if n < 5:
        raise ValueError("margin needs n >= 5")
    ra, par, odd = lemma_bounds(n)
    # 2*ra + par - 1 bounds 2 p_mono + p_31 / 2 from below
    return 2 * ra + par - 1 - odd / 2


def square_threshold(limit: int = 10_000) -> tuple[int, Fraction]:
    """Least n >= 5 with positive margin, together with that margin."""
    for n in range(5, limit):
        m = margin(n)
        if m > 0:
            return n, m
    raise RuntimeError("no threshold below limit")


@dataclass(frozen=True)
class ParityReport:
    n: int
    vertices: int
    squares: int
    edges: int
    multiplicities: frozenset
    all_odd_impossible: bool


def _five_point_config(n: int, v: int, perm: Sequence[int] | None) -> set[int]:
    if n < 5:
        raise ValueError("parity structure needs n >= 5")
    perm = list(range(n)) if perm is None else list(perm)
    if sorted(perm) != list(range(n)):
        raise ValueError("perm must be a permutation of range(n)")
    five = perm[:5]
    return {v ^ (1 << five[i]) ^ (1 << five[j]) for i, j in itertools.combinations(range(5), 2)}


def square_sides(n: int, v: int = 0, perm: Sequence[int] | None = None) -> list[tuple[tuple[int, int], ...]]:
    """Squares among the ten vertices v flipped on two of five chosen coordinates, as side lists."""
    pts = _five_point_config(n, v, perm)
    out = set()
    for x in pts:
        for a, b in itertools.combinations(pairs(n), 2):
            if set(a) & set(b):
                continue
            vs = square(x, a, b).vertices()
            if set(vs) <= pts:
                out.add(tuple(sorted(tuple(sorted((vs[k], vs[(k + 1) % 4]))) for k in range(4))))
    return sorted(out)


def verify_parity_structure(n: int, v: int = 0, perm: Sequence[int] | None = None) -> ParityReport:
    pts = sorted(_five_point_config(n, v, perm))
    edges = {(p, q) for p, q in itertools.combinations(pts, 2) if bin(p ^ q).count("1") == 2}
    sqs = square_sides(n, v, perm)
    mult = dict.fromkeys(edges, 0)
    for sides in sqs:
        for e in sides:
            mult[e] += 1
    # summing red sides over all squares counts each edge mult times; with every
    # multiplicity even that sum is even, but 15 odd squares would make it odd
    all_even = all(m % 2 == 0 for m in mult.values())
    return ParityReport(n, len(pts), len(sqs), len(edges), frozenset(mult.values()), all_even and len(sqs) % 2 == 1)


# -- CSV --------------------------------------------------------------------------------

CSV_FIELDS = (
    "n", "coloring", "squares", "samples", "p_mono", "p_31", "p_2adj", "p_2opp",
    "right_angle_mono", "parallel_mono", "right_angle_lb", "parallel_lb", "odd_ub",
)


def csv_row(r: CensusReport, label: str) -> dict:
    ra, par, odd = lemma_bounds(r.n)
    return {
        "n": r.n, "coloring": label, "squares": r.squares, "samples": r.samples or "",
        "p_mono": r.p_mono, "p_31": r.p_31, "p_2adj": r.p_2adj, "p_2opp": r.p_2opp,
        "right_angle_mono": r.right_angle_mono, "parallel_mono": r.parallel_mono,
        "right_angle_lb": ra, "parallel_lb": par, "odd_ub": odd if odd is not None else "",
    }


def to_csv(rows: Iterable[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: str(v) for k, v in row.items()})
    return buf.getvalue()
