"""Parameter sets over an alphabet with a group action.

A k-parameter map sends each output coordinate either to a constant letter
or to a (possibly twisted) copy of one parameter.  Over [t] with the trivial
group the images are combinatorial spaces; with the flip x -> t+1-x they are
tic-tac-toe spaces; over {-1,+1} with negation they are subcubes.

Parameters are 0-based.  Subcubes of {-1,+1}^(n+1) use coordinate 0 as the
"crossing" coordinate separating the halves Q- (x_0 = -1) and Q+ (x_0 = +1).
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Callable, Iterator, Mapping, Sequence

from .cube import Color

TRIVIAL = "trivial"
FLIP = "flip"
MAX_MATERIALIZE = 1 << 20

PointSet = frozenset


@dataclass(frozen=True)
class Const:
    value: int


@dataclass(frozen=True)
class Var:
    index: int
    twist: bool = False  # True applies the flip


Pattern = Const | Var


@dataclass(frozen=True)
class ParameterMap:
    alphabet: tuple[int, ...]
    group: str
    k: int
    patterns: tuple[Pattern, ...]

    def __post_init__(self):
        if len(self.alphabet) < 2 or len(set(self.alphabet)) != len(self.alphabet):
            raise ValueError("alphabet needs at least two distinct letters")
        if self.group not in (TRIVIAL, FLIP):
            raise ValueError(f"unknown group {self.group!r}")
        if not 0 <= self.k <= len(self.patterns):
            raise ValueError("need 0 <= k <= n")
        used = set()
        for p in self.patterns:
            if isinstance(p, Const):
                if p.value not in self.alphabet:
                    raise ValueError(f"constant {p.value} not in alphabet")
            elif isinstance(p, Var):
                if not 0 <= p.index < self.k:
                    raise ValueError(f"parameter {p.index} out of range")
                if p.twist and self.group == TRIVIAL:
                    raise ValueError("twisted parameter under the trivial group")
                used.add(p.index)
            else:
                raise TypeError(f"bad pattern {p!r}")
        if used != set(range(self.k)):
            raise ValueError(f"parameters {sorted(set(range(self.k)) - used)} never appear; the map is not injective")

    @property
    def t(self) -> int:
        return len(self.alphabet)

    @property
    def n(self) -> int:
        return len(self.patterns)

    def flip(self, x: int) -> int:
        a = self.alphabet
        return a[len(a) - 1 - a.index(x)]

    def __call__(self, params: Sequence[int]) -> tuple[int, ...]:
        out = []
        for p in self.patterns:
            if isinstance(p, Const):
                out.append(p.value)
            else:
                x = params[p.index]
                out.append(self.flip(x) if p.twist else x)
        return tuple(out)


def letters(t: int) -> tuple[int, ...]:
    return tuple(range(1, t + 1))


SIGNS = (-1, 1)


def over(t: int, group: str, k: int, patterns: Sequence[Pattern]) -> ParameterMap:
    return ParameterMap(letters(t), group, k, tuple(patterns))


def cube_map(k: int, patterns: Sequence[Pattern]) -> ParameterMap:
    """k-dimensional subcube map into {-1,+1}^n (negation is the twist)."""
    return ParameterMap(SIGNS, FLIP, k, tuple(patterns))


def materialize(f: ParameterMap) -> PointSet:
    if f.t**f.k > MAX_MATERIALIZE:
        raise ValueError(f"{f.t}^{f.k} points exceed the materialization limit {MAX_MATERIALIZE}")
    pts = frozenset(f(x) for x in itertools.product(f.alphabet, repeat=f.k))
    assert len(pts) == f.t**f.k
    return pts


def compose(f: ParameterMap, g: ParameterMap) -> ParameterMap:
    """The map x -> f(g(x)); g's image must live in f's parameter space."""
    if f.alphabet != g.alphabet or f.group != g.group or g.n != f.k:
        raise ValueError("maps are not composable")
    out: list[Pattern] = []
    for p in f.patterns:
        if isinstance(p, Const):
            out.append(p)
            continue
        q = g.patterns[p.index]
        if isinstance(q, Const):
            out.append(Const(f.flip(q.value) if p.twist else q.value))
        else:
            out.append(Var(q.index, p.twist != q.twist))
    return ParameterMap(f.alphabet, f.group, g.k, tuple(out))


def canonical_maps(alphabet: Sequence[int], group: str, d: int, n: int) -> Iterator[ParameterMap]:
    """One map per d-dimensional parameter set of alphabet^n.

    Parameters are numbered by first appearance and first appear untwisted,
    which removes the reparameterization freedom.
    """
    alphabet = tuple(alphabet)
    twists = (False, True) if group == FLIP else (False,)

    def rec(i: int, used: int, acc: list):
        if n - i < d - used:
            return
        if i == n:
            yield ParameterMap(alphabet, group, d, tuple(acc))
            return
        choices: list[Pattern] = [Const(a) for a in alphabet]
        choices += [Var(j, tw) for j in range(used) for tw in twists]
        for c in choices:
            acc.append(c)
            yield from rec(i + 1, used, acc)
            acc.pop()
        if used < d:
            acc.append(Var(used, False))
            yield from rec(i + 1, used + 1, acc)
            acc.pop()

    return rec(0, 0, [])


def all_maps(alphabet: Sequence[int], group: str, d: int, n: int) -> Iterator[ParameterMap]:
    """Every valid map, with no reparameterization reduction."""
    alphabet = tuple(alphabet)
    twists = (False, True) if group == FLIP else (False,)
    choices = [Const(a) for a in alphabet] + [Var(j, tw) for j in range(d) for tw in twists]
    for pats in itertools.product(choices, repeat=n):
        if {p.index for p in pats if isinstance(p, Var)} == set(range(d)):
            yield ParameterMap(alphabet, group, d, pats)


def _check_feasible(t: int, group: str, d: int, n: int, limit: int = 1 << 22) -> None:
    width = t + d * (2 if group == FLIP else 1)
    if width**n > limit:
        raise ValueError(f"~{width}^{n} candidate maps exceed the enumeration limit {limit}")


def iter_spaces(t: int, group: str, d: int, n: int, alphabet: Sequence[int] | None = None) -> Iterator[tuple[ParameterMap, PointSet]]:
    alphabet = tuple(alphabet) if alphabet is not None else letters(t)
    _check_feasible(len(alphabet), group, d, n)
    seen: set[PointSet] = set()
    for f in canonical_maps(alphabet, group, d, n):
        pts = materialize(f)
        if pts not in seen:
            seen.add(pts)
            yield f, pts


def enumerate_spaces(t: int, group: str, d: int, n: int) -> list[PointSet]:
    """All distinct d-dimensional parameter sets of [t]^n, deduplicated by image."""
    return [pts for _, pts in iter_spaces(t, group, d, n)]


def _as_lookup(coloring) -> Callable[[tuple], Color]:
    if callable(coloring):
        return coloring
    return coloring.__getitem__


def find_mono_space(coloring: Mapping | Callable, t: int, group: str, d: int, n: int) -> PointSet | None:
    """First monochromatic d-space of [t]^n in canonical order, or None."""
    if t**n > 1 << 24:
        raise ValueError(f"{t}^{n} points exceed the coloring limit")
    color = _as_lookup(coloring)
    for _, pts in iter_spaces(t, group, d, n):
        it = iter(pts)
        c0 = color(next(it))
        if all(color(p) is c0 for p in it):
            return pts
    return None


# -- the crossing-edge bijection ------------------------------------------------

_PHI = {(-1, -1): 1, (-1, 1): 2, (1, -1): 3, (1, 1): 4}
_PHI_INV = {v: k for k, v in _PHI.items()}


def phi(x: int, y: int) -> int:
    return _PHI[(x, y)]


def phi_inv(z: int) -> tuple[int, int]:
    return _PHI_INV[z]


def orient_crossing(u: Sequence[int], v: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """(x-, x+) for an edge whose endpoints differ in coordinate 0."""
    u, v = tuple(u), tuple(v)
    if len(u) != len(v) or u[0] == v[0]:
        raise ValueError(f"edge {u}-{v} does not cross coordinate 0")
    return (u, v) if u[0] == -1 else (v, u)


def big_phi(u: Sequence[int], v: Sequence[int]) -> tuple[int, ...]:
    lo, hi = orient_crossing(u, v)
    return tuple(phi(x, y) for x, y in zip(lo[1:], hi[1:]))


def big_phi_inv(z: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    pairs = [phi_inv(c) for c in z]
    return (-1, *(p[0] for p in pairs)), (1, *(p[1] for p in pairs))


@dataclass(frozen=True)
class Hyperbowtie:
    d: int
    edges: frozenset  # of (x-, x+) pairs
    source: ParameterMap


def hyperbowtie(f: ParameterMap) -> Hyperbowtie:
    """Crossing edges of the (d+1)-subcube f of {-1,+1}^(n+1)."""
    if f.alphabet != SIGNS or f.group != FLIP:
        raise ValueError("hyperbowties come from subcube maps over {-1,+1}")
    if isinstance(f.patterns[0], Const):
        raise ValueError("coordinate 0 is constant: the subcube does not cross")
    pts = materialize(f)
    lo = [p for p in pts if p[0] == -1]
    hi = [p for p in pts if p[0] == 1]
    return Hyperbowtie(f.k - 1, frozenset(itertools.product(lo, hi)), f)


def normalize_crossing(f: ParameterMap) -> ParameterMap:
    """Reparameterize so that coordinate 0 reads parameter 0, untwisted."""
    head = f.patterns[0]
    if not isinstance(head, Var):
        raise ValueError("coordinate 0 must be non-constant")
    j, tw = head.index, head.twist
    relabel = {j: 0}
    relabel.update({m: m + 1 for m in range(j)})
    pats = []
    for p in f.patterns:
        if isinstance(p, Var):
            pats.append(Var(relabel.get(p.index, p.index), p.twist != (tw and p.index == j)))
        else:
            pats.append(p)
    return ParameterMap(f.alphabet, f.group, f.k, tuple(pats))


def hyperbowtie_to_ttt(f: ParameterMap) -> ParameterMap:
    """Tic-tac-toe map g over [4] with big_phi(hyperbowtie(f)) = image of g."""
    if f.alphabet != SIGNS or f.group != FLIP:
        raise ValueError("expected a subcube map over {-1,+1}")
    f = normalize_crossing(f)
    pats: list[Pattern] = []
    for p in f.patterns[1:]:
        if isinstance(p, Const):
            pats.append(Const(phi(p.value, p.value)))
        elif p.index == 0:
            # endpoints sit at x_0 = -1 and x_0 = +1
            lo = 1 if p.twist else -1
            pats.append(Const(phi(lo, -lo)))
        else:
            pats.append(Var(p.index - 1, p.twist))
    return ParameterMap(letters(4), FLIP, f.k - 1, tuple(pats))


def iter_hyperbowties(n: int, d: int) -> Iterator[Hyperbowtie]:
    _check_feasible(2, FLIP, d + 1, n + 1)
    for f in canonical_maps(SIGNS, FLIP, d + 1, n + 1):
        if isinstance(f.patterns[0], Var):
            yield hyperbowtie(f)


@dataclass(frozen=True)
class BijectionReport:
    n: int
    d: int
    hyperbowtie_count: int
    ttt_space_count: int
    bijective: bool
    case_table_agrees: bool


def verify_bijection(n: int, d: int) -> BijectionReport:
    if n > 3 or d > 2 or n < 1 or d < 0:
        raise ValueError("exhaustive check is limited to 1 <= n <= 3, d <= 2")
    spaces = set(enumerate_spaces(4, FLIP, d, n))
    images = []
    table_ok = True
    for hb in iter_hyperbowties(n, d):
        img = frozenset(big_phi(lo, hi) for lo, hi in hb.edges)
        images.append(img)
        table_ok &= materialize(hyperbowtie_to_ttt(hb.source)) == img
    bij = len(set(images)) == len(images) and set(images) == spaces
    return BijectionReport(n, d, len(images), len(spaces), bij, table_ok)


# -- serialization ------------------------------------------------------------------


def pattern_to_json(p: Pattern) -> dict:
    if isinstance(p, Const):
        return {"const": p.value}
    return {"var": p.index, "twist": "pi" if p.twist else "e"}


def pattern_from_json(obj: dict) -> Pattern:
    if "const" in obj:
        return Const(int(obj["const"]))
    twist = obj.get("twist", "e")
    if twist not in ("e", "pi"):
        raise ValueError(f"unknown twist {twist!r}")
    return Var(int(obj["var"]), twist == "pi")


def map_to_json(f: ParameterMap) -> str:
    return json.dumps(
        {
            "alphabet": list(f.alphabet),
            "group": f.group,
            "k": f.k,
            "patterns": [pattern_to_json(p) for p in f.patterns],
        }
    )


def map_from_json(text: str) -> ParameterMap:
    obj = json.loads(text)
    return ParameterMap(
        tuple(obj["alphabet"]), obj["group"], int(obj["k"]), tuple(pattern_from_json(p) for p in obj["patterns"])
    )


def pointset_to_json(pts: PointSet) -> str:
    return json.dumps(sorted(list(p) for p in pts))


def pointset_from_json(text: str) -> PointSet:
    return frozenset(tuple(p) for p in json.loads(text))
