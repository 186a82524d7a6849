"""CNF instance for 2-colorings of parallel edge classes with no monochromatic planar K4.

Variable v (1-based) is the direction of lexicographic rank v - 1; a true
variable means the class is Red.  Each planar K4 {a, b, a+b, a-b} contributes
the pair of clauses "not all Blue" and "not all Red".
"""
from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from .cube import (
    RED,
    Color,
    Edge,
    PlanarK4,
    Vector,
    canonical,
    check_dim,
    direction_from_str,
    direction_index,
    direction_to_str,
    edge_class,
    enumerate_directions,
    enumerate_rectangles,
    make_k4,
    vertices,
)

ClassColoring = Mapping[Vector, Color]
EdgeColoring = Mapping[Edge, Color]


@dataclass(frozen=True)
class CnfFormula:
    var_count: int
    clauses: tuple[tuple[int, ...], ...]
    comments: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        for c in self.clauses:
            if not c:
                raise ValueError("empty clause")
            if any(lit == 0 or abs(lit) > self.var_count for lit in c):
                raise ValueError(f"literal out of range in clause {c}")

    def satisfied_by(self, model: Sequence[bool]) -> bool:
        """model[v - 1] is the value of variable v."""
        return all(any(model[abs(l) - 1] == (l > 0) for l in c) for c in self.clauses)


@dataclass(frozen=True)
class MonoK4Violation:
    k4: PlanarK4
    color: Color


def var_count(n: int) -> int:
    return (3**n - 1) // 2


def distinct_k4s(n: int) -> list[PlanarK4]:
    """Distinct planar K4 class-sets, in order of their first generating rectangle."""
    seen: dict[PlanarK4, None] = {}
    for r in enumerate_rectangles(n):
        seen.setdefault(make_k4(r), None)
    return list(seen)


def build_cnf(n: int) -> CnfFormula:
    check_dim(n, cap=8)
    if n < 2:
        raise ValueError("build_cnf needs n >= 2")
    index = direction_index(n)
    clauses = []
    for k4 in distinct_k4s(n):
        lits = sorted(index[d] + 1 for d in k4)
        clauses.append(tuple(lits))
        clauses.append(tuple(-v for v in lits))
    return CnfFormula(
        var_count(n),
        tuple(clauses),
        comments=(f"no monochromatic planar K4 in parallel-class colorings of {{+-1}}^{n}",),
    )


def emit_dimacs(f: CnfFormula, comments: bool = True) -> str:
    lines = [f"c {c}" for c in f.comments] if comments else []
    lines.append(f"p cnf {f.var_count} {len(f.clauses)}")
    lines.extend(" ".join(map(str, c)) + " 0" for c in f.clauses)
    return "\n".join(lines) + "\n"


def parse_dimacs(text: str) -> CnfFormula:
    header = None
    clauses: list[tuple[int, ...]] = []
    comments = []
    pending: list[int] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("c"):
            comments.append(line[1:].strip())
            continue
        if line.startswith("p"):
            m = re.fullmatch(r"p\s+cnf\s+(\d+)\s+(\d+)", line)
            if m is None or header is not None:
                raise ValueError(f"line {lineno}: bad problem line {line!r}")
            header = int(m.group(1)), int(m.group(2))
            continue
        if header is None:
            raise ValueError(f"line {lineno}: clause before problem line")
        try:
            lits = [int(tok) for tok in line.split()]
        except ValueError:
            raise ValueError(f"line {lineno}: non-integer literal") from None
        for lit in lits:
            if lit == 0:
                clauses.append(tuple(pending))
                pending = []
            else:
                pending.append(lit)
    if header is None:
        raise ValueError("missing problem line")
    if pending:
        raise ValueError("last clause is not terminated by 0")
    if len(clauses) != header[1]:
        raise ValueError(f"header announces {header[1]} clauses, found {len(clauses)}")
    return CnfFormula(header[0], tuple(clauses), tuple(comments))


def decode_witness(model: Sequence[bool], n: int) -> dict[Vector, Color]:
    """Class coloring from a model; extra (auxiliary) variables are ignored."""
    dirs = enumerate_directions(n)
    if len(model) < len(dirs):
        raise ValueError(f"model covers {len(model)} variables, need {len(dirs)}")
    return {d: Color.from_bool(bool(model[i])) for i, d in enumerate(dirs)}


def encode_coloring(c: ClassColoring, n: int) -> list[bool]:
    _check_total(c, n)
    return [c[d] is RED for d in enumerate_directions(n)]


def _check_total(c: ClassColoring, n: int) -> None:
    missing = [d for d in enumerate_directions(n) if d not in c]
    if missing:
        raise ValueError(f"coloring is partial: {len(missing)} classes uncolored, e.g. {missing[0]}")


def verify_class_coloring(c: ClassColoring, n: int) -> list[MonoK4Violation]:
    """Every monochromatic planar K4, found by direct enumeration of rectangles."""
    _check_total(c, n)
    found: dict[PlanarK4, Color] = {}
    for r in enumerate_rectangles(n):
        k4 = make_k4(r)
        colors = {c[d] for d in k4}
        if len(colors) == 1:
            found.setdefault(k4, colors.pop())
    return [MonoK4Violation(k4, col) for k4, col in found.items()]


def expand_to_edge_coloring(c: ClassColoring, n: int) -> Callable[[Sequence[int], Sequence[int]], Color]:
    """Edge coloring giving every concrete edge the color of its class (lazy)."""
    _check_total(c, n)

    def color(u, v):
        return c[edge_class(u, v)]

    return color


def materialize_edge_coloring(c: ClassColoring, n: int) -> dict[Edge, Color]:
    check_dim(n, cap=6)
    _check_total(c, n)
    pts = list(vertices(n))
    return {(u, v): c[edge_class(u, v)] for u, v in itertools.combinations(pts, 2)}


def vertex_level_mono_k4s(ec: Callable | EdgeColoring, n: int) -> int:
    """Count monochromatic planar K4s of a concrete edge coloring, point by point.

    Independent of the class-level path: a 4-set of vertices {x, x^A, x^B, x^AB}
    with A, B disjoint nonempty coordinate sets is a planar K4.
    """
    check_dim(n, cap=6)
    color = ec if callable(ec) else (lambda u, v: ec[(u, v) if u < v else (v, u)])
    pts = list(vertices(n))
    seen = set()
    count = 0
    for x in pts:
        for la in range(1, 1 << n):
            for lb in range(la + 1, 1 << n):
                if la & lb:
                    continue
                quad = frozenset((x, _flipmask(x, la), _flipmask(x, lb), _flipmask(x, la | lb)))
                if quad in seen:
                    continue
                seen.add(quad)
                cols = {color(p, q) for p, q in itertools.combinations(sorted(quad), 2)}
                count += len(cols) == 1
    return count


def _flipmask(x, mask):
    return tuple(-v if mask >> i & 1 else v for i, v in enumerate(x))


def witness_to_json(c: ClassColoring, n: int) -> str:
    _check_total(c, n)
    doc = {"n": n, "classes": {direction_to_str(d): c[d].value for d in enumerate_directions(n)}}
    return json.dumps(doc, indent=1, sort_keys=False) + "\n"


def witness_from_json(text: str) -> tuple[int, dict[Vector, Color]]:
    doc = json.loads(text)
    if not isinstance(doc, dict) or "n" not in doc or "classes" not in doc:
        raise ValueError("witness JSON needs 'n' and 'classes'")
    n = doc["n"]
    check_dim(n, cap=8)
    out = {}
    for key, val in doc["classes"].items():
        d = direction_from_str(key)
        if len(d) != n:
            raise ValueError(f"direction {key!r} does not have dimension {n}")
        out[d] = Color(val)
    return n, out


# -- symmetry breaking -------------------------------------------------------
#
# Coordinate permutations and sign flips act on directions and map planar K4s
# to planar K4s; swapping the two colors is a further symmetry.  Ordering the
# variables by (support size, then a fixed tie-break) and demanding that the
# assignment be lexicographically no larger (False < True) than its image
# under each generator keeps the lexicographic minimum of every orbit, so the
# augmented formula is satisfiable exactly when the original one is.


def symmetry_order(n: int) -> list[Vector]:
    return sorted(
        enumerate_directions(n),
        key=lambda d: (sum(map(abs, d)), [-abs(x) for x in d], [-x for x in d]),
    )


def _act(perm: Sequence[int], signs: Sequence[int], d: Vector) -> Vector:
    return canonical(tuple(signs[i] * d[perm[i]] for i in range(len(d))))


def symmetry_generators(n: int) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Adjacent transpositions and single sign flips, as (perm, signs) pairs."""
    ident = tuple(range(n))
    gens = []
    for i in range(n - 1):
        p = list(ident)
        p[i], p[i + 1] = p[i + 1], p[i]
        gens.append((tuple(p), (1,) * n))
    for j in range(n):
        s = [1] * n
        s[j] = -1
        gens.append((ident, tuple(s)))
    return gens


def symmetry_breaking_clauses(n: int, first_aux: int) -> tuple[list[tuple[int, ...]], int]:
    """Lex-leader clauses for the generators plus color swap.

    Auxiliary variables are numbered from first_aux; returns (clauses, last
    variable used).
    """
    index = direction_index(n)
    order = symmetry_order(n)
    clauses: list[tuple[int, ...]] = [(-(index[order[0]] + 1),)]
    top = first_aux - 1
    for perm, signs in symmetry_generators(n):
        eq = None  # variable meaning "equal on every earlier position"
        for d in order:
            x = index[d] + 1
            y = index[_act(perm, signs, d)] + 1
            if x == y:
                continue
            top += 1
            nxt = top
            if eq is None:
                clauses += [(-x, y), (-x, nxt), (y, nxt)]
            else:
                clauses += [(-eq, -x, y), (-eq, -x, nxt), (-eq, y, nxt)]
            eq = nxt
    return clauses, top


def with_symmetry_breaking(f: CnfFormula, n: int) -> CnfFormula:
    if f.var_count != var_count(n):
        raise ValueError("formula does not match dimension n")
    extra, top = symmetry_breaking_clauses(n, f.var_count + 1)
    return CnfFormula(
        top,
        f.clauses + tuple(extra),
        comments=f.comments + ("lex-leader symmetry breaking (coordinate permutations, sign flips, color swap)",),
    )


def lex_leader_holds(model: Sequence[bool], n: int) -> bool:
    """Whether a class assignment satisfies every lex-leader constraint directly."""
    index = direction_index(n)
    order = symmetry_order(n)
    pos = [index[d] for d in order]
    if model[pos[0]]:
        return False
    for perm, signs in symmetry_generators(n):
        img = [index[_act(perm, signs, d)] for d in order]
        a = [model[i] for i in pos]
        b = [model[i] for i in img]
        if a > b:
            return False
    return True
