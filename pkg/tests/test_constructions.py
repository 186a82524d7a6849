import itertools
import json
import random

import pytest

from graham_bounds.constructions import (
    ContractViolation,
    MonoK4Certificate,
    extract_ttt_space,
    find_folkman_directions,
    find_mono_subcube,
    folkman_branches,
    folkman_case_analysis,
    has_max_determined_sums,
    is_planar_k4,
    iter_mono_subcubes,
    lift_coloring,
    lift_induced_k4,
    random_reduction_coloring,
    reduce_to_class_coloring,
    subcube_is_mono,
    table_coloring,
    verify_class_certificate,
    verify_point_certificate,
)
from graham_bounds.cube import (
    BLUE,
    RED,
    Rectangle,
    canonical,
    enumerate_directions,
    enumerate_rectangles,
    make_k4,
    sub,
)
from graham_bounds.encode import verify_class_coloring
from graham_bounds.paramsets import FLIP, SIGNS, Var, all_maps, materialize


def _random_c4(rng, n):
    return {p: rng.choice((RED, BLUE)) for p in itertools.product(range(1, 5), repeat=n)}


def _pairs(n):
    return itertools.combinations(itertools.product((-1, 1), repeat=n), 2)


# -- lift --------------------------------------------------------------------------


def test_lift_examples():
    c4 = {(1,): RED, (2,): RED, (3,): BLUE, (4,): BLUE}
    ec = lift_coloring(c4)
    assert ec((-1, -1), (1, 1)) is RED
    assert ec((1, -1), (1, 1)) is RED
    assert ec((1, 1), (1, -1)) is RED
    assert all(lift_coloring(lambda p: RED)(u, v) is RED for u, v in _pairs(4))


@pytest.mark.parametrize("seed", range(5))
def test_lift_is_symmetric(seed):
    ec = lift_coloring(_random_c4(random.Random(seed), 3))
    for u, v in _pairs(4):
        assert ec(u, v) is ec(v, u)


def test_lift_crossing_edges_cover_c4():
    # the crossing edges are in bijection with [4]^n, so every color of c4 is used once
    rng = random.Random(2)
    c4 = _random_c4(rng, 2)
    ec = lift_coloring(c4)
    crossing = [(u, v) for u, v in _pairs(3) if u[0] != v[0]]
    assert len(crossing) == 16
    assert sorted(ec(u, v).value for u, v in crossing) == sorted(c.value for c in c4.values())


# -- subcubes ----------------------------------------------------------------------


def test_find_mono_subcube_examples():
    ec = lambda u, v: RED  # noqa: E731
    f = find_mono_subcube(ec, 2, 2)
    assert materialize(f) == set(itertools.product(SIGNS, repeat=2))
    red_edge = frozenset(((-1, -1), (1, 1)))
    ec = lambda u, v: RED if frozenset((u, v)) == red_edge else BLUE  # noqa: E731
    f = find_mono_subcube(ec, 2, 1)
    pts = materialize(f)
    assert len(pts) == 2 and frozenset(pts) != red_edge
    with pytest.raises(ValueError):
        find_mono_subcube(ec, 7, 2)
    with pytest.raises(ValueError):
        find_mono_subcube(ec, 3, 4)


@pytest.mark.parametrize("seed", range(8))
def test_mono_subcubes_against_brute_force(seed):
    rng = random.Random(seed)
    n, d = 3, 2
    table = {frozenset(e): rng.choice((RED, BLUE)) for e in _pairs(n)}
    ec = lambda u, v: table[frozenset((u, v))]  # noqa: E731
    brute = set()
    for f in all_maps(SIGNS, FLIP, d, n):
        pts = materialize(f)
        if len({ec(p, q) for p, q in itertools.combinations(sorted(pts), 2)}) == 1:
            brute.add(pts)
    got = [materialize(f) for f, _ in iter_mono_subcubes(ec, n, d)]
    assert len(got) == len(set(got))
    assert set(got) == brute
    first = find_mono_subcube(ec, n, d)
    assert (first is None) == (not brute)


# -- extraction --------------------------------------------------------------------


def test_extract_crossing_constant():
    f = next(f for f, _ in iter_mono_subcubes(lift_coloring(lambda p: BLUE), 3, 2) if isinstance(f.patterns[0], Var))
    ex = extract_ttt_space(f, lambda p: BLUE)
    assert ex.crossing and ex.color is BLUE and len(ex.points) == 4


def _contained_example():
    for seed in range(500):
        c4 = _random_c4(random.Random(seed), 2)
        for f, _ in iter_mono_subcubes(lift_coloring(c4), 3, 2):
            if not isinstance(f.patterns[0], Var):
                return c4, f
    raise AssertionError("no contained subcube found")


def test_extract_contained_case():
    c4, f = _contained_example()
    assert all(p[0] == f.patterns[0].value for p in materialize(f))
    ex = extract_ttt_space(f, c4)
    assert not ex.crossing
    assert {c4[z] for z in ex.points} == {ex.color}
    assert ex.points == materialize(ex.space)


def test_extract_rejects_non_mono():
    c4 = {p: RED if p == (1, 1) else BLUE for p in itertools.product(range(1, 5), repeat=2)}
    f = next(f for f in all_maps(SIGNS, FLIP, 2, 3) if subcube_is_mono(lift_coloring(c4), materialize(f)) is None)
    with pytest.raises(ContractViolation):
        extract_ttt_space(f, c4)


def test_extract_all_subcubes_random():
    rng = random.Random(40)
    kinds = set()
    for _ in range(60):
        c4 = _random_c4(rng, 2)
        for f, col in iter_mono_subcubes(lift_coloring(c4), 3, 2):
            ex = extract_ttt_space(f, c4)
            assert ex.color is col
            assert {c4[z] for z in ex.points} == {col}
            kinds.add(ex.crossing)
    assert kinds == {True, False}


# -- certificates ------------------------------------------------------------------


def test_is_planar_k4():
    assert is_planar_k4([(-1, -1), (1, -1), (-1, 1), (1, 1)])
    assert is_planar_k4([(1, 1, 1), (-1, 1, -1), (1, -1, 1), (-1, -1, -1)])
    assert not is_planar_k4([(1, 1, 1), (-1, 1, 1), (1, -1, 1), (1, 1, -1)])
    assert not is_planar_k4([(1, 1), (1, 1), (-1, 1), (1, -1)])


def test_certificate_json_and_class_check():
    r = Rectangle((1, 0), (0, 1))
    cert = MonoK4Certificate(RED, rectangle=r, classes=make_k4(r))
    assert verify_class_certificate(cert, lambda d: RED)
    assert not verify_class_certificate(cert, lambda d: BLUE if d == (1, -1) else RED)
    doc = json.loads(cert.to_json())
    assert doc["color"] == "R" and sorted(doc["classes"]) == doc["classes"] and len(doc["classes"]) == 4


# -- reduction ---------------------------------------------------------------------


def _layered(d, top, bottom, mid=RED):
    def ec(u, v):
        if u[0] != v[0]:
            return mid
        return top(u, v) if u[0] == 1 else bottom(u, v)

    return ec


def test_reduce_all_blue():
    out = reduce_to_class_coloring(_layered(2, lambda u, v: BLUE, lambda u, v: BLUE), 2)
    assert out.certificate is None and set(out.induced.values()) == {BLUE}
    assert len(out.induced) == 4


def test_reduce_bottom_blue_gives_red():
    out = reduce_to_class_coloring(_layered(2, lambda u, v: RED, lambda u, v: BLUE), 2)
    assert set(out.induced.values()) == {RED}


def test_reduce_direct_certificate():
    ec = _layered(2, lambda u, v: RED, lambda u, v: RED)
    out = reduce_to_class_coloring(ec, 2)
    cert = out.certificate
    assert cert is not None and cert.color is RED
    assert len(cert.edges) == 6 and all(c is RED for *_, c in cert.edges)
    assert verify_point_certificate(cert, ec)


def test_reduce_swaps_blue_middle():
    ec = _layered(2, lambda u, v: BLUE, lambda u, v: BLUE, mid=BLUE)
    out = reduce_to_class_coloring(ec, 2)
    assert out.certificate.color is BLUE and verify_point_certificate(out.certificate, ec)


def test_reduce_rejects_mixed_middle():
    def ec(u, v):
        if u[0] != v[0]:
            return RED if u[1] == v[1] else BLUE
        return BLUE

    with pytest.raises(ContractViolation):
        reduce_to_class_coloring(ec, 2)


def _check_reduction(ec, d):
    out = reduce_to_class_coloring(ec, d)
    if out.certificate is not None:
        assert verify_point_certificate(out.certificate, ec)
        return "direct"
    for v in verify_class_coloring(out.induced, d):
        r = next(r for r in enumerate_rectangles(d) if make_k4(r) == v.k4)
        cert = lift_induced_k4(ec, out, r)
        assert cert.color is out.middle.swap()
        assert verify_point_certificate(cert, ec)
    return "induced"


@pytest.mark.parametrize("d", [1, 2, 3])
def test_reduction_property(d):
    rng = random.Random(d)
    seen = {_check_reduction(table_coloring(random_reduction_coloring(d, rng)), d) for _ in range(40)}
    assert seen == {"direct", "induced"}


def test_lifted_k4_exercised():
    # all-Blue top forces an induced coloring that is entirely Blue, hence full of mono K4s
    ec = _layered(3, lambda u, v: BLUE, lambda u, v: RED)
    out = reduce_to_class_coloring(ec, 3)
    bad = verify_class_coloring(out.induced, 3)
    assert len(bad) == 9
    r = next(iter(enumerate_rectangles(3)))
    cert = lift_induced_k4(ec, out, r)
    assert all(p[0] == 1 for p in cert.points)
    assert cert.color is BLUE and verify_point_certificate(cert, ec)


# -- four-direction case analysis -------------------------------------------------

A, B, C, D = (1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)


def _branch_set():
    amb, cmd = sub(A, B), sub(C, D)
    return [canonical(x) for x in (amb, cmd, sub(amb, tuple(-x for x in cmd)), sub(amb, cmd))]


def test_folkman_examples():
    cert = folkman_case_analysis(A, B, C, D, lambda x: RED)
    assert cert.color is RED and cert.classes == make_k4(Rectangle(A, B))
    blue = set(_branch_set())
    cert = folkman_case_analysis(A, B, C, D, lambda x: BLUE if x in blue else RED)
    assert cert.color is BLUE and cert.classes == blue
    amb = canonical(sub(A, B))
    cert = folkman_case_analysis(A, B, C, D, lambda x: BLUE if x == amb else RED)
    assert cert.color is RED and cert.classes == make_k4(Rectangle(C, D))


def test_folkman_exhaustive():
    branches = _branch_set()
    assert len(set(branches)) == 4
    rects = folkman_branches(A, B, C, D)
    for bits in itertools.product((RED, BLUE), repeat=4):
        colors = dict(zip(branches, bits))
        oracle = lambda x: colors.get(x, RED)  # noqa: E731
        cert = folkman_case_analysis(A, B, C, D, oracle)
        assert verify_class_certificate(cert, oracle)
        # first branch whose decider is Red wins, else the all-Blue branch set
        k = next((i for i, c in enumerate(bits) if c is RED), 4)
        assert cert.classes == make_k4(rects[k])
        assert cert.color is (RED if k < 4 else BLUE)


def test_folkman_blue_sums():
    # the analysis is symmetric in the two colors
    cert = folkman_case_analysis(A, B, C, D, lambda x: BLUE)
    assert cert.color is BLUE


def test_folkman_preconditions():
    with pytest.raises(ContractViolation):
        folkman_case_analysis(A, (1, 1, 0, 0), C, D, lambda x: RED)
    with pytest.raises(ContractViolation):
        folkman_case_analysis(A, B, C, D, lambda x: BLUE if x == (1, 1, 1, 1) else RED)


def _brute_first_pair(cl, n):
    masks = range(1, 1 << n)
    vec = lambda m: tuple((m >> i) & 1 for i in range(n))  # noqa: E731
    for m1 in masks:
        for m2 in masks:
            if not m1 & m2 and has_max_determined_sums([vec(m1), vec(m2)], cl):
                return vec(m1), vec(m2)
    return None


def test_find_folkman_examples():
    dirs = find_folkman_directions(lambda x: RED, 4, 4)
    assert dirs == (A, B, C, D)
    assert find_folkman_directions(lambda x: BLUE, 1, 3) == ((1, 0, 0),)
    with pytest.raises(ValueError):
        find_folkman_directions(lambda x: RED, 5, 6)
    with pytest.raises(ValueError):
        find_folkman_directions(lambda x: RED, 2, 13)


def test_find_folkman_crafted_n4():
    # colour by parity of the support size, then flip the all-ones direction
    def cl(x):
        if x == (1, 1, 1, 1):
            return BLUE
        return RED if sum(x) % 2 else BLUE

    got = find_folkman_directions(cl, 2, 4)
    assert got == _brute_first_pair(cl, 4)
    assert got is not None and has_max_determined_sums(got, cl)


@pytest.mark.parametrize("seed", range(10))
def test_find_folkman_random_n4(seed):
    rng = random.Random(seed)
    table = {d: rng.choice((RED, BLUE)) for d in enumerate_directions(4)}
    got = find_folkman_directions(table, 2, 4)
    assert got == _brute_first_pair(table, 4)
