import itertools
import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from graham_bounds.cube import (
    BLUE,
    RED,
    Color,
    canonical,
    direction_from_str,
    direction_to_str,
    disjoint_support,
    edge_class,
    edges_in_class,
    enumerate_directions,
    enumerate_rectangles,
    is_direction,
    k4_base_vertices,
    k4_vertices,
    make_k4,
    rectangle,
    step,
    vertex_from_str,
    vertex_to_str,
    vertices,
)

raw_vectors = st.integers(1, 7).flatmap(
    lambda n: st.lists(st.sampled_from((-1, 0, 1)), min_size=n, max_size=n).filter(any)
)


def test_canonical_examples():
    assert canonical((-1, 0, 1)) == (1, 0, -1)
    assert canonical((0, 1, 1)) == (0, 1, 1)
    assert canonical((-1, -1)) == (1, 1)
    with pytest.raises(ValueError):
        canonical((0, 0))


@given(raw_vectors)
def test_canonical_is_sign_invariant(v):
    neg = [-x for x in v]
    assert canonical(v) == canonical(neg)
    assert is_direction(v) != is_direction(neg)


@pytest.mark.parametrize("n", range(1, 9))
def test_direction_count(n):
    dirs = enumerate_directions(n)
    assert len(dirs) == (3**n - 1) // 2
    assert list(dirs) == sorted(dirs)


def test_direction_examples():
    assert enumerate_directions(1) == ((1,),)
    assert len(enumerate_directions(2)) == 4
    assert len(enumerate_directions(6)) == 364
    with pytest.raises(ValueError):
        enumerate_directions(0)


def test_disjoint_support():
    assert disjoint_support((1, 0), (0, 1))
    assert not disjoint_support((1, 1), (0, 1))
    assert disjoint_support((1, 0, -1), (0, 1, 0))
    with pytest.raises(ValueError):
        disjoint_support((1, 0), (0, 1, 0))


def test_make_k4_examples():
    assert make_k4(((1, 0), (0, 1))) == {(1, 0), (0, 1), (1, 1), (1, -1)}
    k = make_k4(((1, 0, 0), (0, 1, 1)))
    assert k == {(1, 0, 0), (0, 1, 1), (1, 1, 1), (1, -1, -1)}
    assert k == make_k4(((0, 1, 1), (1, 0, 0)))
    with pytest.raises(ValueError):
        make_k4(((1, 1), (0, 1)))
    with pytest.raises(ValueError):
        rectangle((1, 1), (1, 0))


def _brute_k4_sets(n):
    """Every pair of nonzero raw vectors with disjoint supports, deduped as class sets."""
    vecs = [v for v in itertools.product((-1, 0, 1), repeat=n) if any(v)]
    out = set()
    for a in vecs:
        for b in vecs:
            if all(not (x and y) for x, y in zip(a, b)):
                s = [tuple(x + y for x, y in zip(a, b)), tuple(x - y for x, y in zip(a, b)), a, b]
                out.add(frozenset(canonical(v) for v in s))
    return out


@pytest.mark.parametrize("n,count", [(1, 0), (2, 1), (3, 9), (4, 58), (5, 330)])
def test_rectangle_counts(n, count):
    rects = list(enumerate_rectangles(n))
    assert len(rects) == count == (5**n - 2 * 3**n + 1) // 8
    assert {make_k4(r) for r in rects} == _brute_k4_sets(n)


def test_edges_in_class_examples():
    assert edges_in_class((1, 1), 2) == [((-1, -1), (1, 1))]
    assert len(edges_in_class((1, 0), 2)) == 2


@pytest.mark.parametrize("n", range(1, 7))
def test_edge_classes_partition_complete_graph(n):
    seen = []
    for a in enumerate_directions(n):
        es = edges_in_class(a, n)
        assert len(es) == 2 ** (n - sum(map(abs, a)))
        assert all(edge_class(u, v) == a for u, v in es)
        seen += es
    assert len(seen) == len(set(seen)) == 2 ** (n - 1) * (2**n - 1)


def test_step_convention():
    assert step((-1, 1), (1, 0)) == (1, 1)
    assert step((1, 1), (1, 0)) is None
    assert step((-1, 1), (1, -1)) == (1, -1)


def test_k4_vertices_square():
    pts, edges = k4_vertices(((1, 0), (0, 1)), (-1, -1))
    assert set(pts) == set(vertices(2))
    assert {c for _, c in edges} == {(1, 0), (0, 1), (1, 1), (1, -1)}
    with pytest.raises(ValueError):
        k4_vertices(((1, 0), (0, 1)), (1, 1))


def _check_k4_instance(r, x):
    pts, edges = k4_vertices(r, x)
    a, b = r
    mult = {}
    for _, c in edges:
        mult[c] = mult.get(c, 0) + 1
    ca, cb = canonical(a), canonical(b)
    plus = canonical(tuple(p + q for p, q in zip(a, b)))
    minus = canonical(tuple(p - q for p, q in zip(a, b)))
    assert mult == {ca: 2, cb: 2, plus: 1, minus: 1}
    assert set(mult) == make_k4(r)
    # coplanar: the difference vectors span a plane
    diffs = np.array([np.subtract(p, pts[0]) for p in pts[1:]])
    assert np.linalg.matrix_rank(diffs) == 2


def test_k4_vertices_random_n5():
    rng = random.Random(5)
    rects = list(enumerate_rectangles(5))
    for _ in range(100):
        r = rng.choice(rects)
        x = rng.choice(list(k4_base_vertices(r, 5)))
        _check_k4_instance(r, x)


def test_k4_vertices_exhaustive_n4():
    for r in enumerate_rectangles(4):
        for x in k4_base_vertices(r, 4):
            _check_k4_instance(r, x)


@given(raw_vectors)
def test_direction_string_roundtrip(v):
    d = canonical(v)
    assert direction_from_str(direction_to_str(d)) == d


@given(st.lists(st.sampled_from((-1, 1)), min_size=1, max_size=10))
def test_vertex_string_roundtrip(x):
    assert vertex_from_str(vertex_to_str(x)) == tuple(x)


def test_bad_strings():
    with pytest.raises(ValueError):
        direction_from_str("-+")
    with pytest.raises(ValueError):
        direction_from_str("0x")
    with pytest.raises(ValueError):
        vertex_from_str("+0")


def test_color_swap():
    assert RED.swap() is BLUE and BLUE.swap() is RED
    assert Color.from_bool(True) is RED
