import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from graham_bounds.cube import (
    BLUE,
    RED,
    enumerate_directions,
    enumerate_rectangles,
    make_k4,
)
from graham_bounds.encode import (
    CnfFormula,
    _act,
    build_cnf,
    decode_witness,
    distinct_k4s,
    emit_dimacs,
    encode_coloring,
    expand_to_edge_coloring,
    lex_leader_holds,
    materialize_edge_coloring,
    parse_dimacs,
    symmetry_generators,
    var_count,
    verify_class_coloring,
    vertex_level_mono_k4s,
    with_symmetry_breaking,
    witness_from_json,
    witness_to_json,
)
from graham_bounds.solver import UNSAT, solve


def _oracle_k4_count(n):
    return len({make_k4(r) for r in enumerate_rectangles(n)})


@pytest.mark.parametrize("n", range(2, 7))
def test_cnf_shape(n):
    f = build_cnf(n)
    assert f.var_count == var_count(n) == (3**n - 1) // 2
    assert len(f.clauses) == 2 * _oracle_k4_count(n)
    for pos, neg in zip(f.clauses[::2], f.clauses[1::2]):
        assert len(pos) == 4 and all(v > 0 for v in pos)
        assert neg == tuple(-v for v in pos)


def test_no_two_rectangles_share_a_k4():
    for n in range(2, 7):
        assert len(distinct_k4s(n)) == len(list(enumerate_rectangles(n)))


def test_small_instances():
    f = build_cnf(2)
    assert (f.var_count, len(f.clauses)) == (4, 2)
    assert emit_dimacs(f, comments=False) == "p cnf 4 2\n1 2 3 4 0\n-1 -2 -3 -4 0\n"
    assert emit_dimacs(CnfFormula(1, ((1,),))) == "p cnf 1 1\n1 0\n"
    assert build_cnf(6).var_count == 364
    with pytest.raises(ValueError):
        build_cnf(1)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_dimacs_roundtrip(n):
    f = build_cnf(n)
    text = emit_dimacs(f)
    g = parse_dimacs(text)
    assert g == f
    assert emit_dimacs(g) == text


clause_lists = st.integers(1, 8).flatmap(
    lambda v: st.tuples(
        st.just(v),
        st.lists(
            st.lists(st.integers(1, v).flatmap(lambda x: st.sampled_from((x, -x))), min_size=1, max_size=5).map(tuple),
            max_size=12,
        ),
    )
)


@given(clause_lists)
def test_dimacs_roundtrip_random(vc):
    v, clauses = vc
    f = CnfFormula(v, tuple(clauses))
    assert parse_dimacs(emit_dimacs(f)) == f


@pytest.mark.parametrize(
    "text",
    ["1 2 0\n", "p cnf 2 2\n1 2 0\n", "p cnf 2 1\n1 x 0\n", "p cnf 2 1\n1 2\n", "p cnf 2 1\n1 3 0\n", "p dnf 1 1\n1 0\n"],
)
def test_dimacs_errors(text):
    with pytest.raises(ValueError):
        parse_dimacs(text)


def test_decode_and_verify_examples():
    assert set(decode_witness([True] * 4, 2).values()) == {RED}
    assert set(decode_witness([False] * 4, 2).values()) == {BLUE}
    c = {(1, 0): RED, (0, 1): RED, (1, 1): RED, (1, -1): BLUE}
    assert verify_class_coloring(c, 2) == []
    bad = verify_class_coloring({d: RED for d in enumerate_directions(2)}, 2)
    assert len(bad) == 1 and bad[0].k4 == {(1, 0), (0, 1), (1, 1), (1, -1)} and bad[0].color is RED
    with pytest.raises(ValueError):
        verify_class_coloring({(1, 0): RED}, 2)
    with pytest.raises(ValueError):
        decode_witness([True] * 3, 2)


def test_cnf_agrees_with_direct_check_exhaustive_n2_n3():
    for n in (2, 3):
        f = build_cnf(n)
        dirs = enumerate_directions(n)
        for bits in itertools.product((False, True), repeat=len(dirs)):
            c = decode_witness(bits, n)
            assert f.satisfied_by(bits) == (not verify_class_coloring(c, n))


@pytest.mark.parametrize("n", [4, 5])
def test_cnf_agrees_with_direct_check_random(n):
    rng = random.Random(n)
    f = build_cnf(n)
    for _ in range(200):
        model = [rng.random() < 0.5 for _ in range(var_count(n))]
        c = decode_witness(model, n)
        assert f.satisfied_by(model) == (not verify_class_coloring(c, n))
        assert encode_coloring(c, n) == model


def test_edge_expansion_n2():
    ec = materialize_edge_coloring({d: RED for d in enumerate_directions(2)}, 2)
    assert len(ec) == 6 and set(ec.values()) == {RED}


@pytest.mark.parametrize("n", [3, 4])
def test_vertex_level_count_matches_class_level(n):
    rng = random.Random(3 * n)
    dirs = enumerate_directions(n)
    for _ in range(10):
        c = {d: rng.choice((RED, BLUE)) for d in dirs}
        ec = expand_to_edge_coloring(c, n)
        classes = len(verify_class_coloring(c, n))
        # each class-level K4 {a,b,a+b,a-b} appears at 2^(n - |supp a| - |supp b|) base points
        per = sum(
            2 ** (n - sum(map(abs, r.a)) - sum(map(abs, r.b)))
            for r in enumerate_rectangles(n)
            if len({c[x] for x in make_k4(r)}) == 1
        )
        assert vertex_level_mono_k4s(ec, n) == per
        assert (per == 0) == (classes == 0)


def test_parallel_edges_share_color():
    rng = random.Random(0)
    n = 4
    for _ in range(100):
        c = {d: rng.choice((RED, BLUE)) for d in enumerate_directions(n)}
        ec = expand_to_edge_coloring(c, n)
        u, v = rng.sample(list(itertools.product((-1, 1), repeat=n)), 2)
        flip = [i for i in range(n) if u[i] != v[i]]
        # translate the edge by flipping a coordinate outside its support
        free = [i for i in range(n) if i not in flip]
        if free:
            i = rng.choice(free)
            u2 = tuple(-x if j == i else x for j, x in enumerate(u))
            v2 = tuple(-x if j == i else x for j, x in enumerate(v))
            assert ec(u, v) is ec(u2, v2)


def test_witness_json_roundtrip():
    rng = random.Random(1)
    c = {d: rng.choice((RED, BLUE)) for d in enumerate_directions(3)}
    n, back = witness_from_json(witness_to_json(c, 3))
    assert n == 3 and back == c
    with pytest.raises(ValueError):
        witness_from_json('{"n": 2, "classes": {"+0-": "R"}}')
    with pytest.raises(ValueError):
        witness_from_json('{"classes": {}}')


# -- symmetry breaking -------------------------------------------------------


def _orbit(model, n):
    """All images of a class assignment under coordinate permutations, sign flips and color swap."""
    dirs = enumerate_directions(n)
    index = {d: i for i, d in enumerate(dirs)}
    out = set()
    for perm in itertools.permutations(range(n)):
        for signs in itertools.product((1, -1), repeat=n):
            img = [None] * len(dirs)
            for d in dirs:
                img[index[_act(perm, signs, d)]] = model[index[d]]
            out.add(tuple(img))
            out.add(tuple(not x for x in img))
    return out


def test_symmetries_preserve_the_formula():
    n = 4
    f = build_cnf(n)
    clause_sets = {frozenset(c) for c in f.clauses}
    dirs = enumerate_directions(n)
    index = {d: i + 1 for i, d in enumerate(dirs)}
    for perm, signs in symmetry_generators(n):
        mapped = set()
        for c in f.clauses:
            s = 1 if c[0] > 0 else -1
            mapped.add(frozenset(s * index[_act(perm, signs, dirs[abs(v) - 1])] for v in c))
        assert mapped == clause_sets


def test_lex_leader_keeps_one_member_of_every_orbit_n3():
    n = 3
    f = build_cnf(n)
    models = [bits for bits in itertools.product((False, True), repeat=var_count(n)) if f.satisfied_by(bits)]
    assert models
    for m in models:
        assert any(lex_leader_holds(g, n) for g in _orbit(m, n))


def test_breaking_clauses_encode_lex_leader():
    n = 3
    g = with_symmetry_breaking(build_cnf(n), n)
    rng = random.Random(7)
    for _ in range(40):
        model = [rng.random() < 0.5 for _ in range(var_count(n))]
        fixed = CnfFormula(g.var_count, g.clauses[len(build_cnf(n).clauses):] + tuple((v + 1 if b else -(v + 1),) for v, b in enumerate(model)))
        res = solve(fixed)
        assert (res.status != UNSAT) == lex_leader_holds(model, n)
