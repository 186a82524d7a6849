import itertools
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graham_bounds.encode import (
    CnfFormula,
    build_cnf,
    decode_witness,
    emit_dimacs,
    verify_class_coloring,
)
from graham_bounds.solver import (
    DEFAULT_CONFIGS,
    SAT,
    UNSAT,
    ConflictLimitReached,
    ExternalOutputError,
    ExternalProcessError,
    ModelVerificationError,
    SolverConfig,
    SolveResult,
    cross_check,
    format_competition_output,
    instance,
    luby,
    parse_competition_output,
    solve,
    solve_external,
)


def _brute_sat(f):
    return any(f.satisfied_by(bits) for bits in itertools.product((False, True), repeat=f.var_count))


def test_luby_prefix():
    assert [luby(i) for i in range(15)] == [1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]


def test_trivial():
    assert solve(CnfFormula(1, ((1,), (-1,)))).status == UNSAT
    r = solve(CnfFormula(2, ((1, 2), (-1,))))
    assert r.status == SAT and r.model == (False, True)
    assert solve(CnfFormula(3, ())).status == SAT
    with pytest.raises(ValueError):
        CnfFormula(1, ((),))


def test_bad_config():
    with pytest.raises(ValueError):
        SolverConfig(heuristic="random")
    with pytest.raises(ValueError):
        SolverConfig(restart="never")
    with pytest.raises(ValueError):
        SolveResult(SAT, None)


@pytest.mark.parametrize("cfg", DEFAULT_CONFIGS)
@pytest.mark.parametrize("n", [2, 3, 4, 5])
@pytest.mark.parametrize("sb", [True, False])
def test_small_cubes_are_sat(n, cfg, sb):
    r = solve(instance(n, sb), cfg)
    assert r.status == SAT
    assert verify_class_coloring(decode_witness(r.model, n), n) == []


def test_deterministic():
    f = instance(4)
    for cfg in DEFAULT_CONFIGS:
        a, b = solve(f, cfg), solve(f, cfg)
        assert a.model == b.model and a.stats.conflicts == b.stats.conflicts


def test_conflict_limit():
    # pigeonhole 5 -> 4 needs many conflicts
    p, h = 5, 4
    var = lambda i, j: i * h + j + 1  # noqa: E731
    clauses = [tuple(var(i, j) for j in range(h)) for i in range(p)]
    clauses += [(-var(i, j), -var(k, j)) for j in range(h) for i in range(p) for k in range(i + 1, p)]
    f = CnfFormula(p * h, tuple(clauses))
    with pytest.raises(ConflictLimitReached):
        solve(f, SolverConfig(max_conflicts=5))
    assert solve(f).status == UNSAT


cnfs = st.integers(1, 7).flatmap(
    lambda v: st.lists(
        st.lists(st.integers(1, v).flatmap(lambda x: st.sampled_from((x, -x))), min_size=1, max_size=3).map(tuple),
        max_size=30,
    ).map(lambda cs: CnfFormula(v, tuple(cs)))
)


@settings(max_examples=200, deadline=None)
@given(cnfs, st.sampled_from(DEFAULT_CONFIGS))
def test_random_cnf_against_brute_force(f, cfg):
    r = solve(f, cfg)
    assert (r.status == SAT) == _brute_sat(f)
    if r.status == SAT:
        assert f.satisfied_by(r.model)


def test_competition_roundtrip():
    r = solve(build_cnf(3))
    status, model = parse_competition_output(format_competition_output(r), 13)
    assert status == SAT and model == r.model
    assert parse_competition_output("c hi\ns UNSATISFIABLE\n", 5) == (UNSAT, None)


@pytest.mark.parametrize(
    "text",
    ["", "s MAYBE\n", "s SATISFIABLE\nv 1 2\n", "s SATISFIABLE\nv 1 x 0\n", "s SATISFIABLE\nv 9 0\n"],
)
def test_competition_parse_errors(text):
    with pytest.raises(ExternalOutputError):
        parse_competition_output(text, 3)


def _script(tmp_path, body):
    p = tmp_path / "fake.py"
    p.write_text(body)
    return f"{sys.executable} {p} {{file}}"


@pytest.fixture
def cnf_file(tmp_path):
    p = tmp_path / "cube3.cnf"
    p.write_text(emit_dimacs(build_cnf(3)))
    return p


def test_external_pysat(external_cmd, tmp_path, cnf_file):
    r = solve_external(cnf_file, external_cmd)
    assert r.status == SAT and verify_class_coloring(decode_witness(r.model, 3), 3) == []
    p = tmp_path / "unsat.cnf"
    p.write_text("p cnf 1 2\n1 0\n-1 0\n")
    assert solve_external(p, external_cmd).status == UNSAT


def test_external_failures(tmp_path, cnf_file):
    with pytest.raises(ExternalOutputError):
        solve_external(cnf_file, _script(tmp_path, "print('hello')\n"))
    with pytest.raises(ExternalProcessError):
        solve_external(cnf_file, _script(tmp_path, "import sys; sys.exit(3)\n"))
    with pytest.raises(ExternalProcessError):
        solve_external(cnf_file, "/nonexistent/solver {file}")
    # all-true assignment colors everything red, which has a mono K4
    lying = "print('s SATISFIABLE'); print('v ' + ' '.join(str(i) for i in range(1, 14)) + ' 0'); raise SystemExit(10)\n"
    with pytest.raises(ModelVerificationError):
        solve_external(cnf_file, _script(tmp_path, lying))


def test_cross_check_small(external_cmd):
    rep = cross_check(4, external=[external_cmd])
    assert rep.status == SAT and len(rep.runs) == 3
    assert len(rep.summary()) == 3
    with pytest.raises(ValueError):
        cross_check(3, configs=DEFAULT_CONFIGS[:1])
