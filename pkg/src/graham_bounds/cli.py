"""Command-line entry point.

Primary output goes to stdout and is byte-identical for identical flags and
inputs; statistics and timings go to stderr.  Exit codes: 0 success, 1 a
verified negative answer, 2 usage or I/O error.
"""
from __future__ import annotations

import argparse
import hashlib
import itertools
import json
import logging
import os
import random
import sys
import tempfile
import time
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from . import constructions as rc
from . import encode, paramsets, solver, squares, towers
from .cube import (
    BLUE,
    RED,
    Color,
    direction_to_str,
    enumerate_rectangles,
    make_k4,
    vertex_from_str,
    vertex_to_str,
)

CACHE_ENV = "GRAHAM_BOUNDS_CACHE"

log = logging.getLogger("graham_bounds")


class UsageError(Exception):
    pass


@dataclass
class Outcome:
    stdout: str
    code: int = 0
    summary: str = ""
    reusable: bool = True


# -- run cache ------------------------------------------------------------------------


@dataclass(frozen=True)
class RunRecord:
    command: str
    params: dict
    input_digest: str
    summary: str
    stdout: str
    code: int
    timestamp: float

    def key(self) -> str:
        return cache_key(self.command, self.params, self.input_digest)


def cache_dir() -> Path:
    return Path(os.environ.get(CACHE_ENV) or Path.home() / ".cache" / "graham_bounds")


def digest_files(paths) -> str:
    h = hashlib.sha256()
    for p in paths:
        h.update(Path(p).read_bytes())
    return h.hexdigest()


def cache_key(command: str, params: dict, input_digest: str) -> str:
    blob = json.dumps([command, params, input_digest], sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def load_record(key: str) -> RunRecord | None:
    path = cache_dir() / f"{key}.json"
    try:
        return RunRecord(**json.loads(path.read_text()))
    except (OSError, ValueError, TypeError):
        return None


def store_record(rec: RunRecord) -> None:
    d = cache_dir()
    d.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    with os.fdopen(fd, "w") as fh:
        json.dump(asdict(rec), fh, indent=1, sort_keys=True)
    os.replace(tmp, d / f"{rec.key()}.json")


def atomic_write(path: str | Path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", suffix=".tmp")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


# -- commands -----------------------------------------------------------------------------


def cmd_encode(args) -> Outcome:
    f = encode.build_cnf(args.n)
    if args.symmetry_breaking:
        f = encode.with_symmetry_breaking(f, args.n)
    text = encode.emit_dimacs(f)
    if args.out:
        atomic_write(args.out, text)
        return Outcome(f"p cnf {f.var_count} {len(f.clauses)}\n", reusable=False)
    return Outcome(text)


def _solve_runs(args, f):
    if args.cross_check:
        rep = solver.cross_check(
            args.n, external=args.external or (), symmetry_breaking=not args.no_symmetry_breaking
        )
        return rep.status, rep.runs
    if args.engine == "external":
        if not args.external:
            raise UsageError("--engine external needs --external COMMAND")
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / f"cube{args.n}.cnf"
            path.write_text(encode.emit_dimacs(f))
            r = solver.solve_external(path, args.external[0])
        return r.status, (r,)
    cfg = solver.SolverConfig(
        heuristic=args.heuristic, restart=args.restart, seed=args.seed, max_conflicts=args.max_conflicts
    )
    r = solver.solve(f, cfg)
    return r.status, (r,)


def cmd_solve(args) -> Outcome:
    f = solver.instance(args.n, symmetry_breaking=not args.no_symmetry_breaking)
    status, runs = _solve_runs(args, f)
    for r in runs:
        print(
            f"{r.engine}: {r.status} decisions={r.stats.decisions} conflicts={r.stats.conflicts} "
            f"propagations={r.stats.propagations} time={r.stats.elapsed:.2f}s",
            file=sys.stderr,
        )
    out = [status]
    reusable = True
    if status == solver.SAT:
        coloring = encode.decode_witness(runs[0].model, args.n)
        bad = encode.verify_class_coloring(coloring, args.n)
        if bad:
            raise solver.ModelVerificationError(f"witness has {len(bad)} monochromatic K4s")
        if args.witness_out:
            atomic_write(args.witness_out, encode.witness_to_json(coloring, args.n))
            n2, back = encode.witness_from_json(Path(args.witness_out).read_text())
            if n2 != args.n or encode.verify_class_coloring(back, n2):
                raise solver.ModelVerificationError("written witness failed re-verification")
            reusable = False
    code = 1 if args.expect and args.expect != status else 0
    return Outcome("\n".join(out) + "\n", code, status, reusable)


def _read_json(path) -> object:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: malformed JSON ({exc})") from None


def cmd_verify_witness(args) -> Outcome:
    try:
        n, coloring = encode.witness_from_json(Path(args.witness).read_text())
    except (ValueError, KeyError) as exc:
        raise UsageError(f"{args.witness}: {exc}") from None
    if args.n is not None and args.n != n:
        raise UsageError(f"witness is for n={n}, not n={args.n}")
    bad = encode.verify_class_coloring(coloring, n)
    lines = [
        " ".join(sorted(direction_to_str(d) for d in v.k4)) + f" {v.color.value}" for v in bad
    ]
    lines.append(f"{len(bad)} violations")
    return Outcome("\n".join(lines) + "\n", 1 if bad else 0, f"{len(bad)} violations")


def cmd_hyperbowtie_check(args) -> Outcome:
    rep = paramsets.verify_bijection(args.n, args.d)
    return Outcome(json.dumps(asdict(rep), indent=1) + "\n", 0 if rep.bijective else 1)


def _read_c4(path, n: int) -> dict:
    doc = _read_json(path)
    if not isinstance(doc, dict) or doc.get("n") != n or not isinstance(doc.get("colors"), dict):
        raise UsageError(f"{path}: expected {{'n': {n}, 'colors': {{'1234...': 'R'|'B'}}}}")
    out = {}
    for key, val in doc["colors"].items():
        if len(key) != n or any(ch not in "1234" for ch in key):
            raise UsageError(f"{path}: bad point {key!r}")
        out[tuple(int(ch) for ch in key)] = Color(val)
    if len(out) != 4**n:
        raise UsageError(f"{path}: coloring covers {len(out)} of {4**n} points")
    return out


def cmd_transfer_lower(args) -> Outcome:
    if args.n > 5 or args.d > 2:
        raise UsageError(f"exhaustive search over {{+-1}}^{args.n + 1} for {args.d + 1}-subcubes is limited to n <= 5, d <= 2")
    if args.coloring:
        c4 = _read_c4(args.coloring, args.n)
    else:
        rng = random.Random(args.seed)
        c4 = {z: rng.choice((RED, BLUE)) for z in itertools.product(range(1, 5), repeat=args.n)}
    ec = rc.lift_coloring(c4)
    found = []
    for f, _ in rc.iter_mono_subcubes(ec, args.n + 1, args.d + 1):
        sp = rc.extract_ttt_space(f, c4)
        found.append(
            {
                "subcube": json.loads(paramsets.map_to_json(f)),
                "case": "crossing" if sp.crossing else "contained",
                "color": sp.color.value,
                "space": json.loads(paramsets.map_to_json(sp.space)),
                "points": sorted("".join(map(str, p)) for p in sp.points),
            }
        )
        if not args.all:
            break
    doc = {"n": args.n, "d": args.d, "extracted": found}
    return Outcome(json.dumps(doc, indent=1) + "\n", 0 if found else 1, f"{len(found)} spaces")


def random_reduction_instance(d: int, seed: int) -> dict:
    table = rc.random_reduction_coloring(d, random.Random(seed))
    edges = [[vertex_to_str(u), vertex_to_str(v), c.value] for (u, v), c in sorted(table.items())]
    return {"d": d, "edges": edges}


def _edge_coloring_from_doc(doc) -> tuple[int, Callable]:
    try:
        d = int(doc["d"])
        table = {}
        for u, v, c in doc["edges"]:
            u, v = vertex_from_str(u), vertex_from_str(v)
            table[frozenset((u, v))] = Color(c)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"bad instance: {exc}") from None
    need = (1 << (d + 1)) * ((1 << (d + 1)) - 1) // 2
    if len(table) != need:
        raise UsageError(f"instance colors {len(table)} of {need} edges")
    return d, rc.table_coloring(table)


def cmd_reduce_upper(args) -> Outcome:
    doc = _read_json(args.instance) if args.instance else random_reduction_instance(args.d, args.seed)
    d, ec = _edge_coloring_from_doc(doc)
    try:
        out = rc.reduce_to_class_coloring(ec, d)
    except rc.ContractViolation as exc:
        raise UsageError(str(exc)) from None
    if out.certificate is not None:
        ok = rc.verify_point_certificate(out.certificate, ec)
        res = {"outcome": "direct", "verified": ok, "certificate": json.loads(out.certificate.to_json())}
        return Outcome(json.dumps(res, indent=1) + "\n", 0 if ok else 1)
    lifted = []
    for v in encode.verify_class_coloring(out.induced, d):
        r = next(r for r in enumerate_rectangles(d) if make_k4(r) == v.k4)
        cert = rc.lift_induced_k4(ec, out, r)
        lifted.append({"verified": rc.verify_point_certificate(cert, ec), **json.loads(cert.to_json())})
    res = {
        "outcome": "induced",
        "middle": out.middle.value,
        "classes": {direction_to_str(k): c.value for k, c in out.induced.items()},
        "mono_k4s": lifted,
    }
    return Outcome(json.dumps(res, indent=1) + "\n", 0 if all(x["verified"] for x in lifted) else 1)


def cmd_squares(args) -> Outcome:
    if args.n > squares.MAX_CENSUS_DIM:
        est = 2**args.n * args.n**4 // 32
        raise UsageError(f"exhaustive census at n={args.n} needs about {est:.2e} squares; limit is n <= {squares.MAX_CENSUS_DIM}")
    rng = np.random.default_rng(args.seed)
    rows = []
    for k in range(args.colorings):
        ec = squares.Coloring2.random(args.n, rng)
        if args.mode == "exhaustive":
            rep = squares.census(ec)
        else:
            rep = squares.sample_census(ec, args.samples, args.seed * 1_000_003 + k)
        rows.append(squares.csv_row(rep, f"seed{args.seed}-{k}"))
    return Outcome(squares.to_csv(rows))


def cmd_threshold(args) -> Outcome:
    n, m = squares.square_threshold()
    text = f"{n}\n"
    if args.show_margin:
        text += f"margin({n}) = {m}\nmargin({n - 1}) = {squares.margin(n - 1)}\n"
    return Outcome(text)


def cmd_bounds(args) -> Outcome:
    T = towers
    trace = None
    if args.which == "hj426":
        out, trace = T.hj_chain(T.Nat(6))
        rel = T.compare(out, T.TriArrow(2, 6))
        sym = {T.Cmp.LT: "<", T.Cmp.EQ: "=", T.Cmp.GT: ">"}.get(rel, "?")
        text = f"{T.render(out)} {sym} 2^^^6"
    elif args.which == "hj-tet18":
        out, trace = T.hj_chain(T.tet(2, 18))
        text = T.render(out)
    elif args.which == "shelah-f":
        try:
            text = str(T.shelah_f_exact(args.ell, args.k))
        except OverflowError as exc:
            raise UsageError(f"f({args.ell},{args.k}) is too large to evaluate: {exc}") from None
    elif args.which == "nk":
        out, trace = T.nk_bound(args.k)
        text = T.render(out)
    else:
        try:
            a, b = T.parse(args.e1), T.parse(args.e2)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        text = T.compare(a, b).value
    if trace is not None and args.json:
        return Outcome(trace.to_json() + "\n")
    if trace is not None and args.trace:
        text += "\n" + trace.render()
    return Outcome(text + "\n")


# -- argument parsing -------------------------------------------------------------------------


def _dim(lo: int, hi: int):
    def parse(s: str) -> int:
        try:
            v = int(s)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not an integer: {s!r}") from None
        if not lo <= v <= hi:
            raise argparse.ArgumentTypeError(f"must lie in [{lo}, {hi}]")
        return v

    return parse


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="graham-bounds", description=__doc__.splitlines()[0])
    p.add_argument("--no-cache", action="store_true", help="neither read nor write the run cache")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("encode", help="write the DIMACS instance for dimension n")
    s.add_argument("--n", type=_dim(2, 8), required=True)
    s.add_argument("--out")
    s.add_argument("--symmetry-breaking", action="store_true")
    s.set_defaults(func=cmd_encode)

    s = sub.add_parser("solve", help="decide whether a K4-free class coloring exists")
    s.add_argument("--n", type=_dim(2, 6), required=True)
    s.add_argument("--engine", choices=("builtin", "external"), default="builtin")
    s.add_argument("--heuristic", choices=("vsids", "vmtf"), default="vsids")
    s.add_argument("--restart", choices=("geometric", "luby"), default="geometric")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--max-conflicts", type=int)
    s.add_argument("--external", action="append", metavar="COMMAND", help="command template, {file} marks the CNF path")
    s.add_argument("--cross-check", action="store_true", help="two built-in configurations plus any --external")
    s.add_argument("--no-symmetry-breaking", action="store_true")
    s.add_argument("--witness-out")
    s.add_argument("--expect", choices=(solver.SAT, solver.UNSAT))
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("verify-witness", help="list monochromatic K4s of a witness coloring")
    s.add_argument("--witness", required=True)
    s.add_argument("--n", type=int)
    s.set_defaults(func=cmd_verify_witness)

    s = sub.add_parser("hyperbowtie-check", help="compare hyperbowties with tic-tac-toe spaces")
    s.add_argument("--n", type=_dim(1, 3), required=True)
    s.add_argument("--d", type=_dim(0, 2), required=True)
    s.set_defaults(func=cmd_hyperbowtie_check)

    s = sub.add_parser("transfer-lower", help="lift a coloring of [4]^n and extract mono tic-tac-toe spaces")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--d", type=int, default=1)
    s.add_argument("--coloring")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--all", action="store_true", help="report every monochromatic subcube")
    s.set_defaults(func=cmd_transfer_lower)

    s = sub.add_parser("reduce-upper", help="apply the reduction rules to a subcube instance")
    s.add_argument("--instance")
    s.add_argument("--d", type=_dim(1, 4), default=2)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_reduce_upper)

    s = sub.add_parser("squares", help="square census as CSV")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--mode", choices=("exhaustive", "sample"), default="exhaustive")
    s.add_argument("--samples", type=int, default=10_000)
    s.add_argument("--colorings", type=int, default=1)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_squares)

    s = sub.add_parser("threshold", help="least n forced to have a monochromatic square")
    s.add_argument("--show-margin", action="store_true")
    s.set_defaults(func=cmd_threshold)

    s = sub.add_parser("bounds", help="tower bounds")
    s.add_argument("--trace", action="store_true")
    s.add_argument("--json", action="store_true", help="print the derivation trace as JSON")
    bsub = s.add_subparsers(dest="which", required=True)
    bsub.add_parser("hj426")
    bsub.add_parser("hj-tet18")
    b = bsub.add_parser("shelah-f")
    b.add_argument("--ell", type=int, required=True)
    b.add_argument("--k", type=int, required=True)
    b = bsub.add_parser("nk")
    b.add_argument("--k", type=int, required=True)
    b = bsub.add_parser("compare")
    b.add_argument("e1")
    b.add_argument("e2")
    s.set_defaults(func=cmd_bounds)
    return p


def _canonical_params(args) -> dict:
    skip = {"func", "no_cache", "verbose"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _input_paths(args) -> list[str]:
    return [getattr(args, k) for k in ("witness", "coloring", "instance") if getattr(args, k, None)]


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr)
    try:
        params = _canonical_params(args)
        digest = digest_files(_input_paths(args))
        key = cache_key(args.command, params, digest)
        rec = None if args.no_cache else load_record(key)
        if rec is not None:
            print(f"(cached result from {time.ctime(rec.timestamp)})", file=sys.stderr)
            sys.stdout.write(rec.stdout)
            return rec.code
        t0 = time.perf_counter()
        out = args.func(args)
        print(f"elapsed {time.perf_counter() - t0:.2f}s", file=sys.stderr)
    except (UsageError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except solver.SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(out.stdout)
    if not args.no_cache and out.reusable:
        try:
            store_record(RunRecord(args.command, params, digest, out.summary, out.stdout, out.code, time.time()))
        except OSError as exc:
            print(f"warning: could not write cache: {exc}", file=sys.stderr)
    return out.code


if __name__ == "__main__":
    sys.exit(main())
