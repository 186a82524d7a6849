"""A deterministic CDCL SAT solver plus an adapter for external DIMACS solvers.

The built-in engine uses two watched literals, first-UIP learning with
clause minimization, VSIDS or VMTF decisions, phase saving, geometric or Luby
restarts and LBD-based clause database reduction.  Every SAT answer is checked
against all clauses before it is returned.
"""
from __future__ import annotations

import heapq
import json
import logging
import random
import shlex
import subprocess
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .encode import (
    CnfFormula,
    build_cnf,
    decode_witness,
    emit_dimacs,
    parse_dimacs,
    verify_class_coloring,
    with_symmetry_breaking,
)

log = logging.getLogger(__name__)

SAT = "SAT"
UNSAT = "UNSAT"


@dataclass(frozen=True)
class SolverConfig:
    heuristic: str = "vsids"  # "vsids" | "vmtf"
    seed: int = 0
    restart: str = "geometric"  # "geometric" | "luby"
    restart_first: int = 100
    restart_inc: float = 1.5
    var_decay: float = 0.95
    initial_phase: bool = False
    reduce_first: int = 2000
    reduce_inc: int = 300
    max_conflicts: int | None = None

    def __post_init__(self):
        if self.heuristic not in ("vsids", "vmtf"):
            raise ValueError(f"unknown heuristic {self.heuristic!r}")
        if self.restart not in ("geometric", "luby"):
            raise ValueError(f"unknown restart policy {self.restart!r}")


@dataclass(frozen=True)
class SolveStats:
    decisions: int = 0
    conflicts: int = 0
    propagations: int = 0
    restarts: int = 0
    learned: int = 0
    elapsed: float = 0.0


@dataclass(frozen=True)
class SolveResult:
    status: str
    model: tuple[bool, ...] | None = None
    stats: SolveStats = field(default_factory=SolveStats)
    engine: str = "builtin"

    def __post_init__(self):
        if self.status not in (SAT, UNSAT):
            raise ValueError(f"bad status {self.status!r}")
        if (self.model is not None) != (self.status == SAT):
            raise ValueError("a model is present exactly when the status is SAT")


class SolverError(Exception):
    pass


class ConflictLimitReached(SolverError):
    pass


class ExternalSolverError(SolverError):
    pass


class ExternalProcessError(ExternalSolverError):
    pass


class ExternalOutputError(ExternalSolverError):
    pass


class ModelVerificationError(SolverError):
    pass


class DisagreementError(SolverError):
    pass


def luby(i: int) -> int:
    """i-th element (0-based) of the Luby sequence 1 1 2 1 1 2 4 ..."""
    size, seq = 1, 0
    while size < i + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != i:
        size = (size - 1) >> 1
        seq -= 1
        i %= size
    return 1 << seq


class _Solver:
    # literal encoding: variable v (0-based) -> 2v (positive), 2v+1 (negative)

    def __init__(self, f: CnfFormula, cfg: SolverConfig):
        self.cfg = cfg
        self.nvars = nv = f.var_count
        self.val = [0] * (2 * nv)  # 1 true, -1 false, 0 unassigned
        self.level = [0] * nv
        self.reason: list = [None] * nv
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.watches: list[list[list[int]]] = [[] for _ in range(2 * nv)]
        self.learnts: list[list[int]] = []
        self.lbd: dict[int, int] = {}
        self.seen = [0] * nv
        self.phase = [cfg.initial_phase] * nv
        self.rng = random.Random(cfg.seed)
        self.n_decisions = self.n_conflicts = self.n_props = self.n_restarts = 0
        self.units: list[int] = []
        for clause in f.clauses:
            lits = sorted({2 * (abs(l) - 1) + (l < 0) for l in clause})
            if any(lits[k] ^ 1 == lits[k + 1] for k in range(len(lits) - 1)):
                continue  # tautology
            if len(lits) == 1:
                self.units.append(lits[0])
            else:
                self.watches[lits[0]].append(lits)
                self.watches[lits[1]].append(lits)
        self._init_heuristic()

    # -- decision heuristics -------------------------------------------------

    def _init_heuristic(self):
        nv = self.nvars
        jitter = [self.rng.random() * 1e-5 for _ in range(nv)]
        if self.cfg.heuristic == "vsids":
            self.activity = jitter
            self.var_inc = 1.0
            self.heap = [(-a, v) for v, a in enumerate(self.activity)]
            heapq.heapify(self.heap)
        else:
            order = sorted(range(nv), key=lambda v: jitter[v])
            self.prev = [-1] * nv
            self.next = [-1] * nv
            self.stamp = [0] * nv
            for k, v in enumerate(order):
                self.prev[v] = order[k - 1] if k else -1
                self.next[v] = order[k + 1] if k + 1 < nv else -1
                self.stamp[v] = k + 1
            self.q_first = order[0] if nv else -1
            self.q_last = order[-1] if nv else -1
            self.q_search = self.q_last
            self.stamp_ctr = nv

    def _bump(self, vars_: Sequence[int]):
        if self.cfg.heuristic == "vsids":
            act, inc, heap = self.activity, self.var_inc, self.heap
            for v in vars_:
                a = act[v] + inc
                act[v] = a
                heapq.heappush(heap, (-a, v))
            if inc > 1e100:
                for v in range(self.nvars):
                    act[v] *= 1e-100
                self.var_inc *= 1e-100
                self._rebuild_heap()
            elif len(heap) > 20 * self.nvars + 1000:
                self._rebuild_heap()
        else:
            stamp = self.stamp
            for v in sorted(vars_, key=stamp.__getitem__):
                self._move_to_front(v)

    def _decay(self):
        if self.cfg.heuristic == "vsids":
            self.var_inc /= self.cfg.var_decay

    def _rebuild_heap(self):
        val, act = self.val, self.activity
        self.heap = [(-act[v], v) for v in range(self.nvars) if not val[2 * v]]
        heapq.heapify(self.heap)

    def _move_to_front(self, v):
        if v == self.q_last:
            self.stamp_ctr += 1
            self.stamp[v] = self.stamp_ctr
            return
        p, n = self.prev[v], self.next[v]
        if p >= 0:
            self.next[p] = n
        else:
            self.q_first = n
        self.prev[n] = p
        if self.q_search == v:
            self.q_search = n if n >= 0 else p
        last = self.q_last
        self.next[last] = v
        self.prev[v] = last
        self.next[v] = -1
        self.q_last = v
        self.stamp_ctr += 1
        self.stamp[v] = self.stamp_ctr
        if not self.val[2 * v]:
            self.q_search = v

    def _on_unassign(self, v):
        if self.cfg.heuristic == "vsids":
            heapq.heappush(self.heap, (-self.activity[v], v))
        elif self.stamp[v] > self.stamp[self.q_search]:
            self.q_search = v

    def _pick(self) -> int:
        val = self.val
        if self.cfg.heuristic == "vsids":
            heap = self.heap
            while heap:
                v = heapq.heappop(heap)[1]
                if not val[2 * v]:
                    return v
            for v in range(self.nvars):
                if not val[2 * v]:
                    return v
            return -1
        v = self.q_search
        prev = self.prev
        while v >= 0 and val[2 * v]:
            v = prev[v]
        self.q_search = v if v >= 0 else self.q_first
        return v

    # -- core ----------------------------------------------------------------

    def _enqueue(self, lit, reason):
        v = lit >> 1
        self.val[lit] = 1
        self.val[lit ^ 1] = -1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)

    def _propagate(self):
        val, watches, trail = self.val, self.watches, self.trail
        level, reason = self.level, self.reason
        lvl = len(self.trail_lim)
        while self.qhead < len(trail):
            p = trail[self.qhead]
            self.qhead += 1
            self.n_props += 1
            false_lit = p ^ 1
            ws = watches[false_lit]
            kept = []
            i, nws = 0, len(ws)
            while i < nws:
                c = ws[i]
                i += 1
                if c[0] == false_lit:
                    c[0] = c[1]
                    c[1] = false_lit
                first = c[0]
                vf = val[first]
                if vf == 1:
                    kept.append(c)
                    continue
                for k in range(2, len(c)):
                    lit = c[k]
                    if val[lit] != -1:
                        c[1] = lit
                        c[k] = false_lit
                        watches[lit].append(c)
                        break
                else:
                    kept.append(c)
                    if vf == -1:
                        kept.extend(ws[i:])
                        watches[false_lit] = kept
                        self.qhead = len(trail)
                        return c
                    val[first] = 1
                    val[first ^ 1] = -1
                    v = first >> 1
                    level[v] = lvl
                    reason[v] = c
                    trail.append(first)
            watches[false_lit] = kept
        return None

    def _analyze(self, confl):
        seen, level, reason, trail = self.seen, self.level, self.reason, self.trail
        cur = len(self.trail_lim)
        learnt = [0]
        bumped = []
        pending = 0
        p = -1
        idx = len(trail) - 1
        while True:
            for q in confl:
                if q == p:
                    continue
                v = q >> 1
                if not seen[v] and level[v] > 0:
                    seen[v] = 1
                    bumped.append(v)
                    if level[v] >= cur:
                        pending += 1
                    else:
                        learnt.append(q)
            while not seen[trail[idx] >> 1]:
                idx -= 1
            p = trail[idx]
            idx -= 1
            v = p >> 1
            confl = reason[v]
            seen[v] = 0
            pending -= 1
            if pending == 0:
                break
        learnt[0] = p ^ 1

        # drop literals implied by the rest of the clause (local minimization)
        keep = [learnt[0]]
        for q in learnt[1:]:
            r = reason[q >> 1]
            if r is None or any(not seen[x >> 1] and level[x >> 1] > 0 for x in r if x != q ^ 1):
                keep.append(q)
        for v in bumped:
            seen[v] = 0
        learnt = keep

        if len(learnt) == 1:
            bt = 0
        else:
            best = max(range(1, len(learnt)), key=lambda k: level[learnt[k] >> 1])
            learnt[1], learnt[best] = learnt[best], learnt[1]
            bt = level[learnt[1] >> 1]
        self._bump(bumped)
        self._decay()
        return learnt, bt

    def _cancel_until(self, lvl):
        if len(self.trail_lim) <= lvl:
            return
        val, phase, trail = self.val, self.phase, self.trail
        stop = self.trail_lim[lvl]
        for k in range(len(trail) - 1, stop - 1, -1):
            lit = trail[k]
            v = lit >> 1
            phase[v] = not (lit & 1)
            val[lit] = 0
            val[lit ^ 1] = 0
            self.reason[v] = None
            self._on_unassign(v)
        del trail[stop:]
        del self.trail_lim[lvl:]
        self.qhead = len(trail)

    def _reduce_db(self):
        reason, val = self.reason, self.val
        locked = set()
        for c in self.learnts:
            v = c[0] >> 1
            if reason[v] is c and val[c[0]] == 1:
                locked.add(id(c))
        lbd = self.lbd
        ranked = sorted(self.learnts, key=lambda c: (lbd[id(c)], len(c)))
        half = len(ranked) // 2
        keep, dead = [], set()
        for k, c in enumerate(ranked):
            if k < half or id(c) in locked or lbd[id(c)] <= 2:
                keep.append(c)
            else:
                dead.add(id(c))
        if not dead:
            return
        for c in self.learnts:
            if id(c) in dead:
                del lbd[id(c)]
        self.learnts = keep
        self.watches = [[c for c in ws if id(c) not in dead] for ws in self.watches]

    def _restart_limit(self, k):
        if self.cfg.restart == "luby":
            return self.cfg.restart_first * luby(k)
        return int(self.cfg.restart_first * self.cfg.restart_inc**k)

    def solve(self) -> bool:
        for lit in self.units:
            if self.val[lit] == -1:
                return False
            if not self.val[lit]:
                self._enqueue(lit, None)
        if self._propagate() is not None:
            return False
        max_learnts = self.cfg.reduce_first
        restart_k = 0
        budget = self._restart_limit(restart_k)
        since_restart = 0
        limit = self.cfg.max_conflicts
        level = self.level
        while True:
            confl = self._propagate()
            if confl is not None:
                self.n_conflicts += 1
                since_restart += 1
                if not self.trail_lim:
                    return False
                if limit is not None and self.n_conflicts > limit:
                    raise ConflictLimitReached(f"gave up after {limit} conflicts")
                learnt, bt = self._analyze(confl)
                self._cancel_until(bt)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], None)
                else:
                    self.watches[learnt[0]].append(learnt)
                    self.watches[learnt[1]].append(learnt)
                    self.learnts.append(learnt)
                    self.lbd[id(learnt)] = len({level[l >> 1] for l in learnt})
                    self._enqueue(learnt[0], learnt)
                continue
            if since_restart >= budget:
                self.n_restarts += 1
                restart_k += 1
                budget = self._restart_limit(restart_k)
                since_restart = 0
                self._cancel_until(0)
            if len(self.learnts) - len(self.trail) >= max_learnts:
                self._reduce_db()
                max_learnts += self.cfg.reduce_inc
            v = self._pick()
            if v < 0:
                return True
            self.n_decisions += 1
            self.trail_lim.append(len(self.trail))
            self._enqueue(2 * v + (not self.phase[v]), None)

    def model(self) -> tuple[bool, ...]:
        return tuple(self.val[2 * v] == 1 for v in range(self.nvars))


def solve(f: CnfFormula, config: SolverConfig | None = None) -> SolveResult:
    cfg = config or SolverConfig()
    t0 = time.perf_counter()
    s = _Solver(f, cfg)
    sat = s.solve()
    stats = SolveStats(
        decisions=s.n_decisions,
        conflicts=s.n_conflicts,
        propagations=s.n_props,
        restarts=s.n_restarts,
        learned=len(s.learnts),
        elapsed=time.perf_counter() - t0,
    )
    engine = f"builtin:{cfg.heuristic}:{cfg.restart}:seed={cfg.seed}"
    if not sat:
        return SolveResult(UNSAT, None, stats, engine)
    model = s.model()
    if not f.satisfied_by(model):
        raise ModelVerificationError("internal error: model violates a clause")
    return SolveResult(SAT, model, stats, engine)


# -- external engines ----------------------------------------------------------


def parse_competition_output(text: str, var_count: int) -> tuple[str, tuple[bool, ...] | None]:
    status = None
    values: dict[int, bool] = {}
    saw_end = False
    for line in text.splitlines():
        if line.startswith("s "):
            word = line[2:].strip()
            if word == "SATISFIABLE":
                status = SAT
            elif word == "UNSATISFIABLE":
                status = UNSAT
            else:
                raise ExternalOutputError(f"unrecognized status line {line!r}")
        elif line.startswith("v "):
            for tok in line[2:].split():
                try:
                    lit = int(tok)
                except ValueError:
                    raise ExternalOutputError(f"bad literal {tok!r} in value line") from None
                if lit == 0:
                    saw_end = True
                elif abs(lit) > var_count:
                    raise ExternalOutputError(f"literal {lit} out of range")
                else:
                    values[abs(lit)] = lit > 0
    if status is None:
        raise ExternalOutputError("no 's ' status line in solver output")
    if status == UNSAT:
        return status, None
    if not saw_end:
        raise ExternalOutputError("value lines are not terminated by 0")
    # unmentioned variables are don't-cares
    return status, tuple(values.get(v, False) for v in range(1, var_count + 1))


def solve_external(dimacs_path: str | Path, command_template: str, timeout: float | None = None) -> SolveResult:
    """Run an external solver; "{file}" in the template is replaced by the path."""
    path = Path(dimacs_path)
    f = parse_dimacs(path.read_text())
    argv = [tok.replace("{file}", str(path)) for tok in shlex.split(command_template)]
    if not any("{file}" in tok for tok in shlex.split(command_template)):
        argv.append(str(path))
    t0 = time.perf_counter()
    try:
        proc = subprocess.run(argv, capture_output=True, text=True, timeout=timeout)
    except (OSError, subprocess.TimeoutExpired) as exc:
        raise ExternalProcessError(f"could not run {argv[0]!r}: {exc}") from exc
    # competition convention: 10 = SAT, 20 = UNSAT
    if proc.returncode not in (0, 10, 20):
        raise ExternalProcessError(f"{argv[0]!r} exited with status {proc.returncode}: {proc.stderr.strip()[:500]}")
    status, model = parse_competition_output(proc.stdout, f.var_count)
    if model is not None and not f.satisfied_by(model):
        raise ModelVerificationError(f"model from {argv[0]!r} violates the formula")
    stats = SolveStats(elapsed=time.perf_counter() - t0)
    return SolveResult(status, model, stats, engine=f"external:{command_template}")


def format_competition_output(result: SolveResult) -> str:
    if result.status == UNSAT:
        return "s UNSATISFIABLE\n"
    lits = [str(v + 1 if b else -(v + 1)) for v, b in enumerate(result.model)]
    lines = ["s SATISFIABLE"]
    for k in range(0, len(lits), 10):
        lines.append("v " + " ".join(lits[k : k + 10]))
    lines.append("v 0")
    return "\n".join(lines) + "\n"


# -- cross checking --------------------------------------------------------------

DEFAULT_CONFIGS = (
    SolverConfig(heuristic="vsids", restart="geometric", seed=0),
    SolverConfig(heuristic="vmtf", restart="luby", seed=1),
)


@dataclass(frozen=True)
class CrossCheckReport:
    n: int
    status: str
    runs: tuple[SolveResult, ...]
    symmetry_breaking: bool

    def summary(self) -> list[str]:
        return [
            f"{r.engine}: {r.status} conflicts={r.stats.conflicts} time={r.stats.elapsed:.2f}s"
            for r in self.runs
        ]


def instance(n: int, symmetry_breaking: bool = True) -> CnfFormula:
    f = build_cnf(n)
    return with_symmetry_breaking(f, n) if symmetry_breaking else f


def cross_check(
    n: int,
    configs: Sequence[SolverConfig] = DEFAULT_CONFIGS,
    external: Sequence[str] = (),
    symmetry_breaking: bool = True,
    dump_dir: str | Path | None = None,
) -> CrossCheckReport:
    """Solve the dimension-n instance with several engines and demand agreement.

    SAT witnesses are decoded and checked against the direct K4 enumeration.
    """
    if len(configs) + len(external) < 2:
        raise ValueError("cross_check needs at least two runs")
    f = instance(n, symmetry_breaking)
    runs = []
    for cfg in configs:
        log.info("cross_check n=%d builtin %s", n, cfg)
        runs.append(solve(f, cfg))
    if external:
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / f"cube{n}.cnf"
            path.write_text(emit_dimacs(f))
            for cmd in external:
                runs.append(solve_external(path, cmd))
    for r in runs:
        if r.status == SAT and verify_class_coloring(decode_witness(r.model, n), n):
            raise ModelVerificationError(f"{r.engine} returned a coloring with a monochromatic K4")
    statuses = {r.status for r in runs}
    if len(statuses) != 1:
        out = Path(dump_dir or tempfile.mkdtemp(prefix="crosscheck-"))
        out.mkdir(parents=True, exist_ok=True)
        (out / f"cube{n}.cnf").write_text(emit_dimacs(f))
        (out / "runs.json").write_text(
            json.dumps(
                [{"engine": r.engine, "status": r.status, "model": r.model} for r in runs], indent=1
            )
        )
        raise DisagreementError(f"engines disagree on n={n}: {sorted(statuses)}; artifacts in {out}")
    return CrossCheckReport(n, statuses.pop(), tuple(runs), symmetry_breaking)
