"""Up-arrow expressions, sound comparison, and the tower bounds on Hales-Jewett numbers.

Normal forms are built from Nat, Tet (base^^height) and TriArrow (base^^^count).
Sum, Prod, Pow and Call nodes only appear inside derivation traces.  Every
bound produced here is an upper bound, and each loosening step is recorded
with the rewrite rule that justifies it.
"""
from __future__ import annotations

import enum
import json
import math
import re
from dataclasses import dataclass, field
from typing import Union

MAX_BITS = 1 << 20

# rewrite rules, by the tag they carry in traces
RULE_PAREN = "rewrite:parenthesization"
RULE_TET_OF_TET = "rewrite:tet-of-tet"
RULE_PRODUCT = "rewrite:product"
RULE_SUM = "rewrite:sum"
RULE_EXACT = "exact"
RULE_UNFOLD = "unfold"
RULE_HYPOTHESIS = "hypothesis"
RULE_SHELAH = "bound:shelah-f"
RULE_DOUBLE_EXP = "bound:hj-2-2"


# -- expressions ----------------------------------------------------------------------


@dataclass(frozen=True)
class Nat:
    value: int

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("Nat must be non-negative")


@dataclass(frozen=True)
class Tet:
    base: Union[int, "TowerExpr"]
    height: "TowerExpr"


@dataclass(frozen=True)
class TriArrow:
    base: int
    count: int


@dataclass(frozen=True)
class Sum:
    left: "TowerExpr"
    right: "TowerExpr"


@dataclass(frozen=True)
class Prod:
    left: "TowerExpr"
    right: "TowerExpr"


@dataclass(frozen=True)
class Pow:
    base: "TowerExpr"
    exp: "TowerExpr"


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple


TowerExpr = Union[Nat, Tet, TriArrow, Sum, Prod, Pow, Call]


def tet(base: int, height: int | TowerExpr) -> Tet:
    return Tet(base, Nat(height) if isinstance(height, int) else height)


def is_normal(e: TowerExpr) -> bool:
    if isinstance(e, Nat):
        return True
    if isinstance(e, Tet):
        return isinstance(e.base, int) and e.base >= 2 and is_normal(e.height)
    if isinstance(e, TriArrow):
        return e.base >= 2 and e.count >= 1
    return False


def _prec(e) -> int:
    if isinstance(e, (Nat, int, Call)):
        return 4
    if isinstance(e, (Tet, TriArrow, Pow)):
        return 3
    if isinstance(e, Prod):
        return 2
    return 1


def render(e: int | TowerExpr) -> str:
    """ASCII form: 2^^(2^^9), 2^^^6, 3 + 2^^8."""

    def wrap(x, above: int) -> str:
        s = render(x)
        return s if _prec(x) > above else f"({s})"

    if isinstance(e, int):
        return str(e)
    if isinstance(e, Nat):
        return str(e.value)
    if isinstance(e, Tet):
        return f"{wrap(e.base, 3)}^^{wrap(e.height, 3)}"
    if isinstance(e, TriArrow):
        return f"{e.base}^^^{e.count}"
    if isinstance(e, Pow):
        return f"{wrap(e.base, 3)}^{wrap(e.exp, 3)}"
    if isinstance(e, Prod):
        return f"{wrap(e.left, 1)} * {wrap(e.right, 2)}"
    if isinstance(e, Sum):
        return f"{render(e.left)} + {wrap(e.right, 1)}"
    if isinstance(e, Call):
        return f"{e.name}({', '.join(render(a) for a in e.args)})"
    raise TypeError(f"not an expression: {e!r}")


# -- parsing --------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(\d+|\^\^\^|\^\^|\^|\*|\+|\(|\))")


def parse(text: str) -> TowerExpr:
    """Parse ASCII expressions; arrows bind right to left, tighter than * and +."""
    toks = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ValueError(f"unexpected input at {text[pos:]!r}")
        toks.append(m.group(1))
        pos = m.end()
    toks.append(None)
    i = 0

    def peek():
        return toks[i]

    def take(expected=None):
        nonlocal i
        tok = toks[i]
        if expected is not None and tok != expected:
            raise ValueError(f"expected {expected!r}, got {tok!r}")
        i += 1
        return tok

    def expr():
        e = term()
        while peek() == "+":
            take()
            e = Sum(e, term())
        return e

    def term():
        e = power()
        while peek() == "*":
            take()
            e = Prod(e, power())
        return e

    def power():
        a = atom()
        op = peek()
        if op == "^":
            take()
            return Pow(a, power())
        if op == "^^":
            take()
            return Tet(a, power())
        if op == "^^^":
            take()
            return TriArrow(a, power())
        return a

    def atom():
        tok = take()
        if tok == "(":
            e = expr()
            take(")")
            return e
        if tok is not None and tok.isdigit():
            return Nat(int(tok))
        raise ValueError(f"unexpected token {tok!r}")

    e = expr()
    if peek() is not None:
        raise ValueError(f"trailing input starting at {peek()!r}")
    return normalize_exact(e)


def normalize_exact(e: TowerExpr) -> TowerExpr:
    """Rewrite to normal form using equalities only; raise if that is impossible."""
    if isinstance(e, Nat):
        return e
    if isinstance(e, TriArrow):
        b, c = e.base, e.count
        if isinstance(b, Nat):
            b = b.value
        if isinstance(c, Nat):
            c = c.value
        if not isinstance(b, int) or not isinstance(c, int):
            raise ValueError("^^^ needs literal integer operands")
        if b < 2 or c < 1:
            raise ValueError("^^^ needs base >= 2 and count >= 1")
        return TriArrow(b, c)
    if isinstance(e, Tet):
        b = normalize_exact(e.base) if not isinstance(e.base, int) else Nat(e.base)
        if not isinstance(b, Nat) or b.value < 2:
            raise ValueError("tower base must be an integer >= 2")
        return Tet(b.value, normalize_exact(e.height))
    if isinstance(e, (Sum, Prod)):
        a, b = normalize_exact(e.left), normalize_exact(e.right)
        va, vb = evaluate(a), evaluate(b)
        if va is None or vb is None:
            raise ValueError(f"cannot normalize {render(e)} exactly")
        return Nat(va + vb if isinstance(e, Sum) else va * vb)
    if isinstance(e, Pow):
        b, x = normalize_exact(e.base), normalize_exact(e.exp)
        if isinstance(b, Nat) and isinstance(x, Tet) and x.base == b.value:
            # b^(b^^h) = b^^(h + 1)
            return Tet(b.value, _succ_exact(x.height))
        vb, vx = evaluate(b), evaluate(x)
        if vb is not None and vx is not None and _pow_bits(vb, vx) <= MAX_BITS:
            return Nat(vb**vx)
        raise ValueError(f"cannot normalize {render(e)} exactly")
    raise ValueError(f"cannot normalize {render(e)} exactly")


def _succ_exact(h: TowerExpr) -> TowerExpr:
    if isinstance(h, Nat):
        return Nat(h.value + 1)
    raise ValueError("height + 1 has no exact normal form")


# -- exact evaluation -------------------------------------------------------------------


def _pow_bits(b: int, x: int) -> float:
    """Approximate bit length of b**x without computing it."""
    if b <= 1:
        return 0
    if x.bit_length() > 1000:
        return math.inf
    return x * math.log2(b)


def tet_eval(base: int, height: int, max_bits: int = MAX_BITS) -> int:
    """base^^height exactly, with base^^0 = 1."""
    v = tet_value(base, height, max_bits)
    if v is None:
        raise OverflowError(f"{base}^^{height} exceeds {max_bits} bits")
    return v


def tet_value(base: int, height: int, max_bits: int = MAX_BITS) -> int | None:
    if base < 2 or height < 0:
        raise ValueError("need base >= 2 and height >= 0")
    v = 1
    for _ in range(height):
        if _pow_bits(base, v) > max_bits:
            return None
        v = base**v
    return v


def evaluate(e: TowerExpr, max_bits: int = MAX_BITS) -> int | None:
    """Exact value of a normal form, or None if it exceeds the size limit."""
    if isinstance(e, Nat):
        return e.value
    if isinstance(e, Tet):
        h = evaluate(e.height, max_bits)
        if h is None or not isinstance(e.base, int):
            return None
        return tet_value(e.base, h, max_bits)
    if isinstance(e, TriArrow):
        return evaluate(expand_triarrow(e), max_bits)
    return None


def expand_triarrow(e: TriArrow, limit: int = 64) -> TowerExpr:
    """b^^^c as nested towers b^^(b^^(...b)) with c b's."""
    if e.count > limit:
        raise ValueError(f"refusing to expand {render(e)}: count above {limit}")
    out: TowerExpr = Nat(e.base)
    for _ in range(e.count - 1):
        out = Tet(e.base, out)
    return out


# -- comparison -----------------------------------------------------------------------


class Cmp(enum.Enum):
    LT = "LT"
    EQ = "EQ"
    GT = "GT"
    UNKNOWN = "Unknown"

    def flip(self) -> "Cmp":
        return {Cmp.LT: Cmp.GT, Cmp.GT: Cmp.LT}.get(self, self)


def _cmp_int(a: int, b: int) -> Cmp:
    return Cmp.LT if a < b else Cmp.GT if a > b else Cmp.EQ


def compare(e1: TowerExpr, e2: TowerExpr) -> Cmp:
    """Sound partial order on normal forms; Unknown when no rule decides."""
    if not (is_normal(e1) and is_normal(e2)):
        raise ValueError("compare expects normal forms")
    if isinstance(e1, TriArrow):
        return compare(expand_triarrow(e1), e2)
    if isinstance(e2, TriArrow):
        return compare(e1, expand_triarrow(e2))
    if e1 == e2:
        return Cmp.EQ
    v1, v2 = evaluate(e1), evaluate(e2)
    if v1 is not None and v2 is not None:
        return _cmp_int(v1, v2)
    if v1 is not None:
        return _nat_vs_tet(v1, e2).flip()
    if v2 is not None:
        return _nat_vs_tet(v2, e1)
    assert isinstance(e1, Tet) and isinstance(e2, Tet)
    if e1.base == e2.base:
        # b^^h is strictly increasing in h for b >= 2
        return compare(e1.height, e2.height)
    return _by_base2_interval(e1, e2)


def _nat_vs_tet(c: int, t: Tet) -> Cmp:
    """Order of t relative to the integer c."""
    b = t.base
    j, v = 0, 1  # v = b^^j
    while v <= c:
        if v * (b.bit_length() - 1) > c.bit_length():
            v = None  # b^v certainly exceeds c
        else:
            v = b**v
        j += 1
        if v is None:
            break
    # now b^^j > c >= b^^(j-1)
    if j == 0:
        return Cmp.GT
    up = compare(t.height, Nat(j))
    if up in (Cmp.GT, Cmp.EQ):
        return Cmp.GT
    down = compare(t.height, Nat(j - 1))
    if down is Cmp.LT:
        return Cmp.LT
    if down is Cmp.EQ:
        return _cmp_int(tet_eval(b, j - 1), c)
    return Cmp.UNKNOWN


def _base2_levels(b: int) -> int:
    """Least s with b <= 2^^s."""
    s = 0
    while tet_eval(2, s) < b:
        s += 1
    return s


def _height_plus(h: TowerExpr, s: int) -> TowerExpr | None:
    """Some normal form >= h + s."""
    if s == 0:
        return h
    if isinstance(h, Nat):
        return Nat(h.value + s)
    if isinstance(h, Tet) and h.base == 2 and compare(Nat(s), h) is Cmp.LT:
        # s + 2^^k < 2^^(k+1) when s < 2^^k
        nh = _height_plus(h.height, 1)
        return None if nh is None else Tet(2, nh)
    return None


def _by_base2_interval(e1: Tet, e2: Tet) -> Cmp:
    if compare(e1.height, e2.height) is Cmp.EQ:
        # a^^h < b^^h for a < b and h >= 1; height 0 would have evaluated exactly
        return _cmp_int(e1.base, e2.base)
    # 2^^h <= b^^h <= 2^^(h + s) whenever b <= 2^^s
    hi1 = _height_plus(e1.height, _base2_levels(e1.base))
    hi2 = _height_plus(e2.height, _base2_levels(e2.base))
    if hi1 is not None and compare(hi1, e2.height) is Cmp.LT:
        return Cmp.LT
    if hi2 is not None and compare(e1.height, hi2) is Cmp.GT:
        return Cmp.GT
    return Cmp.UNKNOWN


# -- derivation traces -------------------------------------------------------------------


@dataclass(frozen=True)
class Step:
    relation: str  # "=", "<=", "<" to the previous step
    expr: str
    rule: str
    note: str = ""


@dataclass
class DerivationTrace:
    subject: str
    steps: list[Step] = field(default_factory=list)
    reconstructed: bool = False

    def add(self, relation: str, e: TowerExpr, rule: str, note: str = "") -> None:
        self.steps.append(Step(relation, render(e), rule, note))

    def render(self) -> str:
        lines = [self.subject + (" [reconstructed]" if self.reconstructed else "")]
        for k, s in enumerate(self.steps, 1):
            note = f"  ({s.note})" if s.note else ""
            lines.append(f"{k:3d}. {s.relation:>2} {s.expr:<40} [{s.rule}]{note}")
        return "\n".join(lines)

    def to_json(self) -> str:
        return json.dumps(
            {
                "subject": self.subject,
                "reconstructed": self.reconstructed,
                "steps": [vars(s) for s in self.steps],
            },
            indent=1,
        )

    def extend(self, other: "DerivationTrace") -> None:
        self.steps.extend(other.steps)
        self.reconstructed |= other.reconstructed


def _lin(a: int, m: TowerExpr, b: int) -> TowerExpr:
    """a*m + b, folded when m is a literal."""
    if isinstance(m, Nat):
        return Nat(a * m.value + b)
    e: TowerExpr = m if a == 1 else Prod(Nat(a), m)
    return e if b == 0 else Sum(Nat(b), e)


def absorb_sum(c: int, h: TowerExpr) -> TowerExpr:
    """Normal form bounding c + h from above; exact when h is a literal."""
    if isinstance(h, Nat):
        return Nat(h.value + c)
    if isinstance(h, Tet) and h.base == 2 and compare(Nat(c), h) is Cmp.LT:
        # c + 2^^k < 2^^(k+1) when c < 2^^k
        return Tet(2, absorb_sum(1, h.height))
    raise ValueError(f"cannot absorb {c} into {render(h)}")


def hj_step_bound(m: TowerExpr) -> tuple[TowerExpr, DerivationTrace]:
    """From HJ(t-1, 2, d) <= 2^^m, a bound 2^^2^^(m+3) on HJ(t, 2, d)."""
    if not is_normal(m):
        raise ValueError("m must be a normal form")
    tr = DerivationTrace(f"HJ(t,2,d) given HJ(t-1,2,d) <= {render(tet(2, m))}")
    two_m = tet(2, m)
    n_k = Prod(two_m, Call("f", (two_m, tet(2, _lin(2, m, 2)))))
    tr.add("<=", n_k, RULE_UNFOLD, "n f(n, 2^(t^n)) with n = HJ(t-1,2,d), 2^(t^n) <= 2^^(2m+2)")
    tr.add("<=", Prod(two_m, Tet(tet(2, _lin(2, m, 2)), Prod(Nat(2), two_m))), RULE_SHELAH, "f(l, k) < k^^(2l)")
    tr.add("<=", Prod(two_m, Tet(tet(2, _lin(2, m, 2)), tet(2, _lin(1, m, 1)))), RULE_PRODUCT, "2 * 2^^m < 2^^(m+1)")
    tr.add("<=", Prod(two_m, tet(2, Prod(_lin(2, m, 2), tet(2, _lin(1, m, 1))))), RULE_TET_OF_TET)
    tr.add("<=", Prod(two_m, tet(2, tet(2, _lin(1, m, 2)))), RULE_PRODUCT, "2m+2 < 2^^(m+1)")
    tr.add("<=", tet(2, Sum(Nat(1), tet(2, _lin(1, m, 2)))), RULE_PRODUCT, "2^^m < 2^^(2^^(m+2))")
    tr.add("<=", tet(2, tet(2, _lin(1, m, 3))), RULE_SUM, "1 + 2^^(m+2) < 2^^(m+3)")
    out = tet(2, tet(2, absorb_sum(3, m)))
    if tr.steps[-1].expr != render(out):
        tr.add("<", out, RULE_SUM, f"3 + {render(m)} < {render(out.height.height)}")
    return out, tr


def hj_2_2_bound(d: TowerExpr) -> tuple[int | TowerExpr, DerivationTrace]:
    """2^(2^(2d)) written as a tower 2^^m; returns m."""
    tr = DerivationTrace(f"HJ(2,2,{render(d)})")
    tr.add("<=", Pow(Nat(2), Pow(Nat(2), _lin(2, d, 0))), RULE_DOUBLE_EXP)
    if isinstance(d, Nat):
        two_d = 2 * d.value
        j = 0
        while tet_eval(2, j) < two_d:
            j += 1
        rel = "<" if tet_eval(2, j) > two_d else "="
        m = Nat(j + 2)
        tr.add(rel, tet(2, m), RULE_EXACT, f"{two_d} {rel} 2^^{j}")
        return m, tr
    if isinstance(d, Tet) and d.base == 2:
        # 2 * 2^^k < 2^^(k+1), then two more exponentials
        inner = Tet(2, absorb_sum(1, d.height))
        tr.add("<", Pow(Nat(2), Pow(Nat(2), inner)), RULE_PRODUCT, f"2 * {render(d)} < {render(inner)}")
        m = absorb_sum(2, inner.height)
        tr.add("=", tet(2, m), RULE_EXACT, "2^(2^^k) = 2^^(k+1)")
        return m, tr
    raise ValueError("unsupported d")


def hj_chain(d_seed: TowerExpr) -> tuple[TowerExpr, DerivationTrace]:
    """Bound on HJ(4, 2, d) from the doubly exponential HJ(2, 2, d) and two tower steps."""
    if d_seed == Nat(6):
        reconstructed = False
    elif d_seed == tet(2, 18):
        reconstructed = True
    else:
        raise ValueError("supported seeds are 6 and 2^^18")
    m, tr = hj_2_2_bound(d_seed)
    tr.subject = f"HJ(4,2,{render(d_seed)})"
    tr.reconstructed = reconstructed
    for t in (3, 4):
        out, sub = hj_step_bound(m)
        sub.steps.insert(0, Step("", f"HJ({t},2,{render(d_seed)})", RULE_HYPOTHESIS, f"HJ({t - 1},2,d) <= {render(tet(2, m))}"))
        tr.extend(sub)
        m = out.height
    return out, tr


def nk_bound(k: int) -> tuple[TowerExpr, DerivationTrace]:
    """Bound on n(k) from n(1) = 1 = 2^^0 and n(k+1) <= 2^(2^(2n(k))) <= 2^^(m+3)."""
    if k < 1:
        raise ValueError("k >= 1")
    tr = DerivationTrace(f"n({k})")
    tr.add("=", Nat(1), RULE_EXACT, "n(1) = 1 = 2^^0")
    m = 0
    exact = 1
    for j in range(2, k + 1):
        if exact is not None and 2 * exact <= 20:
            exact = 2 ** (2 ** (2 * exact))
        else:
            exact = None
        m += 3
        if exact is not None and exact == tet_eval(2, m):
            tr.add("<=", tet(2, m), RULE_EXACT, f"n({j}) <= 2^(2^(2n({j - 1}))) = {exact}")
        else:
            tr.add("<=", tet(2, m), RULE_UNFOLD, f"n({j}) <= 2^(2^(2n({j - 1}))) <= 2^(2^(2^n({j - 1})))")
    return (Nat(1) if k == 1 else tet(2, m)), tr


# -- Shelah's recursion --------------------------------------------------------------------


def shelah_f_exact(l: int, k: int, max_bits: int = MAX_BITS) -> int:
    """f(1, k) = k + 1, f(l + 1, k) = k^(f(l, k)^(2l)) + 1."""
    if l < 1 or k < 1:
        raise ValueError("need l >= 1 and k >= 1")
    f = k + 1
    for j in range(1, l):
        e_bits = 2 * j * math.log2(f)
        if e_bits > 64:
            raise OverflowError(f"f({j + 1},{k}) has about 2^{e_bits:.0f} bits")
        e = f ** (2 * j)
        if _pow_bits(k, e) > max_bits:
            raise OverflowError(f"f({j + 1},{k}) has about {_pow_bits(k, e):.3g} bits")
        f = k**e + 1
    return f


def shelah_f_bound(l: int, k: int) -> Tet:
    """f(l, k) < k^^(2l), valid when k > 2l."""
    if not k > 2 * l:
        raise ValueError(f"bound needs k > 2l, got l={l}, k={k}")
    return tet(k, 2 * l)


# -- rewrite rules checked on small values ---------------------------------------------------


def _parenthesizations(a: int, count: int, max_bits: int):
    """Values of a^a^...^a (count a's) under every parenthesization; None when too large."""
    if count == 1:
        return [a]
    out = []
    for split in range(1, count):
        for x in _parenthesizations(a, split, max_bits):
            for y in _parenthesizations(a, count - split, max_bits):
                if x is None or y is None or _pow_bits(x, y) > max_bits:
                    out.append(None)
                else:
                    out.append(x**y)
    return out


@dataclass(frozen=True)
class BulletReport:
    rule: str
    checked: int
    skipped: int
    failures: tuple

    @property
    def ok(self) -> bool:
        return not self.failures and self.checked > 0


def verify_rewrite_rules(max_bits: int = MAX_BITS) -> list[BulletReport]:
    reports = []
    # parenthesization: the right-nested tower is largest
    checked = skipped = 0
    fails = []
    for a in (2, 3, 4):
        for count in range(1, 6):
            top = tet_value(a, count, max_bits)
            vals = _parenthesizations(a, count, max_bits)
            for v in vals:
                if v is None or top is None:
                    skipped += 1
                    continue
                checked += 1
                if v > top:
                    fails.append((a, count, v))
    reports.append(BulletReport(RULE_PAREN, checked, skipped, tuple(fails)))

    checked = skipped = 0
    fails = []
    for a in (2, 3):
        for b in (1, 2, 3):
            for c in (1, 2, 3):
                inner = tet_value(a, b, max_bits)
                lhs = None if inner is None or inner > max_bits else tet_value(inner, c, max_bits) if inner >= 2 else 1
                rhs = tet_value(a, b * c, max_bits)
                if lhs is None or rhs is None:
                    skipped += 1
                    continue
                checked += 1
                if lhs > rhs:
                    fails.append((a, b, c))
    reports.append(BulletReport(RULE_TET_OF_TET, checked, skipped, tuple(fails)))

    for rule, op in ((RULE_PRODUCT, lambda a, t: a * t), (RULE_SUM, lambda a, t: a + t)):
        checked = 0
        fails = []
        for k in range(1, 5):
            t, nxt = tet_eval(2, k), tet_eval(2, k + 1)
            if rule == RULE_PRODUCT:
                checked += 1
                if t * t > nxt:
                    fails.append((k, "square"))
            else:
                checked += 1
                if 2 * t > nxt:
                    fails.append((k, "double"))
            # both sides increase with a, so the largest a decides; small a checked too
            cands = range(t) if t <= 1 << 16 else (0, 1, 2, t // 2, t - 1)
            for a in cands:
                checked += 1
                if not op(a, t) < nxt:
                    fails.append((k, a))
        reports.append(BulletReport(rule, checked, 0, tuple(fails)))
    return reports
