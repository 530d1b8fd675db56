"""One-dimensional optimal system by a fixed pivot ladder.

A nonzero element ``w = sum a_i v_i`` is reduced by scaling and by adjoint
maps ``Ad(exp(mu*v_i))``, case by case on the first nonzero pivot among
``a10, a9, a4, a3, a5, a1, a2, a6, a7, a8``.  Every applied map is recorded
so that the reduction can be replayed exactly.
"""
from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import sympy as sp

from . import reference
from .adjoint import AdjointMatrix, ExpPoly
from .grammar import parse, to_text
from .symbolic import as_fraction, as_rational


class ConsistencyError(RuntimeError):
    pass


COEFF_SYMBOLS = tuple(sp.Symbol(f"a{i}") for i in range(1, 11))


# -- exact evaluation of adjoint entries -------------------------------------

def _log_form(mu):
    """``[(c, q), ...]`` with ``mu = sum c*ln(q)``, or None."""
    out = []
    for term in sp.Add.make_args(mu):
        c, rest = term.as_coeff_Mul()
        if not (isinstance(rest, sp.log) and rest.args[0].is_Rational and c.is_Rational):
            return None
        out.append((as_fraction(c), as_fraction(rest.args[0])))
    return out


def _rational_power(q: Fraction, e: Fraction) -> Fraction:
    root = sp.Rational(q.numerator, q.denominator) ** as_rational(e)
    if not root.is_Rational:
        raise ValueError("irrational adjoint entry")
    return as_fraction(root)


def entry_value(entry: ExpPoly, mu) -> Fraction:
    """Rational value of an entry at ``mu``; ``mu`` rational or a sum of ``c*ln(q)``."""
    mu = sp.sympify(mu)
    if mu.is_Rational:
        val = entry.at(as_fraction(mu))
        if any(k != 0 for k in val.terms):
            raise ValueError("irrational adjoint entry")
        return val.terms.get(Fraction(0), Fraction(0))
    form = _log_form(mu)
    if form is None:
        raise ValueError(f"unsupported parameter {mu}")
    total = Fraction(0)
    for lam, p in entry.terms:
        if len(p) > 1:
            raise ValueError("logarithmic parameter on a non-semisimple block")
        factor = Fraction(1)
        for c, q in form:
            factor *= _rational_power(q, lam * c)
        total += p[0] * factor
    return total


def act(m: AdjointMatrix, mu, w: Sequence[Fraction]) -> list[Fraction]:
    n = len(w)
    out = [Fraction(0)] * n
    for j in range(n):
        if not w[j]:
            continue
        for k in range(n):
            e = m.entries[j][k]
            if e:
                out[k] += w[j] * entry_value(e, mu)
    return out


# -- traces ---------------------------------------------------------------------

@dataclass
class Step:
    generator: int  # 0-based
    mu: sp.Expr

    def text(self) -> str:
        return f"ad v{self.generator + 1} {to_text(self.mu)}"


@dataclass
class ReductionTrace:
    scale: Fraction = Fraction(1)
    steps: list[Step] = field(default_factory=list)

    def script(self) -> str:
        lines = [f"scale {self.scale}"] + [s.text() for s in self.steps]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_script(cls, text: str) -> "ReductionTrace":
        trace = cls()
        for line in text.splitlines():
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("scale "):
                trace.scale *= Fraction(line.split(None, 1)[1])
                continue
            m = re.fullmatch(r"ad\s+v(\d+)\s+(.+)", line)
            if not m:
                raise ValueError(f"bad trace line {line!r}")
            trace.steps.append(Step(int(m.group(1)) - 1, parse(m.group(2))))
        return trace


def replay(trace: ReductionTrace, w: Sequence, adjoints: Sequence[AdjointMatrix]) -> list[Fraction]:
    cur = [Fraction(x) * trace.scale for x in w]
    for step in trace.steps:
        cur = act(adjoints[step.generator], step.mu, cur)
    return cur


# -- the ladder -----------------------------------------------------------------

@dataclass(frozen=True)
class Kill:
    """``Ad(exp(mu*v_gen))`` with ``mu`` given in terms of ``a1..a10``; zeroes ``target``."""

    generator: int
    mu: str
    target: int


@dataclass(frozen=True)
class SignFix:
    """``Ad(exp(mu*v_gen))`` rescaling ``target`` by ``exp(rate*mu)`` to a sign."""

    generator: int
    target: int
    rate: int


@dataclass(frozen=True)
class Case:
    pivot: int
    steps: tuple


def _v(i):
    return i - 1


LADDER = (
    Case(_v(10), (Kill(_v(1), "a8/2", _v(8)),)),
    Case(_v(9), (Kill(_v(2), "a7/3", _v(7)), SignFix(_v(4), _v(2), 3))),
    Case(_v(4), (Kill(_v(2), "a2/3", _v(2)), Kill(_v(7), "a7/3", _v(7)))),
    Case(_v(3), (Kill(_v(6), "a6", _v(6)),)),
    Case(_v(5), (Kill(_v(6), "a8/2", _v(8)),)),
    Case(_v(1), (Kill(_v(8), "-1*a6", _v(6)), Kill(_v(10), "-1*a8/2", _v(8)))),
    Case(_v(2), (Kill(_v(9), "-1*a7/3", _v(7)), SignFix(_v(3), _v(6), 1))),
    Case(_v(6), (SignFix(_v(4), _v(7), 3),)),
    Case(_v(7), ()),
    Case(_v(8), ()),
)


@dataclass(frozen=True)
class Family:
    """Template: fixed coordinates (others zero) plus free coordinates."""

    ident: int
    fixed: tuple  # ((index, value), ...)
    free: tuple  # indices

    def matches(self, w: Sequence[Fraction]) -> bool:
        fixed = dict(self.fixed)
        for i, x in enumerate(w):
            if i in self.free:
                continue
            if x != fixed.get(i, 0):
                return False
        return True

    def text(self) -> str:
        names = iter("abcdefgh")
        parts = []
        for i in range(10):
            if i in self.free:
                parts.append(f"{next(names)}*v{i + 1}")
            elif dict(self.fixed).get(i):
                val = dict(self.fixed)[i]
                parts.append(("-" if val < 0 else "") + f"v{i + 1}")
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out

    def instance(self, params: Sequence) -> list[Fraction]:
        w = [Fraction(0)] * 10
        for i, val in self.fixed:
            w[i] = Fraction(val)
        for i, val in zip(self.free, params):
            w[i] = Fraction(val)
        return w


def _family(ident, fixed: dict, free):
    return Family(ident, tuple(sorted((_v(k), v) for k, v in fixed.items())),
                  tuple(_v(k) for k in free))


FAMILIES = (
    _family(1, {8: 1}, ()),
    _family(2, {7: 1}, (8,)),
    _family(3, {6: 1}, (8,)),
    _family(4, {6: 1, 7: -1}, (8,)),
    _family(5, {6: 1, 7: 1}, (8,)),
    _family(6, {2: 1}, (8,)),
    _family(7, {2: 1, 6: -1}, (8,)),
    _family(8, {2: 1, 6: 1}, (8,)),
    _family(9, {1: 1}, (2, 7)),
    _family(10, {5: 1}, (1, 2, 6, 7)),
    _family(11, {3: 1}, (1, 2, 5, 7, 8)),
    _family(12, {4: 1}, (1, 3, 5, 6, 8)),
    _family(13, {9: 1}, (1, 3, 4, 5, 6, 8)),
    _family(14, {9: 1, 2: -1}, (1, 3, 4, 5, 6, 8)),
    _family(15, {9: 1, 2: 1}, (1, 3, 4, 5, 6, 8)),
    _family(17, {10: 1}, (1, 2, 3, 4, 5, 6, 7, 9)),
)


@dataclass
class Representative:
    family: int
    params: dict
    vector: list[Fraction]

    def text(self) -> str:
        parts = []
        for i, x in enumerate(self.vector):
            if not x:
                continue
            mag = abs(x)
            body = f"v{i + 1}" if mag == 1 else f"{mag}*v{i + 1}"
            parts.append((x < 0, body))
        out = ("-" if parts[0][0] else "") + parts[0][1]
        for neg, body in parts[1:]:
            out += f" {'-' if neg else '+'} {body}"
        return out


def match_family(w: Sequence[Fraction]) -> Family:
    found = [f for f in FAMILIES if f.matches(w)]
    if len(found) != 1:
        raise ConsistencyError(f"no family matched {list(map(str, w))}" if not found
                               else f"ambiguous families {[f.ident for f in found]}")
    return found[0]


def _mu_value(formula: str, w: Sequence[Fraction]):
    bindings = {s: as_rational(x) for s, x in zip(COEFF_SYMBOLS, w)}
    return sp.sympify(parse(formula)).xreplace(bindings)


def normalize_vector(w: Sequence, adjoints: Sequence[AdjointMatrix]) -> tuple[Representative, ReductionTrace]:
    w = [Fraction(x) for x in w]
    if not any(w):
        raise ValueError("zero vector")
    case = next(c for c in LADDER if w[c.pivot])
    trace = ReductionTrace(scale=1 / w[case.pivot])
    cur = [x * trace.scale for x in w]
    for step in case.steps:
        if isinstance(step, Kill):
            mu = _mu_value(step.mu, cur)
            if mu == 0:
                continue
            nxt = act(adjoints[step.generator], mu, cur)
            if nxt[step.target]:
                raise ConsistencyError(f"step Ad(exp({mu}*v{step.generator + 1})) "
                                       f"did not clear a{step.target + 1}")
        else:
            a = cur[step.target]
            if a == 0 or abs(a) == 1:
                continue
            mu = -sp.log(as_rational(abs(a))) / step.rate
            nxt = act(adjoints[step.generator], mu, cur)
        trace.steps.append(Step(step.generator, sp.sympify(mu)))
        cur = nxt
    fam = match_family(cur)
    names = iter("abcdefgh")
    params = {next(names): cur[i] for i in fam.free}
    return Representative(fam.ident, params, cur), trace


def classify(w: Sequence, adjoints: Sequence[AdjointMatrix]) -> int:
    return normalize_vector(w, adjoints)[0].family


def random_vector(rng: random.Random, low: int = -9, high: int = 9) -> list[Fraction]:
    while True:
        w = [Fraction(rng.randint(low, high)) for _ in range(10)]
        if any(w):
            return w


@dataclass
class AuditRow:
    ident: int
    published: str
    reached: int
    fixed_point: bool
    derived: str


@dataclass
class AuditReport:
    rows: list[AuditRow]
    duplicates: list[tuple[int, int]]
    unlisted: list[int]


def audit_table(adjoints: Sequence[AdjointMatrix], seed: int = 0, samples: int = 5) -> AuditReport:
    """Classify random instances of each published family.

    A family is a fixed point when every sampled instance is returned
    unchanged by the ladder.
    """
    rng = random.Random(seed)
    rows = []
    reached_by = {}
    for k, text in enumerate(reference.OPTIMAL, start=1):
        coeffs = reference.combination(text)
        params = sorted(set().union(*(c.free_symbols for c in coeffs)), key=str)
        fixed = True
        reached = set()
        for _ in range(samples):
            bind = {p: sp.Rational(rng.randint(-9, 9) or 1, rng.randint(1, 4)) for p in params}
            w = [as_fraction(c.xreplace(bind)) for c in coeffs]
            rep, _ = normalize_vector(w, adjoints)
            reached.add(rep.family)
            fixed = fixed and rep.vector == w
        ident = min(reached)
        derived = next(f for f in FAMILIES if f.ident == ident).text()
        rows.append(AuditRow(k, text, ident if len(reached) == 1 else -1, fixed, derived))
        reached_by.setdefault(frozenset(reached), []).append(k)
    dups = []
    texts = [r.published.replace(" ", "") for r in rows]
    for i in range(len(rows)):
        for j in range(i + 1, len(rows)):
            same_text = texts[i] == texts[j]
            same_family = rows[i].reached == rows[j].reached and rows[i].reached != -1
            if same_text or same_family:
                dups.append((rows[i].ident, rows[j].ident))
    listed = {r.reached for r in rows}
    unlisted = [f.ident for f in FAMILIES if f.ident not in listed]
    return AuditReport(rows, dups, unlisted)
