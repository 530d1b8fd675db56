"""Text form of expressions.

Grammar::

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := base ('^' rational)?
    base   := rational | symbol | '(' expr ')' | func '(' expr ')'
    func   := 'exp' | 'ln' | 'arctan' | 'sqrt'

A rational literal after ``^`` is read greedily, so ``x^2/3`` is
``x**(2/3)``.  The printer never emits an integer exponent followed by
``/digit``.  The reader also accepts a leading unary minus and a
parenthesized exponent; the printer emits neither.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

import sympy as sp

from .symbolic import EPS, jet, normalize, symbol_sort_key

FUNCS = {"exp": sp.exp, "ln": sp.log, "arctan": sp.atan, "sqrt": sp.sqrt}
_FUNC_NAMES = {sp.exp: "exp", sp.log: "ln", sp.atan: "arctan"}

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9_]*)|(.))")


class ParseError(ValueError):
    def __init__(self, msg: str, text: str, pos: int):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{msg} at line {line}, column {col}")
        self.line = line
        self.column = col


@dataclass
class _Tok:
    kind: str  # num | name | op | end
    value: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m.group(0).strip() == "":
            break
        start = m.start(m.lastindex)
        if m.group(1):
            toks.append(_Tok("num", m.group(1), start))
        elif m.group(2):
            toks.append(_Tok("name", m.group(2), start))
        else:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ParseError(f"unexpected character {ch!r}", text, start)
            toks.append(_Tok("op", ch, start))
        pos = m.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


def make_symbol(name: str) -> sp.Symbol:
    if name == "eps":
        return EPS
    if name.startswith("u_") and set(name[2:]) <= {"x", "t"} and name[2:]:
        return jet(name[2:])
    return sp.Symbol(name)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg: str):
        raise ParseError(msg, self.text, self.tok.pos)

    def take(self, value: str | None = None) -> _Tok:
        tok = self.tok
        if value is not None and tok.value != value:
            self.error(f"expected {value!r}, found {tok.value or 'end of input'!r}")
        self.i += 1
        return tok

    def at(self, *values: str) -> bool:
        return self.tok.kind == "op" and self.tok.value in values

    def parse(self):
        e = self.expr()
        if self.tok.kind != "end":
            self.error(f"unexpected {self.tok.value!r}")
        return e

    def expr(self):
        if self.at("-"):
            self.take()
            acc = -self.term()
        else:
            acc = self.term()
        while self.at("+", "-"):
            op = self.take().value
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term(self):
        acc = self.factor()
        while self.at("*", "/"):
            op = self.take().value
            rhs = self.factor()
            acc = acc * rhs if op == "*" else acc / rhs
        return acc

    def factor(self):
        base = self.base()
        if self.at("^"):
            self.take()
            base = sp.Pow(base, self.exponent())
        return base

    def exponent(self):
        if self.at("("):
            self.take()
            q = self.rational(signed=True)
            self.take(")")
            return q
        return self.rational(signed=True)

    def rational(self, signed: bool = False):
        sign = 1
        if signed and self.at("-"):
            self.take()
            sign = -1
        if self.tok.kind != "num":
            self.error("expected a rational literal")
        p = int(self.take().value)
        q = 1
        if self.at("/") and self.toks[self.i + 1].kind == "num":
            self.take()
            q = int(self.take().value)
            if q == 0:
                self.error("zero denominator")
        return sp.Rational(sign * p, q)

    def base(self):
        tok = self.tok
        if tok.kind == "num":
            return sp.Integer(int(self.take().value))
        if tok.kind == "name":
            self.take()
            if tok.value in FUNCS and self.at("("):
                self.take()
                arg = self.expr()
                self.take(")")
                return FUNCS[tok.value](arg)
            return make_symbol(tok.value)
        if self.at("("):
            self.take()
            e = self.expr()
            self.take(")")
            return e
        self.error(f"unexpected {tok.value or 'end of input'!r}")


def parse(text: str):
    """Parse expression text into a (non-normalized) sympy expression."""
    return _Parser(text).parse()


# -- printer -----------------------------------------------------------------

def _rational_text(q: sp.Rational) -> str:
    return str(q.p) if q.q == 1 else f"{q.p}/{q.q}"


def _base_exp(f):
    if isinstance(f, sp.Pow):
        return f.base, f.exp
    return f, sp.Integer(1)


def _factor_key(f):
    base, _ = _base_exp(f)
    if isinstance(base, sp.Symbol):
        return (0, symbol_sort_key(base))
    return (1, (0, 0, _atom_text(base)))


def _atom_text(f) -> str:
    """A factor as ``base`` or ``base^rational`` with a positive exponent."""
    if isinstance(f, sp.Symbol):
        return f.name
    if f is sp.E:
        return "exp(1)"
    if f.is_Integer and f > 0:
        return str(f)
    if isinstance(f, tuple(_FUNC_NAMES)):
        return f"{_FUNC_NAMES[f.func]}({_text(f.args[0])})"
    if isinstance(f, sp.Pow):
        base, e = f.base, f.exp
        if e == sp.Rational(1, 2):
            return f"sqrt({_text(base)})"
        inner = _atom_text(base) if _is_plain_base(base) else f"({_text(base)})"
        return f"{inner}^{_rational_text(e)}"
    if f.is_Atom or not (f.is_Add or f.is_Mul):
        raise ValueError(f"no text form for {f!r}")
    return f"({_text(f)})"


def _is_plain_base(b) -> bool:
    return isinstance(b, sp.Symbol) or isinstance(b, tuple(_FUNC_NAMES)) or (b.is_Integer and b > 0)


def _monomial_key(term):
    powers = {}
    for f in sp.Mul.make_args(term):
        if f.is_Number:
            continue
        b, e = _base_exp(f)
        powers[b] = powers.get(b, 0) + e
    syms = sorted((s for s in powers if isinstance(s, sp.Symbol)), key=symbol_sort_key)
    sym_part = tuple((symbol_sort_key(s), -powers[s]) for s in syms)
    other = tuple(sorted(_atom_text(b) for b in powers if not isinstance(b, sp.Symbol)))
    return (sym_part, other)


def _term_text(term, first: bool) -> tuple[str, str]:
    """Return (sign, text) for a monomial-like term."""
    coeff, rest = term.as_coeff_Mul()
    sign = "-" if coeff < 0 else "+"
    coeff = abs(coeff)
    num_f, den_f = [], []
    for f in sp.Mul.make_args(rest):
        if f == 1:
            continue
        b, e = _base_exp(f)
        if e.is_Rational and e < 0:
            den_f.append(sp.Pow(b, -e))
        else:
            num_f.append(f)
    num_f.sort(key=_factor_key)
    den_f.sort(key=_factor_key)
    parts = []
    if coeff.q != 1:
        parts.append(_rational_text(coeff))
    elif coeff != 1 or not num_f:
        parts.append(str(coeff.p))
    parts += [_atom_text(f) for f in num_f]
    text = "*".join(parts)
    if den_f:
        text += "".join("/" + _atom_text(f) for f in den_f)
    if first and sign == "-":
        # leading sign is carried by a signed literal: -1*x, -3/2*x
        if parts and parts[0][0].isdigit() and (coeff != 1 or not num_f):
            return "+", "-" + text
        return "+", "-1*" + text
    return sign, text


def _sum_text(e) -> str:
    terms = sorted(sp.Add.make_args(e), key=_monomial_key)
    out = []
    for i, term in enumerate(terms):
        sign, text = _term_text(term, first=(i == 0))
        if i == 0:
            out.append(text)
        else:
            out.append(f" {sign} {text}")
    return "".join(out)


def _text(e) -> str:
    e = sp.sympify(e)
    num, den = sp.fraction(e)
    if den == 1:
        return _sum_text(num)
    if den.is_Number:
        # rational coefficients are folded into each term
        return _sum_text(sp.expand(e)) if num.is_Add else _sum_text(e)
    num_text = _sum_text(num)
    if num.is_Add:
        num_text = f"({num_text})"
    den_text = _sum_text(den)
    if den.is_Add or den.is_Mul or not _is_plain_den(den):
        den_text = f"({den_text})"
    return f"{num_text}/{den_text}"


def _is_plain_den(den) -> bool:
    if isinstance(den, sp.Symbol) or isinstance(den, tuple(_FUNC_NAMES)):
        return True
    if isinstance(den, sp.Pow):
        if den.exp == sp.Rational(1, 2):
            return True
        return _is_plain_base(den.base) and den.exp.is_Rational and den.exp > 0
    return False


def to_text(e, canonical: bool = True) -> str:
    """Print ``e`` in the expression grammar (normalized first by default)."""
    if canonical:
        e = normalize(e)
    return _text(e)
