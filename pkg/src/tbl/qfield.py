"""Exact arithmetic in Q(q, r).

Elements are reduced fractions of polynomials over Q in the two
indeterminates ``q`` and ``r``.  Laurent monomials such as ``q^-1`` are
stored as fractions with a monomial denominator, so a single canonical
form covers both the Laurent ring and its fraction field:

* numerator and denominator are coprime,
* the leading coefficient of the denominator (graded lex, ``q > r``) is 1,
* zero is ``0/1``.

Equality is therefore structural.  Polynomial arithmetic and gcds are
delegated to FLINT (``python-flint``).
"""
from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Tuple, Union

import flint

CTX = flint.fmpq_mpoly_ctx.get(("q", "r"), "deglex")
_Q, _R = CTX.gens()
_ZERO = CTX.constant(0)
_ONE = CTX.constant(1)

Scalar = Union["RatFunc", int, Fraction]
LaurentDict = Dict[Tuple[int, int], Fraction]


def _fmpq(x) -> flint.fmpq:
    if isinstance(x, Fraction):
        return flint.fmpq(x.numerator, x.denominator)
    return flint.fmpq(x)


def _to_fraction(x: flint.fmpq) -> Fraction:
    return Fraction(int(x.p), int(x.q))


class RatFunc:
    """A normalized element of Q(q, r).  Immutable."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num=None, den=None, *, _reduced: bool = False):
        if num is None:
            num = _ZERO
        elif not isinstance(num, flint.fmpq_mpoly):
            num = CTX.constant(_fmpq(num))
        if den is None:
            den = _ONE
        elif not isinstance(den, flint.fmpq_mpoly):
            den = CTX.constant(_fmpq(den))
        if not _reduced:
            if den.is_zero():
                raise ZeroDivisionError("rational function with zero denominator")
            if num.is_zero():
                den = _ONE
            else:
                g = num.gcd(den)
                if not g.is_one():
                    num = num / g
                    den = den / g
                lc = den.leading_coefficient()
                if lc != 1:
                    num = num / lc
                    den = den / lc
        self.num = num
        self.den = den
        self._hash = None

    # constructors -------------------------------------------------------
    @classmethod
    def q(cls, power: int = 1) -> "RatFunc":
        return cls.monomial(1, power, 0)

    @classmethod
    def r(cls, power: int = 1) -> "RatFunc":
        return cls.monomial(1, 0, power)

    @classmethod
    def monomial(cls, coeff, deg_q: int, deg_r: int) -> "RatFunc":
        c = _fmpq(coeff)
        if c == 0:
            return ZERO
        top = CTX.from_dict({(max(deg_q, 0), max(deg_r, 0)): c})
        bottom = CTX.from_dict({(max(-deg_q, 0), max(-deg_r, 0)): 1})
        return cls(top, bottom, _reduced=True)

    @classmethod
    def from_laurent(cls, terms: LaurentDict) -> "RatFunc":
        out = ZERO
        for (a, b), c in terms.items():
            out = out + cls.monomial(c, a, b)
        return out

    @classmethod
    def coerce(cls, x: Scalar) -> "RatFunc":
        if isinstance(x, RatFunc):
            return x
        if isinstance(x, (int, Fraction)):
            return cls(x)
        raise TypeError(f"cannot interpret {x!r} as a rational function")

    # predicates ---------------------------------------------------------
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self.num.is_one() and self.den.is_one()

    def has_r(self) -> bool:
        return self.num.degrees()[1] > 0 or self.den.degrees()[1] > 0

    def is_laurent(self) -> bool:
        """True if the denominator is a monomial."""
        return len(self.den.to_dict()) == 1

    def complexity(self) -> int:
        """Number of stored terms; used as a pivot heuristic."""
        return len(self.num.to_dict()) + len(self.den.to_dict())

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, RatFunc):
            if isinstance(other, (int, Fraction)):
                other = RatFunc(other)
            else:
                return NotImplemented
        if other.num.is_zero():
            return self
        if self.num.is_zero():
            return other
        if self.den == other.den:
            return RatFunc(self.num + other.num, self.den)
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den, _reduced=True)

    def __sub__(self, other):
        if not isinstance(other, RatFunc):
            if isinstance(other, (int, Fraction)):
                other = RatFunc(other)
            else:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, RatFunc):
            if isinstance(other, (int, Fraction)):
                if other == 0:
                    return ZERO
                return RatFunc(self.num * _fmpq(other), self.den, _reduced=True)
            return NotImplemented
        if self.num.is_zero() or other.num.is_zero():
            return ZERO
        if self.den.is_one() and other.den.is_one():
            return RatFunc(self.num * other.num, _ONE, _reduced=True)
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inv(self) -> "RatFunc":
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(q, r)")
        return RatFunc(self.den, self.num)

    def __truediv__(self, other):
        if not isinstance(other, RatFunc):
            if isinstance(other, (int, Fraction)):
                if other == 0:
                    raise ZeroDivisionError("division by zero in Q(q, r)")
                return RatFunc(self.num / _fmpq(other), self.den, _reduced=True)
            return NotImplemented
        if other.num.is_zero():
            raise ZeroDivisionError("division by zero in Q(q, r)")
        return RatFunc(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return RatFunc.coerce(other) * self.inv()

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.inv() ** (-e)
        return RatFunc(self.num ** e, self.den ** e, _reduced=True)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = RatFunc(other)
        if not isinstance(other, RatFunc):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __ne__(self, other):
        res = self.__eq__(other)
        return res if res is NotImplemented else not res

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((tuple(sorted(self.num.to_dict().items())),
                               tuple(sorted(self.den.to_dict().items()))))
        return self._hash

    def __bool__(self):
        return not self.num.is_zero()

    # substitutions ------------------------------------------------------
    def specialize_r(self, m: int) -> "RatFunc":
        return specialize_r(self, m)

    def bar(self) -> "RatFunc":
        """Image under q -> q^-1 (r fixed)."""
        n, d = _bar_poly(self.num), _bar_poly(self.den)
        return RatFunc(n[0] * d[1], n[1] * d[0])

    def evaluate(self, q_value, r_value=None) -> Fraction:
        """Exact value at rational ``q`` (and ``r``)."""
        if r_value is None:
            if self.has_r():
                raise ValueError("r must be given for a function of r")
            r_value = 0
        qv, rv = _fmpq(q_value), _fmpq(r_value)
        d = self.den(qv, rv)
        if d == 0:
            raise ZeroDivisionError(f"denominator vanishes at q={q_value}")
        return _to_fraction(self.num(qv, rv) / d)

    def eval_mod(self, q_value: int, p: int, r_value: int | None = None) -> int:
        """Image in GF(p) under q -> q_value (r -> r_value)."""
        n = _poly_mod(self.num, q_value, r_value, p)
        d = _poly_mod(self.den, q_value, r_value, p)
        if d == 0:
            raise ZeroDivisionError("denominator vanishes mod p")
        return n * pow(d, p - 2, p) % p

    # views --------------------------------------------------------------
    def as_laurent(self) -> LaurentDict | None:
        """Exponent map if this is a Laurent polynomial, else ``None``."""
        dd = self.den.to_dict()
        if len(dd) != 1:
            return None
        ((sq, sr), c), = dd.items()
        return {(a - sq, b - sr): _to_fraction(v / c)
                for (a, b), v in self.num.to_dict().items()}

    def q_degree_span(self) -> Tuple[int, int]:
        """(lowest, highest) q-exponent of a Laurent polynomial."""
        lp = self.as_laurent()
        if lp is None:
            raise ValueError("not a Laurent polynomial")
        if not lp:
            return (0, 0)
        exps = [a for a, _ in lp]
        return (min(exps), max(exps))

    def r_degree_span(self) -> Tuple[int, int]:
        """(lowest, highest) r-exponent of the numerator minus that of the denominator."""
        nd = [b for _, b in self.num.to_dict()] or [0]
        dd = [b for _, b in self.den.to_dict()]
        return (min(nd) - max(dd), max(nd) - min(dd))

    def __str__(self):
        return to_string(self)

    def __repr__(self):
        return f"RatFunc({to_string(self)!r})"


def _bar_poly(p: flint.fmpq_mpoly):
    """Return (num, den) of p(q^-1, r) as polynomials."""
    d = p.to_dict()
    if not d:
        return _ZERO, _ONE
    top = max(a for a, _ in d)
    num = CTX.from_dict({(top - a, b): c for (a, b), c in d.items()})
    return num, CTX.from_dict({(top, 0): 1})


def _poly_mod(p: flint.fmpq_mpoly, qv: int, rv: int | None, mod: int) -> int:
    total = 0
    for (a, b), c in p.to_dict().items():
        if b and rv is None:
            raise ValueError("r must be given for a function of r")
        cn = int(c.p) % mod * pow(int(c.q), mod - 2, mod)
        term = cn * pow(qv, a, mod)
        if b:
            term *= pow(rv, b, mod)
        total += term
    return total % mod


ZERO = RatFunc(_ZERO, _ONE, _reduced=True)
ONE = RatFunc(_ONE, _ONE, _reduced=True)
Q = RatFunc.q()
R = RatFunc.r()


# ---------------------------------------------------------------------------
# quantum numbers and named parameters

@lru_cache(maxsize=None)
def quantum_int(n: int) -> RatFunc:
    """[n] = (q^n - q^-n)/(q - q^-1) = q^(n-1) + q^(n-3) + ... + q^(1-n)."""
    if n < 0:
        return -quantum_int(-n)
    return RatFunc.from_laurent({(n - 1 - 2 * j, 0): Fraction(1) for j in range(n)})


@lru_cache(maxsize=None)
def quantum_factorial(n: int) -> RatFunc:
    if n < 0:
        raise ValueError("quantum_factorial needs n >= 0")
    out = ONE
    for k in range(1, n + 1):
        out = out * quantum_int(k)
    return out


DELTA = Q - Q.inv()  # q - q^-1


@lru_cache(maxsize=None)
def x_param() -> RatFunc:
    """The loop value x = 1 + (r - r^-1)/(q - q^-1)."""
    return ONE + (R - R.inv()) / DELTA


def r_value(m: int) -> RatFunc:
    """The symplectic specialization r = -q^(2m+1)."""
    return RatFunc.monomial(-1, 2 * m + 1, 0)


def specialize_r(f: RatFunc, m: int) -> RatFunc:
    """Ring homomorphism Q(q, r) -> Q(q), r -> -q^(2m+1)."""
    if m < 1:
        raise ValueError("specialization index m must be positive")
    if not f.has_r():
        return f
    image = -_Q ** (2 * m + 1)
    num = f.num.compose(_Q, image)
    den = f.den.compose(_Q, image)
    if den.is_zero():
        raise ZeroDivisionError(f"denominator {to_string(RatFunc(f.den))} vanishes at r = -q^{2 * m + 1}")
    return RatFunc(num, den)


def substitute_r(f: RatFunc, r_image: RatFunc) -> RatFunc:
    """Substitute an arbitrary element of Q(q) for r."""
    if not f.has_r():
        return f
    # evaluate num and den as polynomials in r with Q[q] coefficients
    def ev(p):
        out = ZERO
        for (a, b), c in p.to_dict().items():
            out = out + RatFunc.monomial(_to_fraction(c), int(a), 0) * r_image ** int(b)
        return out
    den = ev(f.den)
    if den.is_zero():
        raise ZeroDivisionError("denominator vanishes under the substitution")
    return ev(f.num) / den


def limit_q1(f: RatFunc) -> Fraction:
    """Exact limit at q = 1 of a function of q alone."""
    if f.has_r():
        raise ValueError("limit_q1 expects a function of q only")
    num, den = f.num, f.den
    qm1 = _Q - 1
    one = {"q": 1}

    def strip(p):
        k = 0
        while not p.is_zero() and p.subs(one).is_zero():
            p = p / qm1
            k += 1
        return p, k

    num, kn = strip(num)
    den, kd = strip(den)
    if kd > kn:
        raise ZeroDivisionError("pole at q = 1")
    if kn > kd or num.is_zero():
        return Fraction(0)
    return _to_fraction(num.subs(one).leading_coefficient() / den.subs(one).leading_coefficient())


# ---------------------------------------------------------------------------
# text form

def _mono_str(c: Fraction, a: int, b: int, first: bool) -> str:
    sign = "-" if c < 0 else ("" if first else "+")
    c = abs(c)
    parts = []
    if a:
        parts.append("q" if a == 1 else f"q^{a}")
    if b:
        parts.append("r" if b == 1 else f"r^{b}")
    if c != 1 or not parts:
        parts.insert(0, str(c))
    body = "*".join(parts)
    if first:
        return sign + body
    return f" {sign} {body}"


def _terms_str(terms: LaurentDict) -> str:
    if not terms:
        return "0"
    keys = sorted(terms, key=lambda ab: (ab[0] + ab[1], ab[0]), reverse=True)
    return "".join(_mono_str(terms[k], k[0], k[1], i == 0) for i, k in enumerate(keys))


def _poly_terms(p: flint.fmpq_mpoly) -> LaurentDict:
    return {k: _to_fraction(v) for k, v in p.to_dict().items()}


def to_string(f: RatFunc) -> str:
    """Render as ``c*q^a*r^b`` monomials; non-Laurent values as ``(num)/(den)``."""
    lp = f.as_laurent()
    if lp is not None:
        return _terms_str(lp)
    return f"({_terms_str(_poly_terms(f.num))})/({_terms_str(_poly_terms(f.den))})"


_TOKEN = re.compile(r"\s*(?:(\d+)|([qr])|(\*\*|[-+*/^()]))")


class ScalarParseError(ValueError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} at offset {pos}")
        self.pos = pos


def parse_ratfunc(text: str) -> RatFunc:
    """Parse the text form produced by :func:`to_string` (and ordinary
    arithmetic expressions in q and r)."""
    toks = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        mt = _TOKEN.match(text, pos)
        if not mt or mt.end() == pos:
            raise ScalarParseError(f"unexpected character {text[pos]!r}", pos)
        num, var, op = mt.groups()
        start = mt.start(mt.lastindex)
        if num is not None:
            toks.append(("num", int(num), start))
        elif var is not None:
            toks.append(("var", var, start))
        else:
            toks.append(("op", "^" if op == "**" else op, start))
        pos = mt.end()
    toks.append(("end", None, len(text)))
    i = 0

    def peek():
        return toks[i]

    def take():
        nonlocal i
        t = toks[i]
        i += 1
        return t

    def expr():
        val = term()
        while peek()[0] == "op" and peek()[1] in "+-":
            op = take()[1]
            rhs = term()
            val = val + rhs if op == "+" else val - rhs
        return val

    def term():
        val = unary()
        while peek()[0] == "op" and peek()[1] in "*/":
            op = take()[1]
            rhs = unary()
            val = val * rhs if op == "*" else val / rhs
        return val

    def unary():
        if peek()[0] == "op" and peek()[1] in "+-":
            op = take()[1]
            val = unary()
            return -val if op == "-" else val
        return power()

    def power():
        base = atom()
        if peek()[0] == "op" and peek()[1] == "^":
            take()
            sign = 1
            if peek()[0] == "op" and peek()[1] in "+-":
                sign = -1 if take()[1] == "-" else 1
            kind, val, at = take()
            if kind != "num":
                raise ScalarParseError("expected integer exponent", at)
            return base ** (sign * val)
        return base

    def atom():
        kind, val, at = take()
        if kind == "num":
            return RatFunc(val)
        if kind == "var":
            return Q if val == "q" else R
        if kind == "op" and val == "(":
            inner = expr()
            k2, v2, at2 = take()
            if v2 != ")":
                raise ScalarParseError("expected ')'", at2)
            return inner
        raise ScalarParseError("unexpected token", at)

    out = expr()
    if peek()[0] != "end":
        raise ScalarParseError("trailing input", peek()[2])
    return out
