"""Framed tangle expressions.

A :class:`Tangle` is an arity-checked tree over the elementary pieces

====  ========  =========================================
name  arity     picture
====  ========  =========================================
I     1 -> 1    vertical strand
X     2 -> 2    positive crossing
Xop   2 -> 2    negative crossing
A     0 -> 2    cup (opens downwards, no top endpoints)
U     2 -> 0    cap (closes two top endpoints)
id0   0 -> 0    empty diagram
====  ========  =========================================

``compose(f, g)`` stacks ``f`` on top of ``g`` (so ``f.t == g.s``) and
``tensor(f, g)`` puts ``f`` to the left of ``g``.  Arity ``(s, t)`` counts
top and bottom endpoints.  Formal linear combinations live in
:class:`LinTangle`; equality of those is decided by evaluating them (see
``tbl.rep``), never structurally.
"""
from __future__ import annotations

import re
from typing import Dict, Iterable, List, Optional, Tuple, Union

from .qfield import DELTA, ONE, RatFunc, ScalarParseError, parse_ratfunc, to_string

LEAF_ARITY = {
    "I": (1, 1),
    "X": (2, 2),
    "Xop": (2, 2),
    "A": (0, 2),
    "U": (2, 0),
    "id0": (0, 0),
}


class ArityError(ValueError):
    """Raised when pieces are glued along mismatched endpoint counts."""


class Tangle:
    """Immutable expression tree.  ``op`` is a leaf name, ``'compose'`` or
    ``'tensor'``."""

    __slots__ = ("op", "args", "s", "t", "_hash", "_size")

    def __init__(self, op: str, args: Tuple["Tangle", ...] = (), s: int = 0, t: int = 0):
        object.__setattr__(self, "op", op)
        object.__setattr__(self, "args", args)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "_hash", hash((op, args, s, t)))
        object.__setattr__(self, "_size", 1 + sum(a._size for a in args))

    def __setattr__(self, key, value):
        raise AttributeError("Tangle is immutable")

    @property
    def arity(self) -> Tuple[int, int]:
        return (self.s, self.t)

    @property
    def is_leaf(self) -> bool:
        return not self.args

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Tangle) or self._hash != other._hash:
            return False
        return self.op == other.op and self.s == other.s and self.t == other.t and self.args == other.args

    def __len__(self):
        return self._size

    def leaves(self):
        if self.is_leaf:
            yield self.op
        for a in self.args:
            yield from a.leaves()

    def __str__(self):
        return render(self)

    def __repr__(self):
        return f"Tangle({render(self)!r}, {self.s}->{self.t})"


def leaf(name: str) -> Tangle:
    s, t = LEAF_ARITY[name]
    return Tangle(name, (), s, t)


I = leaf("I")
X = leaf("X")
XOP = leaf("Xop")
A = leaf("A")
U = leaf("U")
ID0 = leaf("id0")


def compose_tangle(f: Tangle, g: Tangle) -> Tangle:
    """``f`` drawn above ``g``."""
    if f.t != g.s:
        raise ArityError(f"cannot compose {f.s}->{f.t} above {g.s}->{g.t}")
    if f.op == "id0":
        return g
    if g.op == "id0":
        return f
    return Tangle("compose", (f, g), f.s, g.t)


def tensor_tangle(f: Tangle, g: Tangle) -> Tangle:
    if f.op == "id0":
        return g
    if g.op == "id0":
        return f
    return Tangle("tensor", (f, g), f.s + g.s, f.t + g.t)


def chain(*parts: Tangle) -> Tangle:
    """Top-to-bottom composition of several tangles."""
    out = parts[0]
    for p in parts[1:]:
        out = compose_tangle(out, p)
    return out


def tensor_all(*parts: Tangle) -> Tangle:
    out = ID0
    for p in parts:
        out = tensor_tangle(out, p)
    return out


def identity(n: int) -> Tangle:
    """``I^{(x)n}``; ``identity(0)`` is the empty diagram."""
    return tensor_all(*([I] * n))


class LinTangle:
    """Formal Q(q, r)-linear combination of tangles of a common arity."""

    __slots__ = ("s", "t", "terms")

    def __init__(self, terms: Dict[Tangle, RatFunc], s: int, t: int):
        for d in terms:
            if d.arity != (s, t):
                raise ArityError(f"term of arity {d.s}->{d.t} in a {s}->{t} combination")
        self.s = s
        self.t = t
        self.terms = {d: c for d, c in terms.items() if not c.is_zero()}

    @classmethod
    def of(cls, d: Union[Tangle, "LinTangle"], coeff=ONE) -> "LinTangle":
        if isinstance(d, LinTangle):
            return d if coeff is ONE else d.scale(coeff)
        return cls({d: RatFunc.coerce(coeff)}, d.s, d.t)

    @property
    def arity(self):
        return (self.s, self.t)

    def __iter__(self):
        return iter(self.terms.items())

    def __len__(self):
        return len(self.terms)

    def __add__(self, other):
        other = as_lin(other)
        if other.arity != self.arity:
            raise ArityError(f"cannot add {self.s}->{self.t} and {other.s}->{other.t}")
        out = dict(self.terms)
        for d, c in other.terms.items():
            out[d] = out[d] + c if d in out else c
        return LinTangle(out, self.s, self.t)

    def __neg__(self):
        return self.scale(-ONE)

    def __sub__(self, other):
        return self + (-as_lin(other))

    def scale(self, c) -> "LinTangle":
        c = RatFunc.coerce(c)
        return LinTangle({d: c * v for d, v in self.terms.items()}, self.s, self.t)

    def __rmul__(self, c):
        return self.scale(c)

    def map_terms(self, fn) -> "LinTangle":
        """Apply a Tangle -> LinTangle map linearly."""
        out = None
        for d, c in self.terms.items():
            piece = fn(d).scale(c)
            out = piece if out is None else out + piece
        return out if out is not None else LinTangle({}, self.s, self.t)

    def __repr__(self):
        return f"LinTangle({self.s}->{self.t}, {len(self.terms)} terms)"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for d, c in self.terms.items():
            body = render(d)
            parts.append(body if c.is_one() else f"({to_string(c)}).{body}")
        return " + ".join(parts)


Morphism = Union[Tangle, LinTangle]


def as_lin(d: Morphism) -> LinTangle:
    return d if isinstance(d, LinTangle) else LinTangle.of(d)


def zero(s: int, t: int) -> LinTangle:
    return LinTangle({}, s, t)


def _bilinear(f: Morphism, g: Morphism, op, s: int, t: int) -> Morphism:
    if isinstance(f, Tangle) and isinstance(g, Tangle):
        return op(f, g)
    f, g = as_lin(f), as_lin(g)
    out: Dict[Tangle, RatFunc] = {}
    for d1, c1 in f.terms.items():
        for d2, c2 in g.terms.items():
            d = op(d1, d2)
            c = c1 * c2
            out[d] = out[d] + c if d in out else c
    return LinTangle(out, s, t)


def compose(f: Morphism, g: Morphism) -> Morphism:
    """``f`` above ``g``, extended bilinearly."""
    if f.t != g.s:
        raise ArityError(f"cannot compose {f.s}->{f.t} above {g.s}->{g.t}")
    return _bilinear(f, g, compose_tangle, f.s, g.t)


def tensor(f: Morphism, g: Morphism) -> Morphism:
    return _bilinear(f, g, tensor_tangle, f.s + g.s, f.t + g.t)


def compose_all(*parts: Morphism) -> Morphism:
    out = parts[0]
    for p in parts[1:]:
        out = compose(out, p)
    return out


# ---------------------------------------------------------------------------
# derived pieces

def cap_cup(n: int) -> Tuple[Tangle, Tangle]:
    """Nested cap ``U_n: 2n -> 0`` and cup ``A_n: 0 -> 2n``."""
    if n < 1:
        raise ValueError("n must be positive")
    u = U
    a = A
    for k in range(1, n):
        u = compose_tangle(tensor_all(identity(k), U, identity(k)), u)
        a = compose_tangle(a, tensor_all(identity(k), A, identity(k)))
    return u, a


def cap(n: int) -> Tangle:
    return cap_cup(n)[0] if n else ID0


def cup(n: int) -> Tangle:
    return cap_cup(n)[1] if n else ID0


def dual(D: Morphism) -> Morphism:
    """Rotate by a half turn: ``(I_t x A_s) ; (I_t x D x I_s) ; (U_t x I_s)``."""
    s, t = D.s, D.t
    top = tensor(identity(t), cup(s))
    mid = tensor(tensor(identity(t), D), identity(s))
    bot = tensor(cap(t), identity(s))
    return compose(compose(top, mid), bot)


def bend_U(D: Morphism, s: int, t: int) -> Morphism:
    """Move the last ``t`` bottom endpoints to the top: ``n -> s+t`` becomes
    ``n+t -> s``."""
    if D.t != s + t:
        raise ArityError(f"bend_U needs bottom arity {s}+{t}, got {D.t}")
    return compose(tensor(D, identity(t)), tensor(identity(s), cap(t)))


def bend_A(D: Morphism, n: int, t: int) -> Morphism:
    """Inverse of :func:`bend_U`: ``n+t -> s`` becomes ``n -> s+t``."""
    if D.s != n + t:
        raise ArityError(f"bend_A needs top arity {n}+{t}, got {D.s}")
    return compose(tensor(identity(n), cup(t)), tensor(D, identity(t)))


def trace_closure(D: Morphism) -> Morphism:
    """Close an ``n -> n`` diagram by ``n`` arcs on the right."""
    if D.s != D.t:
        raise ArityError(f"trace needs a square arity, got {D.s}->{D.t}")
    n = D.s
    if n == 0:
        return D
    u, a = cap_cup(n)
    return compose(compose(a, tensor(D, identity(n))), u)


def _xop_expansion() -> LinTangle:
    e = compose_tangle(U, A)
    ii = tensor_tangle(I, I)
    return LinTangle({X: ONE, ii: -DELTA, e: DELTA}, 2, 2)


def xop_eliminate(D: Morphism) -> LinTangle:
    """Replace every negative crossing by ``X - (q-1/q) I*I + (q-1/q) U;A``."""
    cache: Dict[Tangle, LinTangle] = {}

    def go(d: Tangle) -> LinTangle:
        if d in cache:
            return cache[d]
        if d.op == "Xop":
            out = _xop_expansion()
        elif d.is_leaf:
            out = LinTangle.of(d)
        elif "Xop" not in set(d.leaves()):
            out = LinTangle.of(d)
        else:
            f, g = go(d.args[0]), go(d.args[1])
            out = compose(f, g) if d.op == "compose" else tensor(f, g)
            out = as_lin(out)
        cache[d] = out
        return out

    return as_lin(D).map_terms(go)


def random_tangle(s: int, t: int, rng, layers: int = 4) -> Tangle:
    """A random diagram ``s -> t`` built from ``layers`` random layers.

    Each layer is a crossing (either sign), a cup or a cap at a random
    position; caps and cups are appended at the end to reach ``t``.
    """
    if (s + t) % 2:
        raise ArityError(f"no diagrams {s}->{t}: parity mismatch")
    cur = s
    parts = [identity(s)] if s else []

    def layer(piece, pos, width):
        return tensor_all(identity(pos), piece, identity(width - pos - piece.s))

    for _ in range(layers):
        kind = rng.choice(("X", "Xop", "A", "U") if cur >= 2 else ("A",))
        if kind == "A":
            parts.append(layer(A, rng.randint(0, cur), cur))
            cur += 2
        else:
            piece = {"X": X, "Xop": XOP, "U": U}[kind]
            parts.append(layer(piece, rng.randint(0, cur - 2), cur))
            cur += piece.t - piece.s
    while cur != t:
        if cur > t:
            parts.append(layer(U, rng.randint(0, cur - 2), cur))
            cur -= 2
        else:
            parts.append(layer(A, rng.randint(0, cur), cur))
            cur += 2
    return chain(*parts) if parts else ID0


def random_lintangle(s: int, t: int, rng, terms: int = 2, layers: int = 4) -> LinTangle:
    """Sum of random diagrams with small random Laurent coefficients."""
    out = zero(s, t)
    for _ in range(terms):
        c = RatFunc.monomial(rng.choice((-2, -1, 1, 3)), rng.randint(-2, 2), 0)
        out = out + LinTangle.of(random_tangle(s, t, rng, layers)).scale(c)
    return as_lin(out)


# ---------------------------------------------------------------------------
# text form

def render(d: Tangle) -> str:
    if d.is_leaf:
        return d.op
    left, right = (render(a) for a in d.args)
    if d.op == "tensor":
        if d.args[0].op == "compose":
            left = f"({left})"
        if d.args[1].op in ("compose", "tensor"):
            right = f"({right})"
        return f"{left}*{right}"
    if d.args[1].op == "compose":
        right = f"({right})"
    return f"{left} ; {right}"


class TangleSyntaxError(ValueError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{msg} at line {line}, column {col}")
        self.line = line
        self.col = col


_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<atom>Xop|In|Un|An|id0|I|X|A|U)(?![A-Za-z0-9_])
  | (?P<num>\d+)
  | (?P<sym>[qr])
  | (?P<op>\*\*|[-+*/^().;])
""", re.VERBOSE)


class _Tok:
    __slots__ = ("kind", "text", "line", "col", "pos")

    def __init__(self, kind, text, line, col, pos):
        self.kind, self.text, self.line, self.col, self.pos = kind, text, line, col, pos

    def __repr__(self):
        return f"{self.kind}:{self.text!r}@{self.line}:{self.col}"


def _tokenize(text: str) -> List[_Tok]:
    out, pos, line, col = [], 0, 1, 1
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise TangleSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        s = m.group()
        if kind == "nl":
            out.append(_Tok("sep", ";", line, col, pos))
            line, col = line + 1, 1
        else:
            if kind == "op" and s == ";":
                out.append(_Tok("sep", s, line, col, pos))
            elif kind not in ("ws", "comment"):
                out.append(_Tok(kind, s, line, col, pos))
            col += len(s)
        pos = m.end()
    out.append(_Tok("eof", "", line, col, pos))
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self, k=0) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise TangleSyntaxError(msg, tok.line, tok.col)

    def expect(self, text):
        tok = self.peek()
        if tok.text != text:
            self.error(f"expected {text!r}, found {tok.text or 'end of input'!r}")
        return self.next()

    def skip_seps(self):
        while self.peek().kind == "sep":
            self.next()

    # seq := lin { sep lin }
    def seq(self, closing=None) -> LinTangle:
        self.skip_seps()
        out = self.lin()
        while True:
            if self.peek().kind != "sep":
                break
            self.skip_seps()
            if self.peek().kind == "eof" or (closing and self.peek().text == closing):
                break
            tok = self.peek()
            rhs = self.lin()
            try:
                out = as_lin(compose(out, rhs))
            except ArityError as exc:
                raise TangleSyntaxError(f"arity error: {exc}", tok.line, tok.col) from None
        return out

    def scalar_ahead(self) -> Optional[int]:
        """Index of the '.' closing a scalar prefix, if one starts here."""
        depth = 0
        j = self.i
        while True:
            tok = self.toks[j]
            if tok.kind in ("atom", "sep", "eof"):
                return None
            if tok.text == "(":
                depth += 1
            elif tok.text == ")":
                depth -= 1
                if depth < 0:
                    return None
            elif tok.text in "+-" and depth == 0 and j > self.i and self.toks[j - 1].text not in ("^", "**"):
                return None
            elif tok.text == "." and depth == 0:
                return j if j > self.i else None
            j += 1

    def scalar(self) -> Optional[RatFunc]:
        end = self.scalar_ahead()
        if end is None:
            return None
        first, dot = self.toks[self.i], self.toks[end]
        src = self.text[first.pos:dot.pos]
        try:
            val = parse_ratfunc(src)
        except (ScalarParseError, ZeroDivisionError) as exc:
            raise TangleSyntaxError(f"bad scalar {src.strip()!r}: {exc}", first.line, first.col) from None
        self.i = end + 1
        return val

    # lin := [scalar "."] term { ("+"|"-") [scalar "."] term }
    def lin(self) -> LinTangle:
        sign = ONE
        if self.peek().text == "-":
            self.next()
            sign = -ONE
        c = self.scalar()
        out = as_lin(self.term()).scale(sign if c is None else sign * c)
        while self.peek().text in ("+", "-"):
            op = self.next()
            c = self.scalar()
            tok = self.peek()
            piece = as_lin(self.term())
            if c is not None:
                piece = piece.scale(c)
            if op.text == "-":
                piece = -piece
            if piece.arity != out.arity:
                raise TangleSyntaxError(
                    f"arity error: cannot add {piece.s}->{piece.t} to {out.s}->{out.t}", tok.line, tok.col)
            out = out + piece
        return out

    def term(self) -> Morphism:
        out = self.factor()
        while self.peek().text == "*":
            self.next()
            out = tensor(out, self.factor())
        return out

    def factor(self) -> Morphism:
        base = self.atom()
        if self.peek().text == "^":
            self.next()
            tok = self.peek()
            if tok.kind != "num":
                self.error("expected a tensor power")
            self.next()
            k = int(tok.text)
            out = LinTangle.of(ID0) if isinstance(base, LinTangle) else ID0
            for _ in range(k):
                out = tensor(out, base)
            return out
        return base

    def atom(self) -> Morphism:
        tok = self.peek()
        if tok.kind == "atom":
            self.next()
            if tok.text in ("In", "Un", "An"):
                self.expect("(")
                ntok = self.peek()
                if ntok.kind != "num":
                    self.error("expected a strand count")
                self.next()
                self.expect(")")
                k = int(ntok.text)
                if tok.text == "In":
                    return identity(k)
                if k < 1:
                    raise TangleSyntaxError("cap/cup nest needs n >= 1", ntok.line, ntok.col)
                u, a = cap_cup(k)
                return u if tok.text == "Un" else a
            return leaf(tok.text)
        if tok.text == "(":
            self.next()
            inner = self.seq(closing=")")
            self.expect(")")
            return inner
        self.error(f"unexpected {tok.text or 'end of input'!r}")


def parse(text: str) -> LinTangle:
    """Parse the tangle text form into a :class:`LinTangle`.

    ``;`` (or a newline) composes top to bottom and binds loosest, then
    ``+``/``-``, then ``*`` (tensor), then ``^k`` (tensor power).  A term
    may carry a scalar prefix ``c.``, e.g. ``X - (q-q^-1).I*I``.
    """
    p = _Parser(text)
    if p.peek().kind == "eof":
        raise TangleSyntaxError("empty expression", 1, 1)
    out = p.seq()
    p.skip_seps()
    if p.peek().kind != "eof":
        p.error(f"unexpected {p.peek().text!r}")
    return out
