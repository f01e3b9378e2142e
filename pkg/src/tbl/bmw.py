"""Words in the BMW generators, Yang-Baxter elements and equality oracles.

Letters are pairs ``(kind, i)`` with ``kind`` in ``{'T', 'Ti', 'E'}`` (``Ti``
is the inverse crossing) and ``1 <= i < n``.  Products are formal: nothing
here rewrites words.  Deciding whether two elements agree is done by
evaluating them in the symplectic representations (``backend='matrix'``)
or in a regular representation whose structure constants were lifted from
several of those (``backend='generic'``).

Representations act on the right, so a word is applied to a vector letter
by letter from the left: ``v . (a b) = (v . a) . b``.
"""
from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product as iproduct
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .exactla import (PRIME, DenseModSpan, EchelonSpan, Operator, apply_local, apply_local_dense,
                      apply_local_mod, columns_mod, kron, matmul, rank_mod_p, saturate_vectors)
from .qfield import (DELTA, ONE, ZERO, Q, R, RatFunc, parse_ratfunc, quantum_int, r_value,
                     specialize_r, to_string, x_param)
from .rep import FunctorImage, ModImage, RepParams, functor_image, place, quantum_trace
from . import tangles as tg

Letter = Tuple[str, int]
Word = Tuple[Letter, ...]

KINDS = ("T", "Ti", "E")


def double_factorial(k: int) -> int:
    out = 1
    while k > 1:
        out *= k
        k -= 2
    return out


def bmw_dim(n: int) -> int:
    """(2n-1)!!, the dimension of B_n."""
    return double_factorial(2 * n - 1)


# ---------------------------------------------------------------------------
# elements

class BMWElement:
    """Linear combination of words at rank ``n``."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Optional[Dict[Word, RatFunc]] = None):
        self.n = n
        clean = {}
        for w, c in (terms or {}).items():
            for kind, i in w:
                if kind not in KINDS or not 1 <= i < n:
                    raise ValueError(f"letter {kind}{i} not in rank {n}")
            c = RatFunc.coerce(c)
            if not c.is_zero():
                clean[tuple(w)] = c
        self.terms = clean

    @classmethod
    def word(cls, n: int, letters: Iterable[Letter] = (), coeff=ONE) -> "BMWElement":
        return cls(n, {tuple(letters): coeff})

    @classmethod
    def one(cls, n: int) -> "BMWElement":
        return cls.word(n)

    def __add__(self, other: "BMWElement") -> "BMWElement":
        _same_rank(self, other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out[w] + c if w in out else c
        return BMWElement(self.n, out)

    def __neg__(self):
        return self.scale(-ONE)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "BMWElement":
        c = RatFunc.coerce(c)
        return BMWElement(self.n, {w: c * v for w, v in self.terms.items()})

    def __rmul__(self, c):
        return self.scale(c)

    def __mul__(self, other):
        if isinstance(other, BMWElement):
            return word_mul(self, other)
        if isinstance(other, BMWProduct):
            return BMWProduct(self.n, (self,) + other.factors, other.coeff)
        return self.scale(other)

    def __eq__(self, other):
        """Formal (word-by-word) equality, not equality in the algebra."""
        return isinstance(other, BMWElement) and self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, frozenset(self.terms)))

    def is_zero(self):
        return not self.terms

    def letter_count(self) -> int:
        return max((len(w) for w in self.terms), default=0)

    def expand(self) -> "BMWElement":
        return self

    def __repr__(self):
        return f"BMWElement(n={self.n}, {format_element(self)!r})"

    def __str__(self):
        return format_element(self)


class BMWProduct:
    """Unexpanded product ``coeff * f_1 f_2 ... f_k`` of elements.

    Yang-Baxter elements are kept in this form; expanding them multiplies
    the number of words by three per factor.
    """

    __slots__ = ("n", "factors", "coeff")

    def __init__(self, n: int, factors: Sequence[BMWElement], coeff=ONE):
        for f in factors:
            if f.n != n:
                raise ValueError(f"factor of rank {f.n} in a rank {n} product")
        self.n = n
        self.factors = tuple(factors)
        self.coeff = RatFunc.coerce(coeff)

    def __mul__(self, other):
        if isinstance(other, BMWProduct):
            _same_rank(self, other)
            return BMWProduct(self.n, self.factors + other.factors, self.coeff * other.coeff)
        if isinstance(other, BMWElement):
            _same_rank(self, other)
            return BMWProduct(self.n, self.factors + (other,), self.coeff)
        return BMWProduct(self.n, self.factors, self.coeff * RatFunc.coerce(other))

    def __rmul__(self, c):
        if isinstance(c, BMWElement):
            return BMWProduct(self.n, (c,) + self.factors, self.coeff)
        return BMWProduct(self.n, self.factors, self.coeff * RatFunc.coerce(c))

    def scale(self, c):
        return BMWProduct(self.n, self.factors, self.coeff * RatFunc.coerce(c))

    def expand(self) -> BMWElement:
        out = BMWElement.one(self.n).scale(self.coeff)
        for f in self.factors:
            out = word_mul(out, f)
        return out

    def letter_count(self) -> int:
        return sum(f.letter_count() for f in self.factors)

    def __repr__(self):
        return f"BMWProduct(n={self.n}, {len(self.factors)} factors)"


Element = Union[BMWElement, BMWProduct]


def _same_rank(a, b):
    if a.n != b.n:
        raise ValueError(f"rank mismatch: {a.n} vs {b.n}")


def as_product(x: Element) -> BMWProduct:
    if isinstance(x, BMWProduct):
        return x
    return BMWProduct(x.n, (x,))


def T(i: int, n: int) -> BMWElement:
    return BMWElement.word(n, [("T", i)])


def Tinv(i: int, n: int) -> BMWElement:
    return BMWElement.word(n, [("Ti", i)])


def E(i: int, n: int) -> BMWElement:
    return BMWElement.word(n, [("E", i)])


def word_mul(a: Element, b: Element) -> Element:
    """Concatenate words bilinearly (no relations applied)."""
    _same_rank(a, b)
    if isinstance(a, BMWProduct) or isinstance(b, BMWProduct):
        return as_product(a) * as_product(b)
    out: Dict[Word, RatFunc] = {}
    for w1, c1 in a.terms.items():
        for w2, c2 in b.terms.items():
            w = w1 + w2
            c = c1 * c2
            out[w] = out[w] + c if w in out else c
    return BMWElement(a.n, out)


def embed_right(a: Element, n: int) -> Element:
    """View a rank-k element in rank n >= k (extra strands on the right)."""
    if a.n > n:
        raise ValueError(f"cannot embed rank {a.n} into rank {n}")
    if isinstance(a, BMWProduct):
        return BMWProduct(n, [embed_right(f, n) for f in a.factors], a.coeff)
    return BMWElement(n, a.terms)


# text form ------------------------------------------------------------------

def format_word(w: Word) -> str:
    if not w:
        return "1"
    return " ".join(f"T{i}^-1" if k == "Ti" else f"{k}{i}" for k, i in w)


def format_element(a: Element) -> str:
    if isinstance(a, BMWProduct):
        inner = " * ".join(f"({format_element(f)})" for f in a.factors)
        return inner if a.coeff.is_one() else f"({to_string(a.coeff)}) * {inner}"
    if not a.terms:
        return "0"
    parts = []
    for w, c in sorted(a.terms.items(), key=lambda kv: (len(kv[0]), kv[0])):
        body = format_word(w)
        if c.is_one():
            parts.append(body)
        elif w:
            parts.append(f"({to_string(c)}).{body}")
        else:
            parts.append(f"({to_string(c)})")
    return " + ".join(parts)


_LETTER = re.compile(r"^(T|E)(\d+)(\^-1)?$")


def parse_word(text: str, n: int) -> Word:
    """Parse ``"T1 T2^-1 E1"``; ``"1"`` or ``""`` is the empty word."""
    out = []
    for tok in text.split():
        if tok == "1":
            continue
        m = _LETTER.match(tok)
        if not m:
            raise ValueError(f"bad letter {tok!r}")
        kind, i, inv = m.group(1), int(m.group(2)), m.group(3)
        if inv and kind == "E":
            raise ValueError("E has no inverse")
        if not 1 <= i < n:
            raise ValueError(f"letter {tok} out of range for rank {n}")
        out.append(("Ti" if inv else kind, i))
    return tuple(out)


def parse_element(text: str, n: int) -> BMWElement:
    """Parse ``word``, ``c.word`` terms joined by ``+``/``-``.

    Scalars use the rational-function syntax, e.g. ``T1 - (q-q^-1).E1 + 2``.
    """
    terms: Dict[Word, RatFunc] = {}
    pos, sign = 0, ONE
    text = text.strip()
    pieces = []
    depth, start = 0, 0
    for k, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch in "+-" and depth == 0 and k > 0 and text[k - 1] not in "^(":
            pieces.append(text[start:k])
            start = k
    pieces.append(text[start:])
    for piece in pieces:
        piece = piece.strip()
        if not piece:
            continue
        sign = ONE
        if piece[0] in "+-":
            sign = -ONE if piece[0] == "-" else ONE
            piece = piece[1:].strip()
        if "." in piece:
            sc, body = piece.rsplit(".", 1)
            coeff = parse_ratfunc(sc)
        elif re.fullmatch(r"[\dqr^()*/\s-]+", piece) and not re.search(r"[TE]", piece):
            coeff, body = parse_ratfunc(piece), ""
        else:
            coeff, body = ONE, piece
        w = parse_word(body, n)
        c = sign * coeff
        terms[w] = terms[w] + c if w in terms else c
    return BMWElement(n, terms)


# ---------------------------------------------------------------------------
# tangles

def letter_tangle(letter: Letter, n: int) -> tg.Tangle:
    kind, i = letter
    core = {"T": tg.X, "Ti": tg.XOP, "E": tg.compose_tangle(tg.U, tg.A)}[kind]
    return tg.tensor_all(tg.identity(i - 1), core, tg.identity(n - 1 - i))


def to_tangle(a: Element) -> tg.LinTangle:
    """Word letters stacked top to bottom in reading order."""
    a = a.expand()
    n = a.n
    terms = {}
    for w, c in a.terms.items():
        d = tg.identity(n) if n else tg.ID0
        if w:
            d = tg.chain(*[letter_tangle(l, n) for l in w])
        terms[d] = terms[d] + c if d in terms else c
    return tg.LinTangle(terms, n, n)


def bmw_relations(n: int) -> List[Tuple[str, BMWElement, BMWElement]]:
    """Defining relations of B_n(r, q) as (name, lhs, rhs) triples."""
    one = BMWElement.one(n)
    x = x_param()
    rinv = R.inv()
    out = []

    def w(*letters):
        return BMWElement.word(n, tuple(letters))

    for i in range(1, n):
        t, ti, e = ("T", i), ("Ti", i), ("E", i)
        out.append((f"inverse[i={i}]", w(t, ti), one))
        out.append((f"skein[i={i}]", w(t) - w(ti), (one - w(e)).scale(DELTA)))
        out.append((f"loop[i={i}]", w(e, e), w(e).scale(x)))
        out.append((f"twist_left[i={i}]", w(e, t), w(e).scale(rinv)))
        out.append((f"twist_right[i={i}]", w(t, e), w(e).scale(rinv)))
        for j in range(i + 2, n):
            out.append((f"far_commute[i={i},j={j}]", w(t, ("T", j)), w(("T", j), t)))
        if i + 1 < n:
            t2, e2 = ("T", i + 1), ("E", i + 1)
            out.append((f"braid[i={i}]", w(t, t2, t), w(t2, t, t2)))
            out.append((f"tangle_up[i={i}]", w(e, e2, e), w(e)))
            out.append((f"tangle_down[i={i}]", w(e2, e, e2), w(e2)))
            out.append((f"slide_up[i={i}]", w(t, t2, e), w(e2, e)))
            out.append((f"slide_down[i={i}]", w(t2, t, e2), w(e, e2)))
            out.append((f"untwist_up[i={i}]", w(e, t2, e), w(e).scale(R)))
            out.append((f"untwist_down[i={i}]", w(e2, t, e2), w(e2).scale(R)))
    return out


# ---------------------------------------------------------------------------
# Yang-Baxter elements

def yb_factor(i: int, k: int, n: int) -> BMWElement:
    """Y_i(k) = -1/[k+1] ([k] T_i - q^k + (q^k - q^-k)/(1 + r q^(1-2k)) E_i)."""
    if not 1 <= i < n:
        raise ValueError(f"index {i} out of range for rank {n}")
    if k < 0:
        raise ValueError("k must be non-negative")
    qk = RatFunc.monomial(1, k, 0)
    qmk = RatFunc.monomial(1, -k, 0)
    pre = -quantum_int(k + 1).inv()
    e_coeff = (qk - qmk) / (ONE + R * RatFunc.monomial(1, 1 - 2 * k, 0))
    return BMWElement(n, {
        (("T", i),): pre * quantum_int(k),
        (): -pre * qk,
        (("E", i),): pre * e_coeff,
    })


def yb_factor_cleared(i: int, k: int, n: int) -> Tuple[BMWElement, RatFunc]:
    """(Yhat, d) with Y_i(k) = Yhat / d and Yhat Laurent in r.

    Yhat = -([k] T_i - q^k)(1 + r q^(1-2k)) - (q^k - q^-k) E_i and
    d = [k+1] (1 + r q^(1-2k)).
    """
    qk = RatFunc.monomial(1, k, 0)
    qmk = RatFunc.monomial(1, -k, 0)
    den_r = ONE + R * RatFunc.monomial(1, 1 - 2 * k, 0)
    yhat = BMWElement(n, {
        (("T", i),): -quantum_int(k) * den_r,
        (): qk * den_r,
        (("E", i),): -(qk - qmk),
    })
    return yhat, quantum_int(k + 1) * den_r


class NotReducedError(ValueError):
    pass


@dataclass(frozen=True)
class ReducedWord:
    """Reduced expression ``s_{i_1} ... s_{i_l}`` in S_n (1-based indices)."""
    indices: Tuple[int, ...]
    n: int

    def __post_init__(self):
        labels(self.indices, self.n)  # validates

    @property
    def permutation(self) -> Tuple[int, ...]:
        return labels(self.indices, self.n)[1]

    def __len__(self):
        return len(self.indices)


def labels(indices: Sequence[int], n: int) -> Tuple[List[Tuple[int, int]], Tuple[int, ...]]:
    """Crossing labels (i, k) of a reduced word and the final arrangement.

    Strand labels start as 1..n; at ``s_i`` the strands in positions i, i+1
    carry labels a < b, the crossing gets ``k = b - a``, and they swap.
    A crossing whose left label is the larger one means the word is not
    reduced.
    """
    pos = list(range(1, n + 1))
    out = []
    for i in indices:
        if not 1 <= i < n:
            raise ValueError(f"s_{i} out of range for S_{n}")
        a, b = pos[i - 1], pos[i]
        if a > b:
            raise NotReducedError(f"word {' '.join(map(str, indices))} is not reduced")
        out.append((i, b - a))
        pos[i - 1], pos[i] = b, a
    return out, tuple(pos)


def yb_labels(w: Union[ReducedWord, Sequence[int]], n: Optional[int] = None) -> List[Tuple[int, int]]:
    if isinstance(w, ReducedWord):
        return labels(w.indices, w.n)[0]
    return labels(tuple(w), n)[0]


def format_yb(pairs: Sequence[Tuple[int, int]]) -> str:
    return " ".join(f"Y{i}({k})" for i, k in pairs)


def yb_element(w: Union[ReducedWord, Sequence[int]], n: Optional[int] = None, factor=None) -> BMWProduct:
    """Product of Y_i(k) over the crossing labels of a reduced word.

    ``factor(i, k, n)`` replaces :func:`yb_factor` (used for negative controls).
    """
    if isinstance(w, ReducedWord):
        n = w.n
    factor = factor or yb_factor
    pairs = yb_labels(w, n)
    return BMWProduct(n, [factor(i, k, n) for i, k in pairs])


def longest_word(n: int) -> Tuple[int, ...]:
    """s_1 . s_2 s_1 . s_3 s_2 s_1 ... (a reduced word for w_0 in S_n)."""
    out = []
    for j in range(1, n):
        out.extend(range(j, 0, -1))
    return tuple(out)


def factorized_longest_word(n: int) -> Tuple[int, ...]:
    """s_1 s_2 ... s_{n-1} followed by the longest word of S_{n-1}."""
    return tuple(range(1, n)) + longest_word(n - 1)


def longest_yb(n: int, factor=None) -> BMWProduct:
    if n < 2:
        raise ValueError("n must be >= 2")
    return yb_element(longest_word(n), n, factor)


def permutation_of(indices: Sequence[int], n: int) -> Tuple[int, ...]:
    pos = list(range(1, n + 1))
    for i in indices:
        pos[i - 1], pos[i] = pos[i], pos[i - 1]
    return tuple(pos)


def reduced_words(perm: Sequence[int]) -> List[Tuple[int, ...]]:
    """All reduced words of a permutation (given as the final arrangement)."""
    perm = tuple(perm)
    n = len(perm)

    @lru_cache(maxsize=None)
    def go(p):
        if all(p[k] < p[k + 1] for k in range(n - 1)):
            return [()]
        out = []
        for i in range(1, n):
            if p[i - 1] > p[i]:
                prev = list(p)
                prev[i - 1], prev[i] = prev[i], prev[i - 1]
                out.extend(w + (i,) for w in go(tuple(prev)))
        return out

    return sorted(go(perm))


def sign_rep(a: Element) -> RatFunc:
    """The one-dimensional representation T -> -1/q, T^-1 -> -q, E -> 0."""
    if isinstance(a, BMWProduct):
        out = a.coeff
        for f in a.factors:
            out = out * sign_rep(f)
        return out
    val = {"T": -Q.inv(), "Ti": -Q, "E": ZERO}
    total = ZERO
    for w, c in a.terms.items():
        t = c
        for kind, _ in w:
            t = t * val[kind]
        total = total + t
    return total


# ---------------------------------------------------------------------------
# evaluation in the symplectic representations

def _local_blocks(f: BMWElement):
    """Split an element into (slot, {kind: coeff}, scalar) if every word has
    length <= 1 and all letters share one index; else None."""
    slot = None
    coeffs = {}
    scalar = ZERO
    for w, c in f.terms.items():
        if len(w) > 1:
            return None
        if not w:
            scalar = scalar + c
            continue
        kind, i = w[0]
        if slot is None:
            slot = i
        elif slot != i:
            return None
        coeffs[kind] = coeffs.get(kind, ZERO) + c
    return slot, coeffs, scalar


class ExactEngine:
    """Right action of words on sparse exact vectors in V^{(x)n} at one m."""

    def __init__(self, image: FunctorImage, n: int):
        self.image = image
        self.n = n
        self.dim = image.dim
        self.ops = {"T": image.beta, "Ti": image.beta_inv, "E": image.gamma}
        self._local_cache = {}

    def scalar(self, c):
        return self.image.scalar(c)

    def local(self, coeffs, scalar) -> Operator:
        key = (tuple(sorted((k, v) for k, v in coeffs.items())), scalar)
        hit = self._local_cache.get(key)
        if hit is None:
            d2 = self.dim * self.dim
            hit = Operator.identity(d2, (2, 2)).scale(self.scalar(scalar))
            for kind, c in coeffs.items():
                hit = hit + self.ops[kind].scale(self.scalar(c))
            self._local_cache[key] = hit
        return hit

    def apply_word(self, w: Word, vec):
        for kind, i in w:
            vec = apply_local(self.ops[kind], vec, i - 1, self.n, self.dim)
        return vec

    def apply_element(self, f: BMWElement, vec):
        blocks = _local_blocks(f)
        if blocks is not None and blocks[0] is not None:
            slot, coeffs, scalar = blocks
            return apply_local(self.local(coeffs, scalar), vec, slot - 1, self.n, self.dim)
        out = {}
        for w, c in f.terms.items():
            cs = self.scalar(c)
            for k, v in self.apply_word(w, vec).items():
                s = out.get(k)
                out[k] = v * cs if s is None else s + v * cs
        return {k: v for k, v in out.items() if not v.is_zero()}

    def apply(self, a: Element, vec):
        p = as_product(a)
        for f in p.factors:
            vec = self.apply_element(f, vec)
            if not vec:
                return vec
        if not p.coeff.is_one():
            c = self.scalar(p.coeff)
            vec = {k: v * c for k, v in vec.items()}
        return vec


class ModEngine:
    """The same right action on dense GF(p) arrays of shape (K, dim^n)."""

    def __init__(self, m: int, n: int, q0: int, p: int = PRIME):
        self.img = ModImage(m, q0, p)
        self.n = n
        self.dim = 2 * m
        self.p = p
        self.ops = {"T": self.img.beta, "Ti": self.img.beta_inv, "E": self.img.gamma}

    def scalar(self, c):
        return self.img.scalar(c)

    def apply_word(self, w: Word, arr):
        for kind, i in w:
            arr = apply_local_dense(self.ops[kind], arr, i - 1, self.n, self.dim, self.p)
        return arr

    def apply_element(self, f: BMWElement, arr):
        blocks = _local_blocks(f)
        p = self.p
        if blocks is not None and blocks[0] is not None:
            slot, coeffs, scalar = blocks
            d2 = self.dim * self.dim
            mat = np.eye(d2, dtype=np.int64) * self.scalar(scalar) % p
            for kind, c in coeffs.items():
                mat = (mat + self.ops[kind] * self.scalar(c)) % p
            return apply_local_dense(mat, arr, slot - 1, self.n, self.dim, p)
        out = np.zeros_like(arr)
        for w, c in f.terms.items():
            out = (out + self.apply_word(w, arr) * self.scalar(c)) % p
        return out

    def apply(self, a: Element, arr):
        pr = as_product(a)
        for f in pr.factors:
            arr = self.apply_element(f, arr)
        return arr * self.scalar(pr.coeff) % self.p


def element_operator(a: Element, image) -> Operator:
    """Exact F(a) as a dim^n x dim^n operator (right action: F(ab) = F(b) F(a))."""
    if not isinstance(image, FunctorImage):
        image = functor_image(image.m if isinstance(image, RepParams) else int(image))
    n, dim = a.n, image.dim
    eng = ExactEngine(image, n)
    ident = Operator.identity(dim ** n, (n, n))

    def element_op(f: BMWElement) -> Operator:
        blocks = _local_blocks(f)
        if blocks is not None and blocks[0] is not None:
            slot, coeffs, scalar = blocks
            return place(eng.local(coeffs, scalar), slot - 1, n, dim)
        total = Operator.zero(dim ** n, dim ** n, (n, n))
        for w, c in f.terms.items():
            op = ident
            for kind, i in w:
                op = matmul(place(eng.ops[kind], i - 1, n, dim), op)
            total = total + op.scale(eng.scalar(c))
        return total

    p = as_product(a)
    out = ident
    for f in p.factors:
        out = matmul(element_op(f), out)
    return out.scale(image.scalar(p.coeff)) if not p.coeff.is_one() else out


# ---------------------------------------------------------------------------
# word bases and probes

def _random_q0(seed) -> int:
    return random.Random(seed).randrange(3, PRIME - 3)


@dataclass
class WordBasis:
    n: int
    m: int
    words: List[Word]
    dim: int
    lengths: List[int]
    saturated: bool


def word_basis(n: int, m: Optional[int] = None, max_length: Optional[int] = None,
               k_vectors: int = 6, seed: int = 0) -> WordBasis:
    """Greedy family of words whose images are independent at rank m >= n.

    Words are enumerated by length over the letters T_i, E_i; a word is kept
    if its image (on ``k_vectors`` random vectors, mod p) leaves the span so
    far.  Growth stops after a full length adds nothing.  Images over GF(p)
    bound the rank over Q(q) from below.
    """
    if m is None:
        m = n
    if n == 1:
        return WordBasis(1, m, [()], 1, [0], True)
    if max_length is None:
        max_length = n * n + 2
    rng = np.random.default_rng(seed)
    eng = ModEngine(m, n, _random_q0(seed), PRIME)
    start = rng.integers(0, PRIME, size=(k_vectors, eng.dim ** n), dtype=np.int64)
    span = DenseModSpan(start.size)
    letters = [(k, i) for i in range(1, n) for k in ("T", "E")]
    words, lengths = [], []
    frontier = [((), start)]
    span.add(start.reshape(-1))
    words.append(())
    lengths.append(0)
    saturated = False
    for length in range(1, max_length + 1):
        new = []
        for w, arr in frontier:
            for l in letters:
                arr2 = eng.apply_word((l,), arr)
                if span.add(arr2.reshape(-1)):
                    new.append((w + (l,), arr2))
                    words.append(w + (l,))
                    lengths.append(length)
        if not new:
            saturated = True
            break
        frontier = new
    return WordBasis(n, m, words, len(words), lengths, saturated)


@lru_cache(maxsize=None)
def standard_basis(n: int) -> Tuple[Word, ...]:
    wb = word_basis(n, n)
    if not wb.saturated or wb.dim != bmw_dim(n):
        raise RuntimeError(f"word basis for rank {n} did not reach {bmw_dim(n)} (got {wb.dim})")
    return tuple(wb.words)


def _probe_candidates(n: int, dim: int, seed: int) -> List[int]:
    """Basis indices, those containing a partner pair first."""
    idx = list(range(dim ** n))
    rng = random.Random(seed)
    rng.shuffle(idx)

    def score(j):
        digits = []
        for _ in range(n):
            j, d = divmod(j, dim)
            digits.append(d)
        pairs = sum(1 for a in digits for b in digits if a + b == dim - 1) // 2
        return -min(pairs, n // 2) - len(set(digits)) / (2 * n)

    idx.sort(key=score)
    return idx


@lru_cache(maxsize=None)
def probes(n: int, m: int, seed: int = 1) -> Tuple[int, ...]:
    """Basis vectors e_j such that b -> (e_j . b)_j is injective on B_n at m.

    Certified over GF(p): the images of the standard word basis on the chosen
    probes have full rank (2n-1)!!, hence also over Q(q).
    """
    words = standard_basis(n)
    target = len(words)
    img = ModImage(m, _random_q0(seed + 17), PRIME)
    dim = img.dim
    ops = {"T": columns_mod(img.beta), "Ti": columns_mod(img.beta_inv), "E": columns_mod(img.gamma)}
    chosen: List[int] = []
    rows: List[Dict[Tuple[int, int], int]] = [dict() for _ in words]
    best = 0
    for cand in _probe_candidates(n, dim, seed)[:400]:
        trial = []
        for w, row in zip(words, rows):
            vec = {cand: 1}
            for kind, i in w:
                vec = apply_local_mod(ops[kind], vec, i - 1, n, dim, PRIME)
            new = dict(row)
            new.update({(len(chosen), j): v for j, v in vec.items()})
            trial.append(new)
        rank = rank_mod_p(trial, PRIME)
        if rank > best:
            best = rank
            chosen.append(cand)
            rows = trial
            if rank == target:
                return tuple(chosen)
    raise RuntimeError(f"no injective probe set found for n={n}, m={m} (rank {best} < {target})")


def _mod_rank(mat: np.ndarray, p: int) -> int:
    span = DenseModSpan(mat.shape[1], p)
    for row in mat:
        span.add(row)
    return span.rank


def probe_vectors(n: int, m: int) -> List[Dict[int, RatFunc]]:
    return [{j: ONE} for j in probes(n, m)]


def evaluate_on_probes(a: Element, m: int, engine: Optional[ExactEngine] = None) -> Dict[Tuple[int, int], RatFunc]:
    eng = engine or ExactEngine(functor_image(m), a.n)
    out = {}
    for k, v in enumerate(probe_vectors(a.n, m)):
        for j, c in eng.apply(a, v).items():
            out[(k, j)] = c
    return out


# ---------------------------------------------------------------------------
# equality

@dataclass
class Certificate:
    equal: bool
    backend: str
    n: int
    nodes: List[int] = field(default_factory=list)
    exact_nodes: List[int] = field(default_factory=list)
    mod_nodes: List[int] = field(default_factory=list)
    degree_bound: int = 0
    failed_node: Optional[int] = None
    note: str = ""

    def __bool__(self):
        return self.equal

    def to_json(self) -> dict:
        return {
            "equal": bool(self.equal), "backend": self.backend, "n": int(self.n),
            "nodes": [int(m) for m in self.nodes], "exact_nodes": [int(m) for m in self.exact_nodes],
            "mod_nodes": [int(m) for m in self.mod_nodes], "degree_bound": int(self.degree_bound),
            "failed_node": None if self.failed_node is None else int(self.failed_node), "note": self.note,
        }


def cleared(a: Element) -> Tuple[BMWProduct, RatFunc]:
    """Rescale ``a`` so every coefficient is Laurent in r.

    Returns (a_hat, L) with a = a_hat / L; each factor is multiplied by the
    lcm of the r-dependent denominators of its coefficients.
    """
    p = as_product(a)
    L = ONE
    factors = []
    for f in p.factors:
        den = _r_lcm(f.terms.values())
        factors.append(f.scale(den))
        L = L * den
    dc = _r_lcm([p.coeff])
    return BMWProduct(p.n, factors, p.coeff * dc), L * dc


def _r_lcm(coeffs) -> RatFunc:
    acc = None
    for c in coeffs:
        if not c.has_r() or c.is_laurent():
            continue
        d = c.den
        acc = d if acc is None else acc * d / acc.gcd(d)
    return ONE if acc is None else RatFunc(acc)


def r_span(c: RatFunc) -> int:
    lo, hi = c.r_degree_span()
    return int(max(hi - lo, 0))


def default_degree_bound(a: Element, b: Element) -> int:
    """Nodes needed to certify generic equality of the cleared difference.

    Each letter changes the r-degree window of basis coordinates by at most
    two (x contributes r and 1/r), and the cleared coefficients and
    cross-multiplied denominators add their own r-spread.
    """
    total = 0
    for x, other in ((a, b), (b, a)):
        xh, lx = cleared(x)
        _, lo = cleared(other)
        spread = 0
        for f in xh.factors:
            spread += 2 * f.letter_count() + max((r_span(c) for c in f.terms.values()), default=0)
        spread += r_span(xh.coeff) + r_span(lo)
        total = max(total, spread)
    return total


def _mod_equal(a: Element, b: Element, m: int, trials: int, seed: int) -> bool:
    n = a.n
    for t in range(trials):
        eng = ModEngine(m, n, _random_q0(f"{seed}/{m}/{t}"))
        rng = np.random.default_rng(seed + 1000 * m + t)
        arr = rng.integers(0, PRIME, size=(2, eng.dim ** n), dtype=np.int64)
        if not np.array_equal(eng.apply(a, arr), eng.apply(b, arr)):
            return False
    return True


EXACT_LIMIT = None  # no cap: probe evaluation stays sparse


def generic_equal(a: Element, b: Element, degree_bound: Optional[int] = None, backend: str = "matrix",
                  nodes: Optional[Sequence[int]] = None, exact_limit: Optional[int] = EXACT_LIMIT,
                  mod_trials: int = 2, seed: int = 0) -> Certificate:
    """Decide a == b in B_n(r, q).

    ``matrix`` backend: compare the cleared elements ``L_b * a_hat`` and
    ``L_a * b_hat`` at r = -q^(2m'+1) for m' = n .. n + degree_bound (all
    faithful).  Each node is evaluated exactly on an injective probe set
    (see :func:`probes`); nodes with dim^n above ``exact_limit``, if one is
    given, fall back to random evaluation mod p and the certificate records
    them separately.  Passing ``nodes`` explicitly checks equality in the
    corresponding specialized algebras only.

    ``generic`` backend: compare coordinates in the lifted regular
    representation (exact over Q(q, r); available while the lift is cheap).
    """
    _same_rank(a, b)
    if backend == "generic":
        reg = regular_rep(a.n)
        eq = reg.coords(a) == reg.coords(b)
        return Certificate(eq, "generic", a.n, note=f"regular representation lifted on nodes {reg.nodes}, "
                                                    f"window {list(reg.window)}, holdout {reg.holdout}")
    if backend != "matrix":
        raise ValueError(f"unknown backend {backend!r}")
    return all_equal([a, b], degree_bound=degree_bound, nodes=nodes, exact_limit=exact_limit,
                     mod_trials=mod_trials, seed=seed)


def all_equal(elements: Sequence[Element], degree_bound: Optional[int] = None,
              nodes: Optional[Sequence[int]] = None, exact_limit: Optional[int] = EXACT_LIMIT,
              mod_trials: int = 2, seed: int = 0) -> Certificate:
    """Matrix-backend check that every element equals the first one.

    Each element is evaluated once per node, so checking a whole class
    (e.g. all reduced words of one permutation) costs one pass.
    """
    first = elements[0]
    n = first.n
    for e in elements[1:]:
        _same_rank(first, e)
    clear = [cleared(e) for e in elements]
    if degree_bound is None:
        degree_bound = max((default_degree_bound(first, e) for e in elements[1:]), default=0)
    if nodes is None:
        nodes = list(range(n, n + degree_bound + 1))
    cert = Certificate(True, "matrix", n, list(nodes), degree_bound=degree_bound)
    for m in nodes:
        if m < n:
            raise ValueError(f"node m'={m} is not faithful for rank {n}")
        if exact_limit is None or (2 * m) ** n <= exact_limit:
            eng = ExactEngine(functor_image(m), n)
            ref_hat, ref_l = clear[0]
            ref = evaluate_on_probes(ref_hat, m, eng)
            ref_l = specialize_r(ref_l, m)
            ok = True
            for eh, el in clear[1:]:
                el = specialize_r(el, m)
                val = evaluate_on_probes(eh, m, eng)
                if val.keys() != ref.keys() or any(val[k] * ref_l != ref[k] * el for k in val):
                    ok = False
                    break
            cert.exact_nodes.append(m)
        else:
            ok = all(_mod_equal(first, e, m, mod_trials, seed) for e in elements[1:])
            cert.mod_nodes.append(m)
        if not ok:
            cert.equal = False
            cert.failed_node = m
            return cert
    return cert


# ---------------------------------------------------------------------------
# r-lifting and the regular representation

class LiftError(ValueError):
    pass


def _solve_exact(mat: List[List[RatFunc]], rhs: List[List[RatFunc]]) -> List[List[RatFunc]]:
    """Solve mat @ X = rhs (square, nonsingular) over Q(q, r); columns of rhs
    are given as lists.  Returns the solution columns."""
    n = len(mat)
    aug = [list(mat[i]) + [col[i] for col in rhs] for i in range(n)]
    for c in range(n):
        piv = None
        for i in range(c, n):
            if not aug[i][c].is_zero() and (piv is None or aug[i][c].complexity() < aug[piv][c].complexity()):
                piv = i
        if piv is None:
            raise LiftError("singular system")
        aug[c], aug[piv] = aug[piv], aug[c]
        inv = aug[c][c].inv()
        aug[c] = [v * inv for v in aug[c]]
        for i in range(n):
            if i != c and not aug[i][c].is_zero():
                f = aug[i][c]
                aug[i] = [vi - f * vc for vi, vc in zip(aug[i], aug[c])]
    return [[aug[i][n + j] for i in range(n)] for j in range(len(rhs))]


def _vandermonde(nodes: Sequence[int], window: Tuple[int, int]):
    lo, hi = window
    return [[r_value(m) ** d for d in range(lo, hi + 1)] for m in nodes]


def lift_generic(values: Sequence[Tuple[int, RatFunc]], degree_window: Tuple[int, int]) -> RatFunc:
    """Recover f(q, r) = sum_{d in window} c_d(q) r^d from f(q, -q^(2m'+1)).

    The first (width) samples determine the c_d; every remaining sample is a
    holdout and must match.
    """
    lo, hi = degree_window
    width = hi - lo + 1
    if len(values) < width + 1:
        raise LiftError(f"need at least {width + 1} samples for window {degree_window}")
    ms = [m for m, _ in values]
    if len(set(ms)) != len(ms):
        raise LiftError("nodes must be distinct")
    fit, hold = values[:width], values[width:]
    sol = _solve_exact(_vandermonde([m for m, _ in fit], degree_window), [[v for _, v in fit]])[0]
    f = ZERO
    for d, c in zip(range(lo, hi + 1), sol):
        f = f + c * R ** d
    for m, v in hold:
        if specialize_r(f, m) != v:
            raise LiftError(f"holdout at m'={m} disagrees; widen the degree window")
    return f


class RegularRep:
    """Left and right multiplication by generators on a word basis of B_n,
    with coefficients in Q(q, r).

    Structure constants are computed exactly at the faithful nodes
    m' = n, n+1, ..., lifted in r over ``window`` and confirmed at a holdout
    node.
    """

    def __init__(self, n: int, window: Tuple[int, int] = (-2, 2), extra_holdout: int = 1):
        self.n = n
        self.words = list(standard_basis(n))
        self.size = len(self.words)
        self.index = {w: k for k, w in enumerate(self.words)}
        self.window = window
        width = window[1] - window[0] + 1
        self.nodes = list(range(n, n + width))
        self.holdout = list(range(n + width, n + width + extra_holdout))
        self.gens = [(k, i) for i in range(1, n) for k in ("T", "E")]
        samples = {m: self._node_constants(m) for m in self.nodes + self.holdout}
        self.right: Dict[Letter, List[List[RatFunc]]] = {}
        self.left: Dict[Letter, List[List[RatFunc]]] = {}
        V = _vandermonde(self.nodes, window)
        Vinv = _solve_exact(V, [[ONE if i == j else ZERO for i in range(width)] for j in range(width)])
        # Vinv[j] is column j of V^-1; coefficient c_d = sum_j (V^-1)[d][j] * value_j
        powers = [R ** d for d in range(window[0], window[1] + 1)]
        combo = []
        for j in range(width):
            f = ZERO
            for d in range(width):
                f = f + Vinv[j][d] * powers[d]
            combo.append(f)
        for side in ("right", "left"):
            table = getattr(self, side)
            for g in self.gens:
                mat = []
                for b in range(self.size):
                    row = []
                    for c in range(self.size):
                        f = ZERO
                        for j, m in enumerate(self.nodes):
                            v = samples[m][side][g][b][c]
                            if not v.is_zero():
                                f = f + combo[j] * v
                        for m in self.holdout:
                            if specialize_r(f, m) != samples[m][side][g][b][c]:
                                raise LiftError(f"structure constant ({side}, {g}, {b}, {c}) fails holdout m'={m}")
                        row.append(f)
                    mat.append(row)
                table[g] = mat

    def _node_constants(self, m: int):
        """Coordinates of b.g and g.b in the basis at node m (exact, in Q(q))."""
        n = self.n
        eng = ExactEngine(functor_image(m), n)
        pv = probe_vectors(n, m)

        def image(word_prefix_vecs, w):
            return [eng.apply_word(w, v) for v in word_prefix_vecs]

        def flat(vecs):
            return {(k, j): c for k, vec in enumerate(vecs) for j, c in vec.items()}

        basis_imgs = [image(pv, w) for w in self.words]
        flats = [flat(v) for v in basis_imgs]
        span = EchelonSpan(track=True)
        for f in flats:
            if not span.add(f):
                raise LiftError(f"word basis not independent at m'={m}")

        def coords(target):
            c = span.coordinates(target)
            if c is None:
                raise LiftError(f"product left the span of the basis at m'={m}")
            return [c.get(k, ZERO) for k in range(self.size)]

        out = {"right": {}, "left": {}}
        for g in self.gens:
            out["right"][g] = [coords(flat(image(basis_imgs[b], (g,)))) for b in range(self.size)]
            g_vecs = image(pv, (g,))
            out["left"][g] = [coords(flat(image(g_vecs, self.words[b]))) for b in range(self.size)]
        return out

    # coordinates ---------------------------------------------------------
    def _apply_right(self, vec: List[RatFunc], letter: Letter) -> List[RatFunc]:
        kind, i = letter
        if kind == "Ti":
            t = self._apply_right(vec, ("T", i))
            e = self._apply_right(vec, ("E", i))
            return [tv - DELTA * (v - ev) for tv, v, ev in zip(t, vec, e)]
        mat = self.right[(kind, i)]
        out = [ZERO] * self.size
        for b, vb in enumerate(vec):
            if vb.is_zero():
                continue
            for c, s in enumerate(mat[b]):
                if not s.is_zero():
                    out[c] = out[c] + vb * s
        return out

    def _apply_left(self, vec: List[RatFunc], letter: Letter) -> List[RatFunc]:
        kind, i = letter
        if kind == "Ti":
            t = self._apply_left(vec, ("T", i))
            e = self._apply_left(vec, ("E", i))
            return [tv - DELTA * (v - ev) for tv, v, ev in zip(t, vec, e)]
        mat = self.left[(kind, i)]
        out = [ZERO] * self.size
        for b, vb in enumerate(vec):
            if vb.is_zero():
                continue
            for c, s in enumerate(mat[b]):
                if not s.is_zero():
                    out[c] = out[c] + vb * s
        return out

    def unit(self) -> List[RatFunc]:
        v = [ZERO] * self.size
        v[self.index[()]] = ONE
        return v

    def mul_right(self, vec: List[RatFunc], f: BMWElement) -> List[RatFunc]:
        out = [ZERO] * self.size
        for w, c in f.terms.items():
            v = vec
            for l in w:
                v = self._apply_right(v, l)
            out = [o + c * x for o, x in zip(out, v)]
        return out

    def coords(self, a: Element) -> List[RatFunc]:
        if a.n != self.n:
            raise ValueError("rank mismatch")
        p = as_product(a)
        v = self.unit()
        for f in p.factors:
            v = self.mul_right(v, f)
        return [p.coeff * x for x in v]

    def right_map(self, letter: Letter, specialize: Optional[int] = None):
        def f(vec: Dict[int, RatFunc]):
            full = [vec.get(k, ZERO) for k in range(self.size)]
            out = self._apply_right(full, letter)
            if specialize is not None:
                out = [specialize_r(x, specialize) for x in out]
            return {k: v for k, v in enumerate(out) if not v.is_zero()}
        return f

    def left_map(self, letter: Letter, specialize: Optional[int] = None):
        def f(vec: Dict[int, RatFunc]):
            full = [vec.get(k, ZERO) for k in range(self.size)]
            out = self._apply_left(full, letter)
            if specialize is not None:
                out = [specialize_r(x, specialize) for x in out]
            return {k: v for k, v in enumerate(out) if not v.is_zero()}
        return f


@lru_cache(maxsize=None)
def regular_rep(n: int) -> RegularRep:
    return RegularRep(n)


def structure_constants(n: int) -> RegularRep:
    return regular_rep(n)


# ---------------------------------------------------------------------------
# the regular representation over GF(p)

def _inv_mod(mat: np.ndarray, p: int) -> np.ndarray:
    """Inverse of a square matrix over GF(p) by Gauss-Jordan."""
    k = mat.shape[0]
    aug = np.concatenate([mat % p, np.eye(k, dtype=np.int64)], axis=1)
    for c in range(k):
        nz = np.flatnonzero(aug[c:, c])
        if not nz.size:
            raise LiftError("singular matrix mod p")
        piv = c + nz[0]
        if piv != c:
            aug[[c, piv]] = aug[[piv, c]]
        aug[c] = aug[c] * pow(int(aug[c, c]), p - 2, p) % p
        col = aug[:, c].copy()
        col[c] = 0
        aug = (aug - np.outer(col, aug[c]) % p) % p
    return aug[:, k:]


def _pivot_columns(mat: np.ndarray, p: int) -> List[int]:
    """Columns of a full-row-rank GF(p) matrix forming an invertible block."""
    work = mat % p
    rows, cols = work.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(work[r:, c])
        if not nz.size:
            continue
        piv = r + nz[0]
        if piv != r:
            work[[r, piv]] = work[[piv, r]]
        work[r] = work[r] * pow(int(work[r, c]), p - 2, p) % p
        col = work[:, c].copy()
        col[r] = 0
        work = (work - np.outer(col, work[r]) % p) % p
        pivots.append(c)
        r += 1
    if r < rows:
        raise LiftError(f"rank {r} < {rows} mod p")
    return pivots


class ModRegularRep:
    """Left and right multiplication tables of B_n over GF(p) at q = q0.

    The tables are computed at faithful nodes m' = n, n+1, ..., interpolated
    in r over a Laurent ``window`` and confirmed at ``extra_holdout`` further
    nodes; :meth:`tables` then evaluates them at any r.  Ranks computed from
    these tables are lower bounds for the ranks over Q(q).
    """

    def __init__(self, n: int, q0: Optional[int] = None, p: int = PRIME,
                 window: Tuple[int, int] = (-2, 2), extra_holdout: int = 1, seed: int = 0):
        self.n = n
        self.p = p
        self.q0 = q0 if q0 is not None else _random_q0(f"modreg/{seed}")
        self.words = list(standard_basis(n))
        self.size = len(self.words)
        self.index = {w: k for k, w in enumerate(self.words)}
        self.window = window
        self.gens = [(k, i) for i in range(1, n) for k in ("T", "E")]
        width = window[1] - window[0] + 1
        self.nodes = list(range(n, n + width))
        self.holdout = list(range(n + width, n + width + extra_holdout))
        samples = {m: self._node_tables(m) for m in self.nodes + self.holdout}
        rs = [self._r(m) for m in self.nodes]
        V = np.array([[pow(r, d % (p - 1), p) for d in range(window[0], window[1] + 1)] for r in rs], dtype=np.int64)
        Vinv = _inv_mod(V, p)
        # coefficient arrays c_d for each table, shape (width, size, size)
        self.coeffs = {}
        for key in samples[self.nodes[0]]:
            stack = np.stack([samples[m][key] for m in self.nodes])
            c = np.tensordot(Vinv, stack, axes=(1, 0)) % p
            self.coeffs[key] = c
            for m in self.holdout:
                if not np.array_equal(self._eval(c, self._r(m)), samples[m][key]):
                    raise LiftError(f"table {key} fails holdout m'={m}; widen the window")

    def _r(self, m: int) -> int:
        return (-pow(self.q0, 2 * m + 1, self.p)) % self.p

    def _eval(self, c: np.ndarray, r: int) -> np.ndarray:
        p = self.p
        out = np.zeros(c.shape[1:], dtype=np.int64)
        for k, d in enumerate(range(self.window[0], self.window[1] + 1)):
            out = (out + c[k] * pow(r, d % (p - 1), p)) % p
        return out

    def _node_tables(self, m: int) -> Dict[Tuple[str, Letter], np.ndarray]:
        n, p = self.n, self.p
        img = ModImage(m, self.q0, p)
        dim = img.dim
        ops = {"T": columns_mod(img.beta), "E": columns_mod(img.gamma)}
        pv = probes(n, m)

        def act(vecs, w):
            out = []
            for v in vecs:
                for kind, i in w:
                    v = apply_local_mod(ops[kind], v, i - 1, n, dim, p)
                out.append(v)
            return out

        start = [{j: 1} for j in pv]
        basis_imgs = [act(start, w) for w in self.words]
        keys = sorted({(k, j) for vecs in basis_imgs for k, v in enumerate(vecs) for j in v})
        kidx = {key: c for c, key in enumerate(keys)}

        def dense(vecs):
            row = np.zeros(len(keys), dtype=np.int64)
            for k, v in enumerate(vecs):
                for j, x in v.items():
                    c = kidx.get((k, j))
                    if c is None:
                        if x % p:
                            raise LiftError(f"product left the span of the basis at m'={m}")
                        continue
                    row[c] = x % p
            return row

        B = np.stack([dense(v) for v in basis_imgs])
        piv = _pivot_columns(B, p)
        inv = _inv_mod(B[:, piv], p)
        out = {}
        for g in self.gens:
            for side in ("right", "left"):
                if side == "right":
                    targets = np.stack([dense(act(basis_imgs[b], (g,))) for b in range(self.size)])
                else:
                    gv = act(start, (g,))
                    targets = np.stack([dense(act(gv, w)) for w in self.words])
                coords = targets[:, piv] @ inv % p
                if not np.array_equal(coords @ B % p, targets):
                    raise LiftError(f"product left the span of the basis at m'={m}")
                out[(side, g)] = coords
        return out

    def tables(self, r: int) -> Dict[Tuple[str, Letter], np.ndarray]:
        """Multiplication tables at r (row b holds the coordinates of b.g or g.b)."""
        return {key: self._eval(c, r % self.p) for key, c in self.coeffs.items()}

    def r_of(self, m: int) -> int:
        """r = -q0^(2m+1) mod p."""
        return self._r(m)

    def coords(self, a: Element, r: int) -> np.ndarray:
        """Coordinates of ``a`` at (q0, r) mod p."""
        p = self.p
        tabs = self.tables(r)
        pr = as_product(a)
        q0 = self.q0

        def mul_letter(v, letter):
            kind, i = letter
            if kind == "Ti":
                t = mul_letter(v, ("T", i))
                e = mul_letter(v, ("E", i))
                d = DELTA.eval_mod(q0, p, r)
                return (t - d * (v - e)) % p
            return v @ tabs[("right", (kind, i))] % p

        v = np.zeros(self.size, dtype=np.int64)
        v[self.index[()]] = 1
        for f in pr.factors:
            acc = np.zeros_like(v)
            for w, c in f.terms.items():
                x = v
                for letter in w:
                    x = mul_letter(x, letter)
                acc = (acc + x * c.eval_mod(q0, p, r)) % p
            v = acc
        return v * pr.coeff.eval_mod(q0, p, r) % p


def ideal_dimension_mod(n: int, m: int, seed_element: Optional[Element] = None,
                        rep: Optional[ModRegularRep] = None) -> int:
    """GF(p) lower bound for :func:`ideal_dimension` (any n)."""
    if n <= m:
        raise ValueError("need n > m")
    rep = rep or mod_regular_rep(n)
    p = rep.p
    r0 = rep.r_of(m)
    y = seed_element if seed_element is not None else embed_right(longest_yb(m + 1), n)
    seed = rep.coords(y, r0)
    tabs = rep.tables(r0)
    span = DenseModSpan(rep.size, p)
    frontier = [seed] if span.add(seed) else []
    mats = list(tabs.values())
    while frontier:
        new = []
        for v in frontier:
            for mat in mats:
                w = v @ mat % p
                if span.add(w):
                    new.append(w)
        frontier = new
    return span.rank


@lru_cache(maxsize=None)
def mod_regular_rep(n: int) -> ModRegularRep:
    return ModRegularRep(n)


def ideal_dimension(n: int, m: int, seed_element: Optional[Element] = None) -> int:
    """Dimension of the two-sided ideal of B_n(-q^(2m+1), q) generated by
    Y_{m+1} placed on the first m+1 strands."""
    if n <= m:
        raise ValueError("need n > m")
    reg = regular_rep(n)
    y = seed_element if seed_element is not None else embed_right(longest_yb(m + 1), n)
    seed = {k: specialize_r(v, m) for k, v in enumerate(reg.coords(y))}
    seed = {k: v for k, v in seed.items() if not v.is_zero()}
    maps = [reg.left_map(g, m) for g in reg.gens] + [reg.right_map(g, m) for g in reg.gens]
    res = saturate_vectors([seed], maps, max_rounds=100)
    if not res.converged:
        raise RuntimeError("ideal saturation did not converge")
    return res.dim


def image_rank(n: int, m: int, words: Optional[Sequence[Word]] = None) -> Tuple[int, List[List[RatFunc]]]:
    """Exact rank over Q(q) of {F(w)} at m, plus kernel coefficient vectors."""
    from .exactla import rank_kernel
    words = list(words if words is not None else standard_basis(n))
    image = functor_image(m)
    ops = [element_operator(BMWElement.word(n, w), image) for w in words]
    return rank_kernel(ops)


# ---------------------------------------------------------------------------
# traces

def trace_factor(m: int) -> RatFunc:
    """[m] r - q^m x + (q^m - q^-m)/(1 + r q^(1-2m))."""
    qm, qmm = RatFunc.monomial(1, m, 0), RatFunc.monomial(1, -m, 0)
    return quantum_int(m) * R - qm * x_param() + (qm - qmm) / (ONE + R * RatFunc.monomial(1, 1 - 2 * m, 0))


class TraceRecursionError(ValueError):
    pass


def _word_trace(w: Word, n: int) -> RatFunc:
    """Markov trace of a word by peeling the last strand (generic r)."""
    if n == 0:
        return ONE
    top = n - 1
    hits = [k for k, (_, i) in enumerate(w) if i == top]
    if not hits:
        return x_param() * _word_trace(w, n - 1)
    if len(hits) > 1:
        raise TraceRecursionError(f"letter index {top} occurs {len(hits)} times")
    k = hits[0]
    kind = w[k][0]
    rest = w[:k] + w[k + 1:]
    if kind == "T":
        return R * _word_trace(rest, n - 1)
    if kind == "E":
        return _word_trace(rest, n - 1)
    # T^-1 = T - (q - 1/q)(1 - E)
    t = R * _word_trace(rest, n - 1)
    e = _word_trace(rest, n - 1)
    return t - DELTA * (x_param() * _word_trace(rest, n - 1) - e)


@dataclass
class TraceResult:
    value: RatFunc
    matrix_value: RatFunc
    symbolic_value: Optional[RatFunc]
    agree: Optional[bool]
    note: str = ""


def markov_trace(a: Element, params) -> TraceResult:
    """Closure trace at r = -q^(2m+1), computed by contraction of F(a) and,
    where every word allows it, by the peeling recursion at generic r."""
    if isinstance(params, int):
        params = RepParams(params)
    image = functor_image(params.m)
    op = element_operator(a, image)
    mat_val = quantum_trace(op, a.n, params)
    sym = ZERO
    note = ""
    try:
        for w, c in a.expand().terms.items():
            sym = sym + c * _word_trace(w, a.n)
    except TraceRecursionError as exc:
        sym = None
        note = f"recursion inapplicable ({exc}); matrix value only"
    agree = None if sym is None else specialize_r(sym, params.m) == mat_val
    return TraceResult(mat_val, mat_val, sym, agree, note)
