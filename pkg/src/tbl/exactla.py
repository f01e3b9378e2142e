"""Sparse exact linear algebra over Q(q, r).

``Operator`` is a sparse matrix with :class:`~tbl.qfield.RatFunc` entries,
optionally tagged with a strand arity ``(s, t)``: it then maps
``V^{(x)s} -> V^{(x)t}`` and has ``dim**t`` rows and ``dim**s`` columns,
acting on column vectors.  Tensor-basis indices are read with the first
tensor factor most significant, matching :func:`kron`.

Rank and kernel computations go through :class:`EchelonSpan`, an
incremental row-echelon basis.  Two fields are supported: Q(q, r) itself
(exact) and GF(p) after substituting integers for q and r, which gives a
certified *lower* bound for the rank over Q(q, r).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .qfield import ONE, ZERO, RatFunc, parse_ratfunc, to_string

Vector = Dict[int, RatFunc]

# 2^24 - 3; products of two residues fit comfortably in int64
PRIME = 16777213


class DimensionError(ValueError):
    pass


class Operator:
    """Sparse matrix over Q(q, r), stored as ``{row: {col: value}}``."""

    __slots__ = ("rows", "cols", "data", "arity", "_cols_cache")

    def __init__(self, rows: int, cols: int, data: Optional[Dict[int, Dict[int, RatFunc]]] = None,
                 arity: Optional[Tuple[int, int]] = None):
        self.rows = rows
        self.cols = cols
        self.data = {i: row for i, row in (data or {}).items() if row}
        self.arity = arity
        self._cols_cache = None

    # construction -------------------------------------------------------
    @classmethod
    def from_entries(cls, rows: int, cols: int, entries: Iterable[Tuple[int, int, RatFunc]],
                     arity=None) -> "Operator":
        data: Dict[int, Dict[int, RatFunc]] = {}
        for i, j, v in entries:
            if not (0 <= i < rows and 0 <= j < cols):
                raise DimensionError(f"entry ({i}, {j}) outside {rows}x{cols}")
            row = data.setdefault(i, {})
            acc = row.get(j)
            v = v if acc is None else acc + v
            if v.is_zero():
                row.pop(j, None)
            else:
                row[j] = v
        return cls(rows, cols, data, arity)

    @classmethod
    def identity(cls, n: int, arity=None) -> "Operator":
        return cls(n, n, {i: {i: ONE} for i in range(n)}, arity)

    @classmethod
    def zero(cls, rows: int, cols: int, arity=None) -> "Operator":
        return cls(rows, cols, {}, arity)

    @classmethod
    def scalar(cls, value: RatFunc) -> "Operator":
        return cls(1, 1, {0: {0: value}} if not value.is_zero() else {}, (0, 0))

    # basic views --------------------------------------------------------
    @property
    def shape(self) -> Tuple[int, int]:
        return (self.rows, self.cols)

    def nnz(self) -> int:
        return sum(len(r) for r in self.data.values())

    def entries(self) -> List[Tuple[int, int, RatFunc]]:
        return [(i, j, v) for i in sorted(self.data) for j, v in sorted(self.data[i].items())]

    def get(self, i: int, j: int) -> RatFunc:
        return self.data.get(i, {}).get(j, ZERO)

    def columns(self) -> Dict[int, List[Tuple[int, RatFunc]]]:
        """Column-major view ``{col: [(row, value), ...]}``, cached."""
        if self._cols_cache is None:
            cols: Dict[int, List[Tuple[int, RatFunc]]] = {}
            for i, row in self.data.items():
                for j, v in row.items():
                    cols.setdefault(j, []).append((i, v))
            self._cols_cache = cols
        return self._cols_cache

    def is_zero(self) -> bool:
        return not self.data

    def __eq__(self, other):
        if not isinstance(other, Operator):
            return NotImplemented
        return self.shape == other.shape and self.data == other.data

    def __repr__(self):
        return f"Operator({self.rows}x{self.cols}, nnz={self.nnz()}, arity={self.arity})"

    # arithmetic ---------------------------------------------------------
    def __add__(self, other: "Operator") -> "Operator":
        if self.shape != other.shape:
            raise DimensionError(f"cannot add {self.shape} and {other.shape}")
        data = {i: dict(row) for i, row in self.data.items()}
        for i, row in other.data.items():
            tgt = data.setdefault(i, {})
            for j, v in row.items():
                s = tgt.get(j)
                s = v if s is None else s + v
                if s.is_zero():
                    tgt.pop(j, None)
                else:
                    tgt[j] = s
        return Operator(self.rows, self.cols, data, self.arity or other.arity)

    def __neg__(self) -> "Operator":
        return Operator(self.rows, self.cols,
                        {i: {j: -v for j, v in row.items()} for i, row in self.data.items()}, self.arity)

    def __sub__(self, other: "Operator") -> "Operator":
        return self + (-other)

    def scale(self, c) -> "Operator":
        c = RatFunc.coerce(c)
        if c.is_zero():
            return Operator.zero(self.rows, self.cols, self.arity)
        return Operator(self.rows, self.cols,
                        {i: {j: c * v for j, v in row.items()} for i, row in self.data.items()}, self.arity)

    def __rmul__(self, c) -> "Operator":
        return self.scale(c)

    def __matmul__(self, other: "Operator") -> "Operator":
        return matmul(self, other)

    def transpose(self) -> "Operator":
        ar = None if self.arity is None else (self.arity[1], self.arity[0])
        return Operator(self.cols, self.rows,
                        {j: {i: v for i, v in col} for j, col in self.columns().items()}, ar)

    def map_entries(self, fn) -> "Operator":
        data = {}
        for i, row in self.data.items():
            new = {}
            for j, v in row.items():
                w = fn(v)
                if not w.is_zero():
                    new[j] = w
            data[i] = new
        return Operator(self.rows, self.cols, data, self.arity)

    def apply(self, vec: Vector) -> Vector:
        """Matrix times sparse column vector."""
        cols = self.columns()
        out: Vector = {}
        for j, x in vec.items():
            for i, v in cols.get(j, ()):
                s = out.get(i)
                out[i] = x * v if s is None else s + x * v
        return {i: v for i, v in out.items() if not v.is_zero()}

    def flatten(self) -> Vector:
        """Column-major vectorization: entry (i, j) goes to ``j * rows + i``."""
        return {j * self.rows + i: v for i, row in self.data.items() for j, v in row.items()}

    # serialization ------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "arity": list(self.arity) if self.arity is not None else None,
            "entries": [[i, j, to_string(v)] for i, j, v in self.entries()],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def from_json(cls, obj) -> "Operator":
        if isinstance(obj, str):
            obj = json.loads(obj)
        arity = tuple(obj["arity"]) if obj.get("arity") is not None else None
        return cls.from_entries(obj["rows"], obj["cols"],
                                [(i, j, parse_ratfunc(s)) for i, j, s in obj["entries"]], arity)


def _add_arity(a, b):
    if a.arity is None or b.arity is None:
        return None
    return (a.arity[0] + b.arity[0], a.arity[1] + b.arity[1])


def kron(a: Operator, b: Operator) -> Operator:
    """Kronecker product; the left factor indexes the most significant digit."""
    data: Dict[int, Dict[int, RatFunc]] = {}
    b_one = all(len(row) == 1 and next(iter(row.values())).is_one() for row in b.data.values())
    for i, row_a in a.data.items():
        for k, row_b in b.data.items():
            out = {}
            for j, va in row_a.items():
                base = j * b.cols
                if b_one:
                    for l in row_b:
                        out[base + l] = va
                else:
                    for l, vb in row_b.items():
                        out[base + l] = va * vb
            data[i * b.rows + k] = out
    return Operator(a.rows * b.rows, a.cols * b.cols, data, _add_arity(a, b))


def matmul(a: Operator, b: Operator) -> Operator:
    """Exact product ``a @ b``."""
    if a.cols != b.rows:
        raise DimensionError(f"cannot multiply {a.rows}x{a.cols} by {b.rows}x{b.cols}")
    data = {}
    bdata = b.data
    for i, row in a.data.items():
        acc: Dict[int, RatFunc] = {}
        for k, va in row.items():
            rb = bdata.get(k)
            if not rb:
                continue
            for j, vb in rb.items():
                s = acc.get(j)
                acc[j] = va * vb if s is None else s + va * vb
        data[i] = {j: v for j, v in acc.items() if not v.is_zero()}
    arity = None
    if a.arity is not None and b.arity is not None:
        arity = (b.arity[0], a.arity[1])
    return Operator(a.rows, b.cols, data, arity)


def identity_power(dim: int, n: int) -> Operator:
    return Operator.identity(dim ** n, (n, n))


# ---------------------------------------------------------------------------
# local action on tensor powers

def apply_local(op: Operator, vec: Vector, slot: int, nslots: int, dim: int) -> Vector:
    """Apply a two-slot operator (``dim^2 x dim^2``) at slots ``slot, slot+1``
    (0-based) of a sparse vector in ``V^{(x)nslots}``."""
    low = dim ** (nslots - slot - 2)
    mid = dim * dim
    cols = op.columns()
    out: Vector = {}
    for idx, x in vec.items():
        hi, rest = divmod(idx, mid * low)
        pair, lo = divmod(rest, low)
        base = hi * mid * low + lo
        for i, v in cols.get(pair, ()):
            k = base + i * low
            s = out.get(k)
            out[k] = x * v if s is None else s + x * v
    return {k: v for k, v in out.items() if not v.is_zero()}


def apply_local_dense(mat: np.ndarray, arr: np.ndarray, slot: int, nslots: int, dim: int,
                      p: int = PRIME) -> np.ndarray:
    """Mod-p version of :func:`apply_local` on a stack of dense vectors.

    ``arr`` has shape ``(K, dim**nslots)``; ``mat`` is ``dim^2 x dim^2``.
    """
    K = arr.shape[0]
    a = arr.reshape(K, dim ** slot, dim * dim, dim ** (nslots - slot - 2))
    out = np.einsum("ij,kajb->kaib", mat, a) % p
    return out.reshape(K, -1)


def columns_mod(mat: np.ndarray) -> Dict[int, List[Tuple[int, int]]]:
    """Sparse column lists of a dense GF(p) matrix."""
    out = {}
    for j in range(mat.shape[1]):
        nz = np.flatnonzero(mat[:, j])
        if nz.size:
            out[j] = [(int(i), int(mat[i, j])) for i in nz]
    return out


def apply_local_mod(cols: Dict[int, List[Tuple[int, int]]], vec: Dict[int, int], slot: int, nslots: int,
                    dim: int, p: int = PRIME) -> Dict[int, int]:
    """:func:`apply_local` for sparse GF(p) vectors; ``cols`` from :func:`columns_mod`."""
    low = dim ** (nslots - slot - 2)
    mid = dim * dim
    out: Dict[int, int] = {}
    for idx, x in vec.items():
        hi, rest = divmod(idx, mid * low)
        pair, lo = divmod(rest, low)
        base = hi * mid * low + lo
        for i, v in cols.get(pair, ()):
            k = base + i * low
            out[k] = (out.get(k, 0) + x * v) % p
    return {k: v for k, v in out.items() if v}


def operator_mod(op: Operator, q_value: int, p: int = PRIME) -> np.ndarray:
    """Dense int64 image of a (small) operator in GF(p) at q = q_value."""
    out = np.zeros((op.rows, op.cols), dtype=np.int64)
    for i, j, v in op.entries():
        out[i, j] = v.eval_mod(q_value, p)
    return out


# ---------------------------------------------------------------------------
# echelon forms, rank and kernel

class _ExactField:
    zero = ZERO

    @staticmethod
    def is_zero(x):
        return x.is_zero()

    @staticmethod
    def inv(x):
        return x.inv()

    @staticmethod
    def cost(x):
        return x.complexity()


class _ModField:
    def __init__(self, p):
        self.p = p
        self.zero = 0

    @staticmethod
    def is_zero(x):
        return x == 0

    def inv(self, x):
        return pow(x, self.p - 2, self.p)

    @staticmethod
    def cost(x):
        return 0


class EchelonSpan:
    """Incremental echelon basis of a span of sparse vectors.

    Every stored row has a pivot coordinate with value 1 that is zero in all
    later-inserted rows.  When ``track`` is set, each row also records its
    expression in terms of the *inserted* vectors, so that dependent
    insertions yield exact kernel (relation) vectors.

    The pivot of a new row is the nonzero coordinate of least complexity
    (number of stored terms); this limits expression swell over Q(q, r).
    """

    def __init__(self, modulus: Optional[int] = None, track: bool = False):
        self.field = _ModField(modulus) if modulus else _ExactField()
        self.modulus = modulus
        self.track = track
        self.rows: List[Tuple[int, dict, dict]] = []  # (pivot, vector, combination)
        self.pivots: Dict[int, int] = {}
        self.relations: List[Dict[int, object]] = []
        self.count = 0

    def __len__(self):
        return len(self.rows)

    @property
    def rank(self) -> int:
        return len(self.rows)

    def _one(self):
        return 1 if self.modulus else ONE

    def reduce(self, vec: dict, combo: Optional[dict] = None):
        """Reduce ``vec`` against the basis; returns (residual, combination)."""
        f = self.field
        p = self.modulus
        vec = dict(vec)
        combo = dict(combo) if combo is not None else None
        for pos, (piv, row, rcombo) in enumerate(self.rows):
            c = vec.get(piv)
            if c is None:
                continue
            for k, v in row.items():
                s = vec.get(k, f.zero)
                s = (s - c * v) % p if p else s - c * v
                if f.is_zero(s):
                    vec.pop(k, None)
                else:
                    vec[k] = s
            if combo is not None:
                for k, v in rcombo.items():
                    s = combo.get(k, f.zero)
                    s = (s - c * v) % p if p else s - c * v
                    if f.is_zero(s):
                        combo.pop(k, None)
                    else:
                        combo[k] = s
        return vec, combo

    def add(self, vec: dict) -> bool:
        """Insert a vector; return True if it enlarged the span."""
        f = self.field
        p = self.modulus
        if p:
            vec = {k: v % p for k, v in vec.items() if v % p}
        else:
            vec = {k: v for k, v in vec.items() if not v.is_zero()}
        idx = self.count
        self.count += 1
        combo = {idx: self._one()} if self.track else None
        vec, combo = self.reduce(vec, combo)
        if not vec:
            if self.track:
                self.relations.append(combo)
            return False
        piv = min(vec, key=lambda k: (f.cost(vec[k]), k))
        inv = f.inv(vec[piv])
        if p:
            vec = {k: v * inv % p for k, v in vec.items()}
            if combo is not None:
                combo = {k: v * inv % p for k, v in combo.items()}
        else:
            vec = {k: v * inv for k, v in vec.items()}
            if combo is not None:
                combo = {k: v * inv for k, v in combo.items()}
        # keep earlier rows clear of the new pivot so reduction is one pass
        for pos, (op_, row, rcombo) in enumerate(self.rows):
            c = row.get(piv)
            if c is None:
                continue
            for k, v in vec.items():
                s = row.get(k, f.zero)
                s = (s - c * v) % p if p else s - c * v
                if f.is_zero(s):
                    row.pop(k, None)
                else:
                    row[k] = s
            if combo is not None:
                for k, v in combo.items():
                    s = rcombo.get(k, f.zero)
                    s = (s - c * v) % p if p else s - c * v
                    if f.is_zero(s):
                        rcombo.pop(k, None)
                    else:
                        rcombo[k] = s
        self.pivots[piv] = len(self.rows)
        self.rows.append((piv, vec, combo or {}))
        return True

    def contains(self, vec: dict) -> bool:
        res, _ = self.reduce({k: v for k, v in vec.items()})
        return not res

    def coordinates(self, vec: dict) -> Optional[List]:
        """Coefficients of ``vec`` in the inserted independent vectors, or None
        if ``vec`` is outside the span.  Requires ``track``."""
        if not self.track:
            raise ValueError("coordinates need a tracking EchelonSpan")
        res, combo = self.reduce(vec, {})
        if res:
            return None
        # combo currently holds -(sum c_row * combo_row); negate
        return {k: (-v % self.modulus) if self.modulus else -v for k, v in combo.items()}


def _as_vectors(a) -> List[Vector]:
    if isinstance(a, Operator):
        cols = a.columns()
        return [dict(cols.get(j, ())) for j in range(a.cols)]
    out = []
    for x in a:
        out.append(x.flatten() if isinstance(x, Operator) else dict(x))
    return out


def rank_kernel(a) -> Tuple[int, List[List[RatFunc]]]:
    """Rank over Q(q, r) and an exact kernel basis.

    ``a`` is an Operator (its columns are the vectors) or a list of
    Operators / sparse vectors (Operators are flattened column-major).
    Kernel vectors are coefficient lists ``c`` with ``sum c_k v_k = 0``.
    """
    vecs = _as_vectors(a)
    span = EchelonSpan(track=True)
    for v in vecs:
        span.add(v)
    kernel = []
    for rel in span.relations:
        kernel.append([rel.get(k, ZERO) for k in range(len(vecs))])
    return span.rank, kernel


def rank_mod_p(vectors: Sequence[dict], p: int = PRIME) -> int:
    span = EchelonSpan(modulus=p)
    for v in vectors:
        span.add(v)
    return span.rank


class DenseModSpan:
    """Echelon basis for dense GF(p) vectors (numpy), for large spans."""

    def __init__(self, length: int, p: int = PRIME):
        self.p = p
        self.length = length
        self.basis = np.zeros((0, length), dtype=np.int64)
        self.pivots: List[int] = []

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, v: np.ndarray) -> np.ndarray:
        v = v.astype(np.int64) % self.p
        for row, piv in zip(self.basis, self.pivots):
            c = v[piv]
            if c:
                v = (v - c * row) % self.p
        return v

    def add(self, v: np.ndarray) -> bool:
        v = self.reduce(v)
        nz = np.flatnonzero(v)
        if nz.size == 0:
            return False
        piv = int(nz[0])
        v = v * pow(int(v[piv]), self.p - 2, self.p) % self.p
        if self.rank:
            c = self.basis[:, piv].copy()
            self.basis = (self.basis - np.outer(c, v)) % self.p
        self.basis = np.vstack([self.basis, v[None, :]])
        self.pivots.append(piv)
        return True


@dataclass
class SaturationResult:
    basis: List[object]
    dim: int
    converged: bool
    rounds: int
    labels: List[object] = field(default_factory=list)


def span_saturate(seed: Sequence[Operator], multipliers: Sequence[Operator], side: str = "both",
                  max_rounds: int = 20) -> SaturationResult:
    """Close span(seed) under multiplication by ``multipliers``.

    ``side='left'`` uses ``g @ x``, ``'right'`` uses ``x @ g``, ``'both'``
    uses both.  Returns a maximal independent subset of the generated
    operators and its size; ``converged`` is False if ``max_rounds`` was hit
    before the rank stopped growing.
    """
    if side not in ("left", "right", "both"):
        raise ValueError("side must be 'left', 'right' or 'both'")
    span = EchelonSpan()
    basis: List[Operator] = []
    frontier = []
    for s in seed:
        if span.add(s.flatten()):
            basis.append(s)
            frontier.append(s)
    rounds = 0
    while frontier and rounds < max_rounds:
        rounds += 1
        new = []
        for x in frontier:
            prods = []
            if side in ("left", "both"):
                prods += [matmul(g, x) for g in multipliers]
            if side in ("right", "both"):
                prods += [matmul(x, g) for g in multipliers]
            for y in prods:
                if span.add(y.flatten()):
                    basis.append(y)
                    new.append(y)
        frontier = new
    return SaturationResult(basis, len(basis), not frontier, rounds)


def saturate_vectors(seed: Sequence[dict], maps: Sequence, max_rounds: int = 50,
                     modulus: Optional[int] = None) -> SaturationResult:
    """Like :func:`span_saturate` for vectors and arbitrary linear maps
    (callables on sparse vectors)."""
    span = EchelonSpan(modulus=modulus)
    basis, frontier = [], []
    for s in seed:
        if span.add(s):
            basis.append(s)
            frontier.append(s)
    rounds = 0
    while frontier and rounds < max_rounds:
        rounds += 1
        new = []
        for x in frontier:
            for f in maps:
                y = f(x)
                if span.add(y):
                    basis.append(y)
                    new.append(y)
        frontier = new
    return SaturationResult(basis, len(basis), not frontier, rounds)
