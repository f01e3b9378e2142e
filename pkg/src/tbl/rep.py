"""The symplectic R-matrix data and the functor from tangles to operators.

Basis vectors ``v_0 .. v_{2m-1}`` are 0-based here; the partner index is
``i' = 2m - 1 - i``.  Weights are ``rho = (m, ..., 1, -1, ..., -m)`` and
``eps_i = sign(rho_i)``.

Matrix conventions
------------------
A morphism ``s -> t`` becomes a ``dim^t x dim^s`` matrix acting on column
vectors.  Since ``compose(f, g)`` puts ``f`` above ``g`` and diagrams are
read top to bottom, the functor sends it to ``F(g) @ F(f)``.  Consequently
words in the BMW generators act on the right: ``F(ab) = F(b) F(a)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .exactla import Operator, kron, matmul, operator_mod, PRIME
from .qfield import DELTA, ONE, ZERO, RatFunc, quantum_int, r_value, specialize_r, x_param
from .tangles import LinTangle, Tangle, as_lin, cap as cap_tangle, cup as cup_tangle


def qpow(k: int) -> RatFunc:
    return RatFunc.monomial(1, k, 0)


@dataclass(frozen=True)
class RepParams:
    m: int

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be >= 1")

    @property
    def dim(self) -> int:
        return 2 * self.m

    @property
    def rho(self) -> Tuple[int, ...]:
        m = self.m
        return tuple(list(range(m, 0, -1)) + list(range(-1, -m - 1, -1)))

    @property
    def eps(self) -> Tuple[int, ...]:
        return tuple(1 if x > 0 else -1 for x in self.rho)

    def prime(self, i: int) -> int:
        return self.dim - 1 - i

    def form(self, i: int, j: int) -> int:
        """Skew pairing (v_i, v_j) in the 0-based basis."""
        return self.eps[i] if j == self.prime(i) else 0

    @property
    def r(self) -> RatFunc:
        return r_value(self.m)

    @property
    def loop(self) -> RatFunc:
        """Closed loop value 1 - [2m+1]."""
        return ONE - quantum_int(2 * self.m + 1)


def build_rep(m: int) -> RepParams:
    return RepParams(m)


def _pair(dim, a, b):
    return a * dim + b


def _elementary_tensor(dim, a, b, c, d):
    """Position of E_{a,b} (x) E_{c,d}: sends v_b (x) v_d to v_a (x) v_c."""
    return _pair(dim, a, c), _pair(dim, b, d)


def beta_gamma(params: RepParams) -> Tuple[Operator, Operator, Operator]:
    """Return (beta', gamma', beta'^-1) as dim^2 x dim^2 operators."""
    dim, rho, eps, pr = params.dim, params.rho, params.eps, params.prime
    q, qi = qpow(1), qpow(-1)
    entries = []
    for i in range(dim):
        entries.append((*_elementary_tensor(dim, i, i, i, i), q))
        entries.append((*_elementary_tensor(dim, i, pr(i), pr(i), i), qi))
    for i in range(dim):
        for j in range(dim):
            if j != i and j != pr(i):
                entries.append((*_elementary_tensor(dim, i, j, j, i), ONE))
    for i in range(dim):
        for j in range(i + 1, dim):
            entries.append((*_elementary_tensor(dim, i, i, j, j), DELTA))
            c = qpow(rho[j] - rho[i]) * DELTA * (-eps[i] * eps[j])
            entries.append((*_elementary_tensor(dim, i, pr(j), pr(i), j), c))
    beta = Operator.from_entries(dim * dim, dim * dim, entries, (2, 2))
    g_entries = []
    for i in range(dim):
        for j in range(dim):
            c = qpow(rho[j] - rho[i]) * (eps[i] * eps[j])
            g_entries.append((*_elementary_tensor(dim, i, pr(j), pr(i), j), c))
    gamma = Operator.from_entries(dim * dim, dim * dim, g_entries, (2, 2))
    ident = Operator.identity(dim * dim, (2, 2))
    beta_inv = beta - (ident - gamma).scale(DELTA)
    return beta, gamma, beta_inv


def alpha_coeff(params: RepParams, k: int) -> RatFunc:
    """Coefficient of v_k (x) v_k' in the coevaluation vector."""
    return qpow(-params.rho[k]) * params.eps[k]


def ev_coeff(params: RepParams, i: int, j: int) -> RatFunc:
    """E(v_i (x) v_j); nonzero only for j = i'."""
    if j != params.prime(i):
        return ZERO
    return qpow(-params.rho[i]) * params.eps[j]


def ev_coeff_printed(params: RepParams, i: int, j: int) -> RatFunc:
    """The variant q^{-rho_i} eps_j (v_i, v_j), which carries an extra eps_i."""
    return qpow(-params.rho[i]) * (params.eps[j] * params.form(i, j))


def coev_ev(params: RepParams, printed: bool = False) -> Tuple[Operator, Operator]:
    """Coevaluation C (0 -> 2, a column) and evaluation E (2 -> 0, a row)."""
    dim = params.dim
    ev = ev_coeff_printed if printed else ev_coeff
    C = Operator.from_entries(dim * dim, 1, [(_pair(dim, k, params.prime(k)), 0, alpha_coeff(params, k))
                                             for k in range(dim)], (0, 2))
    E = Operator.from_entries(1, dim * dim, [(0, _pair(dim, i, params.prime(i)), ev(params, i, params.prime(i)))
                                             for i in range(dim)], (2, 0))
    return C, E


MUTATIONS = ("R", "E", "R_q2")


class FunctorImage:
    """Images of the elementary tangles for a fixed m, plus evaluation.

    ``mutate`` perturbs the data for negative controls:
    ``'R'`` flips the sign of one off-diagonal entry of the R-matrix,
    ``'E'`` flips the sign of one entry of the evaluation map and
    ``'R_q2'`` substitutes q -> q^2 in the R-matrix.
    Unmutated images are checked against the local identities at construction
    (the three-strand braid check only while dim^3 <= ``braid_check_limit``).
    """

    braid_check_limit = 1000

    def __init__(self, params, mutate: Optional[str] = None, check: bool = True):
        if isinstance(params, int):
            params = RepParams(params)
        self.params = params
        self.mutation = mutate
        dim = params.dim
        beta, gamma, beta_inv = beta_gamma(params)
        C, E = coev_ev(params)
        if mutate == "R":
            i, j = _pair(dim, 0, 1), _pair(dim, 1, 0)
            v = beta.get(i, j)
            beta = beta - Operator.from_entries(beta.rows, beta.cols, [(i, j, v + v)], (2, 2))
        elif mutate == "R_q2":
            from .qfield import CTX
            q2 = lambda f: RatFunc(f.num.compose(CTX.gens()[0] ** 2, CTX.gens()[1]),
                                   f.den.compose(CTX.gens()[0] ** 2, CTX.gens()[1]))
            beta = beta.map_entries(q2)
        elif mutate == "E":
            j = _pair(dim, 0, params.prime(0))
            E = Operator.from_entries(1, dim * dim, [(0, k, -v if k == j else v) for _, k, v in E.entries()], (2, 0))
        elif mutate is not None:
            raise ValueError(f"unknown mutation {mutate!r}; choose from {MUTATIONS}")
        if mutate in ("R", "R_q2"):
            beta_inv = beta - (Operator.identity(dim * dim, (2, 2)) - gamma).scale(DELTA)
        self.beta, self.gamma, self.beta_inv = beta, gamma, beta_inv
        self.C, self.E = C, E
        self.leaf_images = {
            "I": Operator.identity(dim, (1, 1)),
            "X": beta,
            "Xop": beta_inv,
            "A": C,
            "U": E,
            "id0": Operator.identity(1, (0, 0)),
        }
        self._cache: Dict[Tangle, Operator] = {}
        if check and mutate is None:
            bad = [k for k, ok in self.local_identities().items() if not ok]
            if bad:
                raise AssertionError(f"local identities fail for m={params.m}: {bad}")

    @property
    def m(self):
        return self.params.m

    @property
    def dim(self):
        return self.params.dim

    def scalar(self, c: RatFunc) -> RatFunc:
        return specialize_r(c, self.params.m)

    def local_identities(self, full: bool = False) -> Dict[str, bool]:
        """The six identities for (R, C, E), composed left to right."""
        dim = self.dim
        R, Ri, C, E = self.beta, self.beta_inv, self.C, self.E
        idv = Operator.identity(dim, (1, 1))
        id2 = Operator.identity(dim * dim, (2, 2))
        r_inv = self.params.r.inv()
        CE = matmul(C, E)
        out = {}
        out["skein"] = matmul(R, R) == id2 + (R - CE.scale(r_inv)).scale(DELTA)
        if full or dim ** 3 <= self.braid_check_limit:
            out["braid"] = (matmul(kron(R, idv), matmul(kron(idv, R), kron(R, idv)))
                            == matmul(kron(idv, R), matmul(kron(R, idv), kron(idv, R))))
        out["twist"] = matmul(R, C) == C.scale(r_inv)
        out["loop"] = matmul(E, C) == Operator.scalar(self.params.loop)
        out["slide"] = matmul(kron(idv, R), kron(C, idv)) == matmul(kron(Ri, idv), kron(idv, C))
        out["snake"] = matmul(kron(idv, E), kron(C, idv)) == idv
        return out

    def __call__(self, D) -> Operator:
        return F_eval(D, self)


def F_eval(D, image: "FunctorImage") -> Operator:
    """Evaluate a Tangle or LinTangle to an exact operator."""
    if not isinstance(image, FunctorImage):
        image = functor_image(image.m if isinstance(image, RepParams) else int(image))
    dim = image.dim
    if isinstance(D, Tangle):
        return _eval_tangle(D, image)
    D = as_lin(D)
    out = Operator.zero(dim ** D.t, dim ** D.s, (D.s, D.t))
    for d, c in D.terms.items():
        out = out + _eval_tangle(d, image).scale(image.scalar(c))
    return out


def _eval_tangle(d: Tangle, image: FunctorImage) -> Operator:
    cache = image._cache
    hit = cache.get(d)
    if hit is not None:
        return hit
    if d.is_leaf:
        out = image.leaf_images[d.op]
    else:
        f, g = d.args
        if d.op == "compose":
            out = matmul(_eval_tangle(g, image), _eval_tangle(f, image))
        else:
            out = kron(_eval_tangle(f, image), _eval_tangle(g, image))
    cache[d] = out
    return out


@lru_cache(maxsize=8)
def functor_image(m: int) -> FunctorImage:
    return FunctorImage(RepParams(m))


def place(op: Operator, i: int, n: int, dim: int) -> Operator:
    """``id^{(x)i} (x) op (x) id^{(x)(n-i-2)}`` for a two-strand op, 0-based i."""
    left = Operator.identity(dim ** i, (i, i))
    right = Operator.identity(dim ** (n - i - 2), (n - i - 2, n - i - 2))
    return kron(kron(left, op), right)


def bmw_action(n: int, params) -> Tuple[List[Operator], List[Operator]]:
    """Placed copies ([beta'_1..beta'_{n-1}], [gamma'_1..gamma'_{n-1}])."""
    if n < 2:
        raise ValueError("n must be >= 2")
    image = params if isinstance(params, FunctorImage) else functor_image(params.m)
    dim = image.dim
    betas = [place(image.beta, i, n, dim) for i in range(n - 1)]
    gammas = [place(image.gamma, i, n, dim) for i in range(n - 1)]
    return betas, gammas


# ---------------------------------------------------------------------------
# contractions for duals and traces

def _digits(idx: int, n: int, dim: int) -> Tuple[int, ...]:
    out = []
    for _ in range(n):
        idx, d = divmod(idx, dim)
        out.append(d)
    return tuple(reversed(out))


def _index(digits: Sequence[int], dim: int) -> int:
    out = 0
    for d in digits:
        out = out * dim + d
    return out


def _bar(params, digits):
    """Reverse a multi-index and replace each entry by its partner."""
    return tuple(params.prime(d) for d in reversed(digits))


def dual_operator(op: Operator, s: int, t: int, params) -> Operator:
    """F(D*) computed from F(D) for D: s -> t without building the sandwich.

    Column ``a`` of the result is ``sum_k c_k E_t(a, abar) F(D)[abar, k]``
    placed at row ``kbar``, with ``c_k`` the nested coevaluation weight.
    """
    if isinstance(params, FunctorImage):
        image = params
        params = image.params
    else:
        image = None
    dim = params.dim
    if op.shape != (dim ** t, dim ** s):
        raise ValueError(f"operator shape {op.shape} does not match arity {s}->{t}")
    ev = (lambda i, j: image.E.get(0, _pair(dim, i, j))) if image else (lambda i, j: ev_coeff(params, i, j))
    co = (lambda k: image.C.get(_pair(dim, k, params.prime(k)), 0)) if image else (lambda k: alpha_coeff(params, k))
    entries = []
    for row, col, v in op.entries():
        abar = _digits(row, t, dim)
        k = _digits(col, s, dim)
        a = _bar(params, abar)
        w = ONE
        for i in range(t):
            w = w * ev(a[i], abar[t - 1 - i])
        for kk in k:
            w = w * co(kk)
        if w.is_zero():
            continue
        entries.append((_index(_bar(params, k), dim), _index(a, dim), w * v))
    return Operator.from_entries(dim ** s, dim ** t, entries, (t, s))


def bend_U_operator(op: Operator, s: int, t: int, image: "FunctorImage") -> Operator:
    """Operator-side bend of ``op: n -> s+t`` to ``n+t -> s`` using the cap images."""
    dim = image.dim
    cap = F_eval(cap_tangle(t), image)
    left = kron(op, Operator.identity(dim ** t, (t, t)))
    right = kron(Operator.identity(dim ** s, (s, s)), cap)
    return matmul(right, left)


def bend_A_operator(op: Operator, n: int, t: int, image: "FunctorImage") -> Operator:
    """Operator-side bend of ``op: n+t -> s`` to ``n -> s+t`` using the cup images."""
    dim = image.dim
    cup = F_eval(cup_tangle(t), image)
    left = kron(Operator.identity(dim ** n, (n, n)), cup)
    right = kron(op, Operator.identity(dim ** t, (t, t)))
    return matmul(right, left)


def trace_weights(n: int, params: RepParams) -> Dict[int, RatFunc]:
    """Diagonal weights of the closure: prod_i (-q^{-2 rho_{k_i}})."""
    dim = params.dim
    single = [qpow(-2 * params.rho[k]) * -1 for k in range(dim)]
    out = {}
    for ks in product(range(dim), repeat=n):
        w = ONE
        for k in ks:
            w = w * single[k]
        out[_index(ks, dim)] = w
    return out


def quantum_trace(op: Operator, n: int, params: RepParams) -> RatFunc:
    """F of the trace closure of an n -> n diagram with image ``op``."""
    dim = params.dim
    total = ZERO
    single = [qpow(-2 * params.rho[k]) * -1 for k in range(dim)]
    for i, row in op.data.items():
        v = row.get(i)
        if v is None:
            continue
        w = ONE
        for k in _digits(i, n, dim):
            w = w * single[k]
        total = total + w * v
    return total


# ---------------------------------------------------------------------------
# GF(p) images

@dataclass
class ModImage:
    """Dense GF(p) images of the local operators at q = q0, r = -q0^(2m+1)."""
    m: int
    q0: int
    p: int = PRIME
    beta: np.ndarray = field(init=False)
    gamma: np.ndarray = field(init=False)
    beta_inv: np.ndarray = field(init=False)

    def __post_init__(self):
        image = FunctorImage(RepParams(self.m), check=False)
        self.beta = operator_mod(image.beta, self.q0, self.p)
        self.gamma = operator_mod(image.gamma, self.q0, self.p)
        self.beta_inv = operator_mod(image.beta_inv, self.q0, self.p)

    @property
    def dim(self):
        return 2 * self.m

    @property
    def r(self) -> int:
        return (-pow(self.q0, 2 * self.m + 1, self.p)) % self.p

    def scalar(self, c: RatFunc) -> int:
        return c.eval_mod(self.q0, self.p, self.r)
