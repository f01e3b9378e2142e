import numpy as np
import pytest
from hypothesis import given, strategies as st

from tbl.exactla import (PRIME, DenseModSpan, DimensionError, EchelonSpan, Operator, apply_local,
                         apply_local_mod, columns_mod, kron, matmul, operator_mod, rank_kernel, rank_mod_p,
                         saturate_vectors, span_saturate)
from tbl.qfield import ONE, Q, R, ZERO, RatFunc

from strategies import laurents


@st.composite
def operators(draw, rows=None, cols=None, density=0.5):
    rows = rows or draw(st.integers(1, 4))
    cols = cols or draw(st.integers(1, 4))
    entries = []
    for i in range(rows):
        for j in range(cols):
            if draw(st.floats(0, 1)) < density:
                entries.append((i, j, draw(laurents(max_terms=2))))
    return Operator.from_entries(rows, cols, entries)


def dense(op):
    return [[op.get(i, j) for j in range(op.cols)] for i in range(op.rows)]


def test_identity_and_zero():
    i3 = Operator.identity(3)
    assert i3.nnz() == 3 and i3.get(1, 1) == ONE and i3.get(0, 1) == ZERO
    assert Operator.zero(2, 3).is_zero()
    assert Operator.scalar(ZERO).is_zero()


def test_from_entries_accumulates_and_cancels():
    op = Operator.from_entries(2, 2, [(0, 0, Q), (0, 0, -Q), (1, 0, ONE), (1, 0, R)])
    assert op.nnz() == 1
    assert op.get(1, 0) == ONE + R
    with pytest.raises(DimensionError):
        Operator.from_entries(2, 2, [(2, 0, ONE)])


def test_matmul_shape_error():
    with pytest.raises(DimensionError):
        matmul(Operator.identity(2), Operator.identity(3))


@given(operators(rows=3, cols=2), operators(rows=2, cols=4), operators(rows=4, cols=2))
def test_matmul_associative(a, b, c):
    assert matmul(matmul(a, b), c) == matmul(a, matmul(b, c))


@given(operators(rows=2, cols=3), operators(rows=3, cols=2))
def test_matmul_matches_dense_product(a, b):
    da, db = dense(a), dense(b)
    prod = matmul(a, b)
    for i in range(2):
        for j in range(2):
            want = ZERO
            for k in range(3):
                want = want + da[i][k] * db[k][j]
            assert prod.get(i, j) == want


@given(operators(rows=2, cols=2), operators(rows=2, cols=3), operators(rows=2, cols=2), operators(rows=3, cols=2))
def test_kron_mixed_product(a, b, c, d):
    assert matmul(kron(a, b), kron(c, d)) == kron(matmul(a, c), matmul(b, d))


def test_kron_index_convention():
    a = Operator.from_entries(2, 2, [(0, 1, Q)])
    b = Operator.from_entries(3, 3, [(2, 0, R)])
    k = kron(a, b)
    assert k.shape == (6, 6)
    assert k.get(0 * 3 + 2, 1 * 3 + 0) == Q * R
    assert k.nnz() == 1


@given(operators())
def test_json_round_trip(a):
    assert Operator.from_json(a.dumps()) == a
    assert Operator.from_json(a.to_json()) == a


@given(operators(), operators())
def test_add_sub_neg(a, b):
    if a.shape != b.shape:
        with pytest.raises(DimensionError):
            a + b
        return
    assert (a + b) - b == a
    assert a + (-a) == Operator.zero(*a.shape)


@given(operators(rows=3, cols=3))
def test_transpose_and_apply(a):
    v = {0: Q, 2: ONE}
    av = a.apply(v)
    at = a.transpose()
    for i in range(3):
        want = a.get(i, 0) * Q + a.get(i, 2)
        assert av.get(i, ZERO) == want
        assert at.get(0, i) == a.get(i, 0)


@given(operators(rows=4, cols=4, density=0.4), st.integers(0, 2), st.integers(0, 15))
def test_apply_local_matches_kron(op, slot, idx):
    nslots, dim = 4, 2
    idx = idx % dim ** nslots
    full = kron(kron(Operator.identity(dim ** slot), op), Operator.identity(dim ** (nslots - slot - 2)))
    vec = {idx: Q + 1}
    assert apply_local(op, vec, slot, nslots, dim) == {k: v for k, v in full.apply(vec).items() if not v.is_zero()}


@st.composite
def q_operators(draw, size=4):
    entries = [(i, j, draw(laurents(max_terms=2, with_r=False)))
               for i in range(size) for j in range(size) if draw(st.booleans())]
    return Operator.from_entries(size, size, entries)


@given(q_operators(), st.integers(0, 1), st.integers(2, 10_000))
def test_apply_local_mod_matches_exact(op, slot, q0):
    p = PRIME
    exact = apply_local(op, {3: ONE, 5: Q}, slot, 3, 2)
    got = apply_local_mod(columns_mod(operator_mod(op, q0, p)), {3: 1, 5: q0}, slot, 3, 2, p)
    want = {k: v.eval_mod(q0, p) for k, v in exact.items()}
    assert {k: v for k, v in got.items() if v} == {k: v for k, v in want.items() if v}


def test_rank_kernel_exact():
    v1 = {0: ONE, 1: Q}
    v2 = {1: R, 2: ONE}
    v3 = {0: R, 1: Q * R + R, 2: ONE}  # r v1 + v2
    rank, kernel = rank_kernel([v1, v2, v3])
    assert rank == 2
    assert len(kernel) == 1
    c = kernel[0]
    combo = {}
    for coeff, v in zip(c, (v1, v2, v3)):
        for k, x in v.items():
            combo[k] = combo.get(k, ZERO) + coeff * x
    assert all(x.is_zero() for x in combo.values())


@given(st.lists(st.lists(st.integers(-3, 3), min_size=4, max_size=4), min_size=1, max_size=6))
def test_rank_agrees_with_numpy_on_integer_matrices(rows):
    vecs = [{j: RatFunc.coerce(x) for j, x in enumerate(r) if x} for r in rows]
    rank, kernel = rank_kernel(vecs)
    assert rank == np.linalg.matrix_rank(np.array(rows, dtype=float))
    assert rank + len(kernel) == len(rows)
    assert rank_mod_p([{j: x for j, x in enumerate(r) if x} for r in rows]) == rank


def test_echelon_coordinates():
    span = EchelonSpan(track=True)
    a, b = {0: ONE, 1: Q}, {1: ONE, 2: R}
    span.add(a)
    span.add(b)
    target = {0: Q, 1: Q * Q + 3, 2: 3 * R}
    coords = span.coordinates(target)
    assert coords[0] == Q and coords[1] == RatFunc.coerce(3)
    assert span.coordinates({3: ONE}) is None
    assert span.contains({0: 2 * ONE, 1: 2 * Q})
    with pytest.raises(ValueError):
        EchelonSpan().coordinates(target)


def test_dense_mod_span():
    span = DenseModSpan(3, 7)
    assert span.add(np.array([1, 2, 3]))
    assert not span.add(np.array([2, 4, 6]))
    assert span.add(np.array([0, 1, 0]))
    assert span.rank == 2


def test_saturation_of_shift():
    shift = lambda v: {k + 1: x for k, x in v.items() if k + 1 < 5}
    res = saturate_vectors([{0: ONE}], [shift])
    assert res.dim == 5 and res.converged


def test_span_saturate_matrix_algebra():
    e12 = Operator.from_entries(2, 2, [(0, 1, ONE)])
    e21 = Operator.from_entries(2, 2, [(1, 0, ONE)])
    res = span_saturate([e12], [e12, e21], side="both")
    assert res.dim == 4
    left = span_saturate([e12], [e21], side="left")
    assert left.dim == 2
