import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from tbl import tangles as tg
from tbl.exactla import Operator, kron, matmul
from tbl.qfield import DELTA, ONE, limit_q1, quantum_int, x_param
from tbl.rep import (F_eval, FunctorImage, RepParams, bend_A_operator, bend_U_operator, coev_ev,
                     dual_operator, functor_image, quantum_trace, trace_weights)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_local_identities_hold(m):
    image = functor_image(m)
    out = image.local_identities(full=True)
    assert set(out) == {"skein", "braid", "twist", "loop", "slide", "snake"}
    assert all(out.values()), out


def test_rho_and_partner():
    p = RepParams(2)
    assert p.rho == (2, 1, -1, -2)
    assert p.eps == (1, 1, -1, -1)
    assert [p.prime(i) for i in range(4)] == [3, 2, 1, 0]
    assert p.form(0, 3) == 1 and p.form(3, 0) == -1 and p.form(0, 2) == 0


@pytest.mark.parametrize("m", [1, 2])
def test_printed_evaluation_breaks_loop_and_gamma(m):
    # the literal pairing form of E carries an extra sign eps_i; it breaks the loop value
    image = functor_image(m)
    C, E = coev_ev(image.params, printed=True)
    assert matmul(E, C).get(0, 0) != image.params.loop
    assert matmul(C, E) != image.gamma
    C, E = coev_ev(image.params)
    assert matmul(E, C).get(0, 0) == image.params.loop
    assert matmul(C, E) == image.gamma


@pytest.mark.parametrize("m", [1, 2])
def test_xop_sign(m):
    image = functor_image(m)
    ident = Operator.identity(image.dim ** 2, (2, 2))
    assert F_eval(tg.compose(tg.X, tg.XOP), image) == ident
    wrong = image.beta + (ident - image.gamma).scale(DELTA)
    assert matmul(image.beta, wrong) != ident


def test_duals_of_generators():
    image = functor_image(1)
    assert F_eval(tg.dual(tg.A), image) == F_eval(tg.U, image)
    assert F_eval(tg.dual(tg.U), image) == F_eval(tg.A, image)
    assert F_eval(tg.dual(tg.X), image) == F_eval(tg.X, image)
    assert F_eval(tg.dual(tg.I), image) == F_eval(tg.I, image)


@settings(max_examples=25)
@given(st.sampled_from([(1, 1), (2, 0), (0, 2), (2, 2), (1, 3), (3, 1)]), st.integers(0, 10_000))
def test_dual_operator_matches_sandwich(shape, seed):
    s, t = shape
    image = functor_image(1)
    d = tg.random_lintangle(s, t, random.Random(seed), layers=3)
    assert dual_operator(F_eval(d, image), s, t, image) == F_eval(tg.dual(d), image)


def test_dual_operator_rank2():
    image = functor_image(2)
    d = tg.random_lintangle(2, 2, random.Random(5), layers=3)
    assert dual_operator(F_eval(d, image), 2, 2, image.params) == F_eval(tg.dual(d), image)


def test_dual_operator_shape_check():
    image = functor_image(1)
    with pytest.raises(ValueError):
        dual_operator(image.beta, 1, 1, image)


@pytest.mark.parametrize("m, n", [(1, 1), (1, 2), (2, 1), (2, 2), (1, 3)])
def test_quantum_trace_of_identity(m, n):
    params = RepParams(m)
    ident = Operator.identity(params.dim ** n, (n, n))
    x = params.loop
    assert quantum_trace(ident, n, params) == x ** n
    assert sum(trace_weights(n, params).values(), start=0 * ONE) == x ** n


@settings(max_examples=15)
@given(st.integers(0, 10_000))
def test_quantum_trace_matches_closure(seed):
    image = functor_image(1)
    d = tg.random_lintangle(2, 2, random.Random(seed), layers=3)
    val = F_eval(tg.trace_closure(d), image).get(0, 0)
    assert quantum_trace(F_eval(d, image), 2, image.params) == val


def test_loop_value_and_x_param():
    for m in (1, 2, 3):
        p = RepParams(m)
        assert p.loop == ONE - quantum_int(2 * m + 1)
        assert x_param().specialize_r(m) == p.loop


@pytest.mark.parametrize("m", [1, 2])
def test_classical_limits(m):
    image = functor_image(m)
    assert limit_q1(image.params.loop) == Fraction(-2 * m)
    assert limit_q1(image.params.r) == -1
    # at q = 1 the R-matrix becomes the flip, whose square is 1
    for i, j, v in image.beta.entries():
        want = 1 if (i % image.dim, i // image.dim) == (j // image.dim, j % image.dim) else 0
        assert limit_q1(v) == want


@pytest.mark.parametrize("mut, broken", [("R", "braid"), ("E", "loop"), ("R_q2", "skein")])
def test_mutations_break_an_identity(mut, broken):
    image = FunctorImage(RepParams(1), mutate=mut, check=False)
    assert not image.local_identities(full=True)[broken]


def test_unknown_mutation():
    with pytest.raises(ValueError):
        FunctorImage(RepParams(1), mutate="Z")


@settings(max_examples=15)
@given(st.sampled_from([(1, 1, 2), (2, 1, 1), (0, 2, 2), (1, 2, 1)]), st.integers(0, 10_000))
def test_bend_operators_match_tangles(shape, seed):
    n, s, t = shape
    image = functor_image(1)
    d = tg.random_lintangle(n, s + t, random.Random(seed), layers=3)
    op = F_eval(d, image)
    bent = bend_U_operator(op, s, t, image)
    assert bent == F_eval(tg.bend_U(d, s, t), image)
    assert bend_A_operator(bent, n, t, image) == op


def test_place_and_action_shapes():
    from tbl.rep import bmw_action
    betas, gammas = bmw_action(3, RepParams(1))
    assert len(betas) == 2 and betas[0].shape == (8, 8)
    assert matmul(betas[0], matmul(betas[1], betas[0])) == matmul(betas[1], matmul(betas[0], betas[1]))
    with pytest.raises(ValueError):
        bmw_action(1, RepParams(1))
