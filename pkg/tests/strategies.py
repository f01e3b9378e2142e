"""Hypothesis strategies shared by the test modules."""
from hypothesis import strategies as st

from tbl.qfield import ZERO, RatFunc

monomials = st.builds(
    RatFunc.monomial,
    st.integers(-4, 4),
    st.integers(-4, 4),
    st.integers(-2, 2),
)


@st.composite
def laurents(draw, max_terms=4, with_r=True):
    out = ZERO
    for _ in range(draw(st.integers(0, max_terms))):
        c = draw(st.integers(-4, 4))
        a = draw(st.integers(-4, 4))
        b = draw(st.integers(-2, 2)) if with_r else 0
        out = out + RatFunc.monomial(c, a, b)
    return out


@st.composite
def ratfuncs(draw, with_r=True):
    num = draw(laurents(with_r=with_r))
    den = draw(laurents(with_r=with_r).filter(lambda f: not f.is_zero()))
    return num / den


nonzero_ratfuncs = ratfuncs().filter(lambda f: not f.is_zero())
