from hypothesis import settings, strategies as st

from hspgen.matrix import PolyMatrix
from hspgen.ring import S, U, XI, Z, ZERO, Polynomial, var

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

POOL = [Z(1, 2), Z(1, 3), XI(1, 2), U, S]

coeffs = st.one_of(
    st.integers(-5, 5),
    st.fractions(min_value=-3, max_value=3, max_denominator=4),
)


@st.composite
def monomials(draw, pool=POOL, max_exp=3):
    return {v: draw(st.integers(0, max_exp)) for v in pool if draw(st.booleans())}


@st.composite
def polys(draw, pool=POOL, max_terms=5, max_exp=3):
    terms = draw(st.lists(st.tuples(monomials(pool, max_exp), coeffs), max_size=max_terms))
    return Polynomial.from_terms([({v: e for v, e in m.items() if e}, c) for m, c in terms])


@st.composite
def low_degree_polys(draw, pool=POOL[:3] + [U]):
    """Degree <= 2 with small integer coefficients."""
    out = ZERO
    for _ in range(draw(st.integers(0, 3))):
        vs = draw(st.lists(st.sampled_from(pool), max_size=2))
        term = Polynomial.constant(draw(st.integers(-3, 3)))
        for v in vs:
            term = term * var(v)
        out = out + term
    return out


@st.composite
def square_matrices(draw, size):
    return PolyMatrix.build(size, size, lambda i, j: draw(low_degree_polys()))


@st.composite
def alternating_matrices(draw, size):
    upper = {(i, j): draw(low_degree_polys()) for i in range(size) for j in range(i + 1, size)}

    def entry(i, j):
        if i == j:
            return ZERO
        return upper[i, j] if i < j else -upper[j, i]

    return PolyMatrix.build(size, size, entry)

