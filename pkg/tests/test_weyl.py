import pytest
from hypothesis import given, settings

from conftest import polys
from hspgen.hsp import Gamma_k, PairFamily, euler_operator
from hspgen.ring import ONE, S, XI, Z, ZERO, var
from hspgen.weyl import (
    ONE_OP,
    ZERO_OP,
    WeylError,
    WeylOperator,
    from_symbol,
    weyl_apply,
    weyl_commutator,
    weyl_compose,
    weyl_symbol,
)

z12, z13, s = var(Z(1, 2)), var(Z(1, 3)), var(S)
d12 = WeylOperator.d(1, 2)
Z12 = WeylOperator.z(1, 2)

OP_POOL = [Z(1, 2), Z(1, 3), XI(1, 2), XI(1, 3), S]
operators = polys(pool=OP_POOL, max_terms=4, max_exp=2).map(WeylOperator)
z_polys = polys(pool=[Z(1, 2), Z(1, 3)], max_terms=4, max_exp=4)


def test_canonical_commutation():
    assert weyl_compose(d12, Z12) == WeylOperator(z12 * var(XI(1, 2)) + 1)
    assert weyl_compose(Z12, d12) == WeylOperator(z12 * var(XI(1, 2)))
    assert weyl_commutator(d12, Z12) == ONE_OP
    assert weyl_commutator(d12, WeylOperator.z(1, 3)) == ZERO_OP


def test_euler_square():
    e = Z12 * d12
    assert e * e == WeylOperator(z12**2 * var(XI(1, 2)) ** 2 + z12 * var(XI(1, 2)))
    for m in range(5):
        assert weyl_apply(e * e, z12**m) == m * m * z12**m


def test_apply_examples():
    assert weyl_apply(d12, z12**2) == 2 * z12
    f = PairFamily.sostar(3)
    mono = z12 * z13 * var(Z(2, 3)) ** 2
    assert weyl_apply(euler_operator(f), mono) == 4 * mono
    assert weyl_apply(Gamma_k(f, 1), z12 * z13) == 2 * z12 * z13


def test_gamma_one_is_euler():
    for f in (PairFamily.sostar(3), PairFamily.su(2, 1)):
        assert Gamma_k(f, 1) == euler_operator(f)
        assert Gamma_k(f, 0) == ONE_OP
    # symmetric coordinates carry the doubled derivative
    sp = PairFamily.sp(2)
    assert Gamma_k(sp, 1) == 2 * euler_operator(sp)


def test_symbol_keeps_all_orders():
    op = Z12 * d12 + 1
    assert weyl_symbol(op) == z12 * var(XI(1, 2)) + ONE
    assert from_symbol(weyl_symbol(op)) == op
    assert weyl_symbol(s - WeylOperator.mult(z13) * d12).to_text() == "-1 * z[1,3] * xi[1,2] + 1 * s"


def test_apply_rejects_non_coordinate_operand():
    with pytest.raises(WeylError):
        weyl_apply(d12, s * z12)


def test_mult_rejects_derivation_variables():
    with pytest.raises(WeylError):
        WeylOperator.mult(var(XI(1, 2)))


def test_order():
    assert (Z12 * d12 * d12).order() == 2
    assert WeylOperator(s).order() == 0
    assert ZERO_OP.order() == -1


@settings(max_examples=40)
@given(operators, operators, operators)
def test_composition_associative(a, b, c):
    assert (a * b) * c == a * (b * c)


@settings(max_examples=40)
@given(operators, operators, z_polys)
def test_apply_agrees_with_composition(a, b, p):
    sub = {S: 0}
    a, b = a.substitute(sub), b.substitute(sub)
    assert weyl_apply(a * b, p) == weyl_apply(a, weyl_apply(b, p))


@settings(max_examples=40)
@given(operators, operators)
def test_commutator_lowers_leading_order(a, b):
    # in the Weyl algebra [a, b] has order at most ord a + ord b - 1
    c = weyl_commutator(a, b)
    if a and b and c:
        assert c.order() <= a.order() + b.order() - 1


@given(operators)
def test_self_commutator_vanishes(a):
    assert weyl_commutator(a, a) == ZERO_OP
    assert a * ONE_OP == a == ONE_OP * a
    assert weyl_symbol(a) == a.poly
    assert ZERO == weyl_symbol(a - a)
