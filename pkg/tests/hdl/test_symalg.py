"""
Test hdl.symalg module.
"""
import random

import pytest
import sympy

import hdl.exc
import hdl.opparse
import hdl.symalg
from hdl.symalg import (IMAG, KSYM, L_ORB, ONE, P1, P2, P_SQ, PINV2, X1, X2, OperatorExpr,
                        WeylMonomial)


def x2_pow(power):
    return OperatorExpr.atom('x2', power)


def test_canonical_pairs():
    assert hdl.symalg.commutator(X1, P1) == IMAG
    assert hdl.symalg.commutator(X2, P2) == IMAG
    assert hdl.symalg.is_zero(hdl.symalg.commutator(X1, P2))
    assert hdl.symalg.is_zero(hdl.symalg.commutator(P1, P2))


def test_mul_normal_orders():
    assert P1 * X1 == X1 * P1 - IMAG
    assert P1 * P1 * X1 == X1 * P1 * P1 - IMAG.scale(2) * P1


def test_commutator_negative_power():
    expect = x2_pow(-3).scale(2 * sympy.I)
    assert hdl.symalg.commutator(P2, x2_pow(-2)) == expect


def test_orbital_commutes_with_p_squared():
    assert hdl.symalg.is_zero(hdl.symalg.commutator(L_ORB, P_SQ))
    assert hdl.symalg.is_zero(hdl.symalg.commutator(L_ORB, X1 * X1 + X2 * X2))


def test_orbital_potential_residual():
    expect = (X1 * x2_pow(-3)).scale(sympy.I * hdl.symalg.K)
    assert hdl.symalg.commutator(L_ORB, hdl.symalg.sw_potential()) == expect


def test_adjoint():
    assert hdl.symalg.adjoint(P1) == P1
    assert hdl.symalg.adjoint(IMAG) == -IMAG
    assert hdl.symalg.adjoint(X1 * P1) == X1 * P1 - IMAG
    assert hdl.symalg.adjoint(PINV2 * P1 * P1) == PINV2 * P1 * P1


def test_adjoint_pinv_with_position():
    with pytest.raises(hdl.exc.OrderingViolation):
        hdl.symalg.adjoint(PINV2 * X1)


def test_mul_pinv_right_of_position():
    with pytest.raises(hdl.exc.OrderingViolation):
        X1 * PINV2

    assert (P1 * PINV2).has_pinv


def test_absorb_p2_right():
    assert hdl.symalg.absorb_p2_right(PINV2 * L_ORB) == L_ORB
    assert hdl.symalg.absorb_p2_right(X1) == X1 * P_SQ


def test_absorb_p2_right_non_commuting():
    with pytest.raises(hdl.exc.NonCommutingResidue):
        hdl.symalg.absorb_p2_right(PINV2 * X1)


def test_pinv_parts():
    expr = PINV2 * (P1 * P1 - P2 * P2) + X1
    parts = expr.pinv_parts()

    assert list(parts) == [1]
    assert parts[1] == P1 * P1 - P2 * P2
    assert expr.regular_part() == X1


def test_subs_k():
    pot = hdl.symalg.sw_potential()

    assert pot.subs_k(2) == hdl.symalg.sw_potential(2)
    assert pot.subs_k(1.5) == hdl.symalg.sw_potential(sympy.Rational(3, 2))
    assert pot.subs_k(0) == (X1 * X1 + X2 * X2).scale(sympy.Rational(1, 2))


def test_numeric_terms():
    terms = dict(hdl.symalg.sw_potential().numeric_terms(3.0))

    assert terms[(0, 0, -2, 0, 0)] == pytest.approx(1.5)
    assert terms[(0, 2, 0, 0, 0)] == pytest.approx(0.5)


def test_is_position_only():
    assert hdl.symalg.sw_potential().is_position_only
    assert not L_ORB.is_position_only
    assert (P1 * P2).is_momentum_only


def test_format_expr():
    assert hdl.symalg.format_expr(ONE - ONE) == '0'
    assert hdl.symalg.format_expr(hdl.symalg.commutator(X1, P1)) == 'i'
    assert hdl.symalg.format_expr(L_ORB) == '-x2*p1 + x1*p2'
    assert hdl.symalg.format_expr(KSYM * x2_pow(-2)) == 'k*x2^-2'


def test_monomial_negative_power():
    with pytest.raises(hdl.exc.AlgebraError):
        WeylMonomial(1, a=-1)


def test_pow():
    assert P1 ** 2 == P1 * P1
    assert X1 ** 0 == ONE

    with pytest.raises(hdl.exc.AlgebraError):
        X1 ** -1


def random_expr(rng, terms=2, factors=2, pinv=False):
    """ Sum of random monomial products with small integer, k and i coefficients. """
    pool = (X1, X2, P1, P2, x2_pow(-1))
    expr = ONE - ONE
    for _ in range(rng.randint(1, terms)):
        term = OperatorExpr.scalar(rng.choice((-3, -2, -1, 1, 2, 3)))
        if rng.random() < 0.3:
            term = term * KSYM
        if rng.random() < 0.3:
            term = term * IMAG
        for _ in range(rng.randint(0, factors)):
            term = term * rng.choice(pool)
        if pinv and rng.random() < 0.2:
            term = PINV2 * term
        expr = expr + term

    return expr


def random_triples(seed, count):
    rng = random.Random(seed)
    return [tuple(random_expr(rng) for _ in range(3)) for _ in range(count)]


@pytest.mark.parametrize('left,mid,right', random_triples(1, 10))
def test_random_associativity(left, mid, right):
    assert (left * mid) * right == left * (mid * right)


@pytest.mark.parametrize('left,mid,right', random_triples(2, 10))
def test_random_antisymmetry_jacobi(left, mid, right):
    comm = hdl.symalg.commutator
    assert comm(left, mid) == -comm(mid, left)
    assert hdl.symalg.is_zero(comm(left, comm(mid, right)) + comm(mid, comm(right, left))
                              + comm(right, comm(left, mid)))


@pytest.mark.parametrize('left,right,_', random_triples(3, 10))
def test_random_adjoint(left, right, _):
    adjoint = hdl.symalg.adjoint
    assert adjoint(adjoint(left)) == left
    assert adjoint(left * right) == adjoint(right) * adjoint(left)


def test_random_format_parse_identity():
    rng = random.Random(4)
    for _ in range(1000):
        expr = random_expr(rng, terms=3, factors=3, pinv=True)
        assert hdl.opparse.parse_operator(str(expr)) == expr
