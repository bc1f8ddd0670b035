"""Operator algebra: composition, adjoint, skewness, Miura conjugation."""

import random

import pytest

from jethier.jetcalc import HbarSeries, JetPoly, dx, random_jetpoly
from jethier.diffop import (
    DiffOperator,
    MiuraChange,
    adjoint,
    apply_op,
    compose,
    conjugate_by_miura,
    is_skew,
    operator_from_obj,
    operator_to_obj,
)

W = JetPoly.var


def w(n, exp=1):
    return W(1, n, exp)


def sop(trunc, orders, dim=1):
    """Scalar operator from {order: JetPoly or HbarSeries}."""
    cell = {
        k: (c if isinstance(c, HbarSeries) else HbarSeries.of(c, trunc))
        for k, c in orders.items()
    }
    return DiffOperator(dim, trunc, {(1, 1): cell})


def test_compose_leibniz():
    # d o (w id) = w d + w_x
    p = DiffOperator.dx_op(1, 2)
    q = sop(2, {0: w(0)})
    assert compose(p, q) == sop(2, {1: w(0), 0: w(1)})


def test_compose_identity():
    rng = random.Random(1)
    p = sop(2, {0: random_jetpoly(rng, colors=1), 2: random_jetpoly(rng, colors=1)})
    assert compose(p, DiffOperator.identity(1, 2)) == p
    assert compose(DiffOperator.identity(1, 2), p) == p


def test_compose_first_order():
    # (A d) o (B d) = AB d^2 + A dx(B) d
    a, b = w(0) ** 2, w(1)
    lhs = compose(sop(1, {1: a}), sop(1, {1: b}))
    assert lhs == sop(1, {2: a * b, 1: a * dx(b)})


def test_compose_associative_random():
    rng = random.Random(9)
    for _ in range(6):
        ops = []
        for _ in range(3):
            ops.append(sop(1, {
                0: random_jetpoly(rng, colors=1, max_order=2, n_terms=2),
                rng.randint(1, 2): random_jetpoly(rng, colors=1, max_order=2, n_terms=2),
            }))
        p, q, r = ops
        assert compose(compose(p, q), r) == compose(p, compose(q, r))


def test_adjoint_examples():
    d = DiffOperator.dx_op(1, 2)
    assert adjoint(d) == -d
    f = w(0)
    assert adjoint(sop(2, {1: f})) == sop(2, {1: -f, 0: -dx(f)})


def test_adjoint_involution_and_antihom():
    rng = random.Random(10)
    for _ in range(5):
        p = sop(1, {0: random_jetpoly(rng, colors=1, n_terms=2),
                    2: random_jetpoly(rng, colors=1, n_terms=2)})
        q = sop(1, {1: random_jetpoly(rng, colors=1, n_terms=2)})
        assert adjoint(adjoint(p)) == p
        assert adjoint(compose(p, q)) == compose(adjoint(q), adjoint(p))


def test_apply_examples():
    d = DiffOperator.dx_op(1, 1)
    v = HbarSeries.of(w(0) ** 2, 1)
    assert apply_op(d, [v])[0] == HbarSeries.of(2 * w(0) * w(1), 1)
    z = DiffOperator.zero(1, 1)
    assert apply_op(z, [v])[0].is_zero()
    p = sop(1, {1: w(0), 0: w(1)})
    assert apply_op(p, [HbarSeries.of(w(0), 1)])[0] == HbarSeries.of(2 * w(0) * w(1), 1)


def test_is_skew():
    assert is_skew(DiffOperator.dx_op(1, 1))
    assert not is_skew(sop(1, {1: w(0)}))
    assert is_skew(sop(1, {1: w(0), 0: w(1) / 2}))


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        compose(DiffOperator.dx_op(1, 1), DiffOperator.dx_op(2, 1))
    with pytest.raises(ValueError):
        apply_op(DiffOperator.dx_op(2, 1), [HbarSeries.zero(1)])


# ---------------------------------------------------------------------------
# Miura changes
# ---------------------------------------------------------------------------

def test_miura_requires_linear_invertible_leading_part():
    with pytest.raises(ValueError):
        MiuraChange([HbarSeries.of(w(0) ** 2, 1)])
    with pytest.raises(ValueError):
        MiuraChange([HbarSeries.of(W(2, 0), 1), HbarSeries.of(W(2, 0), 1)])


def test_miura_constant_rescaling():
    # w = c v turns d into c^2 d
    c = 3
    m = MiuraChange([HbarSeries.of(c * w(0), 2)])
    got = conjugate_by_miura(DiffOperator.dx_op(1, 2), m)
    assert got == DiffOperator.dx_op(1, 2, k=1, scale=c * c)


def test_miura_identity_conjugation():
    m = MiuraChange.identity(1, 2)
    d = DiffOperator.dx_op(1, 2)
    assert conjugate_by_miura(d, m) == d


def test_miura_inverse_roundtrip():
    rng = random.Random(3)
    fwd = HbarSeries(2, [w(0),
                         random_jetpoly(rng, colors=1, max_order=2, n_terms=2),
                         random_jetpoly(rng, colors=1, max_order=3, n_terms=2)])
    m = MiuraChange([fwd])
    inv = m.inverse()
    # forward then inverse is the identity modulo hbar^3
    comp = m.express_in_target(fwd)
    assert comp == HbarSeries.var(1, 0, 2)
    back = inv.express_in_target(inv.forward[0])
    assert back == HbarSeries.var(1, 0, 2)


def test_conjugation_roundtrip_under_inverse():
    rng = random.Random(4)
    fwd = HbarSeries(2, [w(0),
                         random_jetpoly(rng, colors=1, max_order=2, n_terms=2),
                         random_jetpoly(rng, colors=1, max_order=2, n_terms=2)])
    m = MiuraChange([fwd])
    d = DiffOperator.dx_op(1, 2)
    once = conjugate_by_miura(d, m)
    back = conjugate_by_miura(once, m.inverse())
    assert back == d


def test_exact_derivative_tail_keeps_zero_constant_term():
    # w = v + hbar*dx(G1) + hbar^2*dx(G2): the conjugate of dx has no d^0 term
    rng = random.Random(5)
    for _ in range(5):
        g1 = random_jetpoly(rng, colors=1, max_order=2, n_terms=2)
        g2 = random_jetpoly(rng, colors=1, max_order=2, n_terms=2)
        m = MiuraChange([HbarSeries(2, [w(0), dx(g1), dx(g2)])])
        conj = conjugate_by_miura(DiffOperator.dx_op(1, 2), m)
        assert conj.coeff(1, 1, 0).is_zero()


def test_multicolor_scaling():
    # with w = c v the operator d becomes c^2 d (per color)
    fwd = [HbarSeries.var(1, 0, 1), HbarSeries.var(2, 0, 1)]
    m = MiuraChange(fwd)
    d2 = DiffOperator.dx_op(2, 1)
    assert conjugate_by_miura(d2, m) == d2


def test_operator_json_roundtrip():
    rng = random.Random(6)
    p = DiffOperator(2, 1, {
        (1, 2): {1: HbarSeries.of(random_jetpoly(rng, colors=2, n_terms=2), 1)},
        (2, 2): {0: HbarSeries(1, [JetPoly.zero(), w(1)])},
    })
    assert operator_from_obj(operator_to_obj(p)) == p


def rand_op2(rng, trunc=1):
    """Random 2-color operator with off-diagonal entries."""
    entries = {}
    for row in (1, 2):
        for col in (1, 2):
            if rng.random() < 0.75:
                entries[(row, col)] = {
                    rng.randint(0, 2): HbarSeries.of(
                        random_jetpoly(rng, colors=2, max_order=2, n_terms=2), trunc)}
    return DiffOperator(2, trunc, entries)


def test_two_color_compose_associative_and_adjoint():
    rng = random.Random(12)
    for _ in range(4):
        p, q, r = rand_op2(rng), rand_op2(rng), rand_op2(rng)
        assert compose(compose(p, q), r) == compose(p, compose(q, r))
        assert adjoint(compose(p, q)) == compose(adjoint(q), adjoint(p))
        assert adjoint(adjoint(p)) == p


def test_two_color_apply_consistent_with_compose():
    rng = random.Random(13)
    for _ in range(4):
        p, q = rand_op2(rng), rand_op2(rng)
        vec = [HbarSeries.of(random_jetpoly(rng, colors=2, max_order=1, n_terms=2), 1)
               for _ in range(2)]
        direct = apply_op(compose(p, q), vec)
        staged = apply_op(p, apply_op(q, vec))
        assert direct == staged


def test_two_color_coupled_miura_conjugation():
    rng = random.Random(14)
    g1 = random_jetpoly(rng, colors=2, max_order=1, n_terms=2)
    g2 = random_jetpoly(rng, colors=2, max_order=1, n_terms=2)
    m = MiuraChange([
        HbarSeries(2, [W(1, 0), dx(g1), JetPoly.zero()]),
        HbarSeries(2, [W(2, 0), dx(g2), JetPoly.zero()]),
    ])
    d2 = DiffOperator.dx_op(2, 2)
    conj = conjugate_by_miura(d2, m)
    for row in (1, 2):
        for col in (1, 2):
            assert conj.coeff(row, col, 0).is_zero()
    assert is_skew(conj)
    assert conjugate_by_miura(conj, m.inverse()) == d2
