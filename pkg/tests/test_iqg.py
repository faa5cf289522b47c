import random

import pytest

from iqpbw.braid import braid_apply_word
from iqpbw.iqg import (
    IQuantumGroup, LeadingTermError, ParameterError, diamond_params, param_shift, shifted_params,
    sqrt_varsigma_diamond, varsigma_diamond, varsigma_star,
)
from iqpbw.rootdata import builtin_satake
from iqpbw.scalars import I, ONE, Q, q_pow, t_pow
from iqpbw.utilde import sigma

NAMES = ["AI1", "AII3", "AIII11", "AIV2", "BII2", "CII3", "DII4", "A2split", "A3qs"]


def iq_for(name):
    return IQuantumGroup(builtin_satake(name))


def random_iexpr(iq, rng, length=3, terms=2):
    gens = iq.generators()
    x = iq.zero()
    for _ in range(terms):
        y = iq.scalar(q_pow(rng.randint(-1, 1)))
        for _ in range(rng.randint(0, length)):
            y = y * rng.choice(gens)
        x = x + y
    return x


def test_generator_examples():
    iq = iq_for("AI1")
    a = iq.alg
    assert iq.B(0).value == a.F(0) + a.E(0) * a.Kp(0)
    iq = iq_for("AII3")
    a = iq.alg
    assert iq.B(1).value == a.F(1) + braid_apply_word((0, 2), a.E(1)) * a.Kp(1)
    assert iq.B(0).value == a.F(0)
    assert iq.B(0).to_sexpr() == "(* 1 F1)"


def test_unknown_letters_rejected():
    iq = iq_for("AII3")
    with pytest.raises(ValueError):
        iq.k(0)
    with pytest.raises(ValueError):
        iq.E(1)


def test_sigma_imath_examples():
    iq = iq_for("A3qs")
    assert iq.sigma_imath(iq.B(0)) == iq.B(0)
    assert iq.sigma_imath(iq.k(0)) == iq.k(2)
    assert iq.sigma_imath(iq.k(0)).value == sigma(iq.k(0).value)


@pytest.mark.parametrize("name", ["AII3", "A3qs", "AIV2"])
def test_sigma_imath_properties(name):
    iq = iq_for(name)
    rng = random.Random(41)
    for _ in range(6):
        x, y = random_iexpr(iq, rng), random_iexpr(iq, rng)
        assert iq.sigma_imath(iq.sigma_imath(x)) == x
        assert iq.sigma_imath(x * y) == iq.sigma_imath(y) * iq.sigma_imath(x)
    # on the Cartan part and the black subalgebra it is sigma
    sd = iq.sd
    for j in sd.black:
        for g in (iq.E(j), iq.F(j), iq.K(j), iq.Kp(j) * iq.E(j)):
            assert iq.sigma_imath(g).value == sigma(g.value)
    for i in sd.white:
        assert iq.sigma_imath(iq.B(i)).value == iq.B(i).value


def test_leading_term_examples():
    iq = iq_for("AI1")
    a = iq.alg
    b = iq.B(0)
    assert iq.leading_term(b) == (1, a.F(0))
    assert iq.leading_term(b * b) == (2, a.F(0) * a.F(0))
    assert iq.leading_term(iq.k(0)) == (0, iq.k(0).value)
    with pytest.raises(LeadingTermError):
        iq.leading_term(b - b)


@pytest.mark.parametrize("name", ["AII3", "A2split", "A3qs", "BII2"])
def test_leading_term_multiplicative(name):
    iq = iq_for(name)
    rng = random.Random(43)
    white = iq.sd.white
    for _ in range(8):
        x = iq.one()
        y = iq.one()
        for _ in range(rng.randint(1, 3)):
            x = x * iq.B(rng.choice(white))
        for _ in range(rng.randint(1, 2)):
            y = y * rng.choice(iq.generators())
        dx, lx = iq.leading_term(x)
        dy, ly = iq.leading_term(y)
        prod = lx * ly
        if not prod.is_zero():
            assert iq.leading_term(x * y) == (dx + dy, prod)


def test_central_reduction_examples():
    iq = iq_for("AII3")
    u = iq.alg.sibling_U()
    params = diamond_params(iq.sd)
    s = params[1]
    assert iq.central_reduction(iq.k(1), params) == u.K(1) * u.K(1, -1) * s
    bu = iq.central_reduction(iq.B(1), params)
    assert bu == u.F(1) + braid_apply_word((0, 2), u.E(1)) * u.K(1, -1) * s
    assert iq.central_reduction(iq.K(0) * iq.Kp(0), params) == u.one()
    iq = iq_for("A3qs")
    with pytest.raises(ParameterError):
        iq.central_reduction(iq.B(0), {0: Q, 1: ONE, 2: ONE})


def test_central_reduction_is_multiplicative():
    iq = iq_for("AIII11")
    params = {0: q_pow(2), 1: q_pow(2)}
    rng = random.Random(47)
    for _ in range(5):
        x, y = random_iexpr(iq, rng), random_iexpr(iq, rng)
        lhs = iq.central_reduction(x * y, params)
        assert lhs == iq.central_reduction(x, params) * iq.central_reduction(y, params)


def test_parameters():
    sd = builtin_satake("AI1")
    assert varsigma_diamond(sd, 0) == -q_pow(-2)
    assert sqrt_varsigma_diamond(sd, 0) ** 2 == -q_pow(-2)
    sd = builtin_satake("AIV2")
    assert varsigma_diamond(sd, 0) == -t_pow(-2)
    p = shifted_params(sd, {0: 1, 1: 1})
    assert param_shift(sd, p) == {0: 1, 1: 1}
    with pytest.raises(ParameterError):
        param_shift(sd, {0: Q, 1: Q})


def test_varsigma_star_table():
    assert varsigma_star("AI1") == q_pow(-1)
    assert varsigma_star("AII3") == Q
    assert varsigma_star("AIII11") == ONE
    assert varsigma_star("BII2") == Q
    assert varsigma_star("CII3") == q_pow(2)
    assert varsigma_star("DII4") == q_pow(2)
    assert varsigma_star("FII") == q_pow(5)
    for n in range(2, 7):
        s = varsigma_star(f"AIV{n}")
        assert s * s == q_pow(n - 1) * (-1) ** n
    assert varsigma_star("AIV3") == -I * Q


def test_rational_flag():
    iq = iq_for("AI1")
    assert iq.B(0).coefficients_in_rational_q()
    assert not (iq.B(0) * t_pow(2)).coefficients_in_rational_q()
