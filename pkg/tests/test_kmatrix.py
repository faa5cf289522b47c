import pytest
from hypothesis import given, settings, strategies as st

from iqpbw.iqg import diamond_params, shifted_params
from iqpbw.kmatrix import (
    QuasiKError, QuasiKMatrix, check_support, integrality_report, partial_quasiK, quasiK_closed_AIV,
    solve_rank1_quasiK, truncated_inverse, verify_intertwining,
)
from iqpbw.rootdata import builtin_satake
from iqpbw.scalars import ONE, Q, RING_ABAR, Scalar, q_pow, t_pow

CUTOFF = 6
FAMILIES = ["AI1", "AIII11", "AII3", "AIV2"]

_cache = {}


def solved(name, flavour="diamond", cutoff=CUTOFF):
    key = (name, flavour, cutoff)
    if key not in _cache:
        sd = builtin_satake(name)
        params = None if flavour == "universal" else diamond_params(sd)
        _cache[key] = solve_rank1_quasiK(sd, sd.white_reps[0], params, cutoff)
    return _cache[key]


def ai1_coefficient(s):
    # weight 2 alpha: Y = c E^2 with c = -s (q - q^{-1}) / (1 + q^{-2}), derived by hand
    return -s * (Q - Q.inverse()) / (ONE + q_pow(-2))


@pytest.mark.parametrize("s", [None, "shift", 3])
def test_ai1_hand_oracle(s):
    sd = builtin_satake("AI1")
    if s is None:
        params = diamond_params(sd)
    elif s == "shift":
        params = shifted_params(sd, {0: 1})
    else:
        params = {0: Q * s}
    K = solve_rank1_quasiK(sd, 0, params, 4)
    a = K.alg
    assert K.component((2,)) == a.E(0) * a.E(0) * ai1_coefficient(params[0])
    assert K.component((1,)).is_zero()


def test_ai1_frozen_value():
    K = solved("AI1")
    # varsigma_diamond = -q^{-2}: c = (q - q^{-1}) / (q^2 + 1)
    c = (t_pow(4) - t_pow(-4)) / (t_pow(8) + ONE)
    assert K.component((2,)) == K.alg.E(0) * K.alg.E(0) * c


@pytest.mark.parametrize("name", FAMILIES)
@pytest.mark.parametrize("flavour", ["universal", "diamond"])
def test_intertwining_and_support(name, flavour):
    K = solved(name, flavour)
    ok, report = verify_intertwining(K)
    assert ok, report
    assert report["failures"] == []
    assert check_support(K)
    assert K.component((0,) * K.sd.rank) == K.alg.one()


def test_support_examples():
    assert solved("AII3").support() == [(0, 0, 0), (1, 2, 1)]
    assert solved("AI1").support() == [(0,), (2,), (4,), (6,)]


@pytest.mark.parametrize("name", FAMILIES)
def test_diamond_integrality(name):
    ok, bad = integrality_report(solved(name), RING_ABAR)
    assert ok, bad


def test_non_diamond_parameter_is_not_integral():
    sd = builtin_satake("AI1")
    # a rational parameter with a denominator leaves the divided coefficients non-integral
    K = solve_rank1_quasiK(sd, 0, {0: Scalar(1) / Scalar(2)}, 4)
    ok, bad = integrality_report(K)
    assert not ok and bad[0] == (2,)


def test_perturbation_is_reported():
    K = solved("AIII11")
    comps = dict(K.components)
    top = max(mu for mu in K.support())
    comps[top] = comps[top] * q_pow(1)
    bad = QuasiKMatrix(K.sd, K.nodes, K.params, K.cutoff, K.alg, comps)
    ok, report = verify_intertwining(bad)
    assert not ok
    assert report["failures"]


@pytest.mark.parametrize("name", ["AIV2", "AIV3"])
@pytest.mark.parametrize("shift", [0, 1])
def test_closed_formula_aiv(name, shift):
    sd = builtin_satake(name)
    params = shifted_params(sd, {0: shift, sd.rank - 1: shift})
    K = solve_rank1_quasiK(sd, 0, params, CUTOFF)
    C = quasiK_closed_AIV(sd, params, CUTOFF)
    for mu in set(K.support()) | set(C.support()):
        assert K.component(mu) == C.component(mu), mu


def test_closed_formula_needs_aiv():
    with pytest.raises(ValueError):
        quasiK_closed_AIV(builtin_satake("AI1"), {0: ONE}, 2)


def test_component_above_cutoff():
    with pytest.raises(QuasiKError):
        solved("AI1").component((8,))


def test_truncated_inverse():
    K = solved("AI1", "universal")
    Y = K.truncated()
    Z = truncated_inverse(Y, CUTOFF)
    h = K.alg.half
    prod = (Y * Z).filter_terms(lambda t: sum(h.weight(t[2])) <= CUTOFF)
    assert prod == K.alg.one()


def test_partial_quasiK_split_a2():
    sd = builtin_satake("A2split")
    P = partial_quasiK(sd, (0,), 4)
    K = solve_rank1_quasiK(sd, 0, None, 4)
    assert P.truncated() == K.truncated()
    P2 = partial_quasiK(sd, (0, 1), 4)
    assert P2.component((0, 0)) == P2.alg.one()
    with pytest.raises(ValueError):
        partial_quasiK(sd, (0, 0), 4)


def test_json_shape():
    js = solved("AII3").to_json()
    assert js["subdiagram"] == [1, 2, 3]
    assert [c["mu"] for c in js["components"]] == [[0, 0, 0], [1, 2, 1]]


@settings(max_examples=6, deadline=None)
@given(st.integers(min_value=-2, max_value=2))
def test_ai1_oracle_property(k):
    # the weight 2 coefficient is linear in the parameter
    sd = builtin_satake("AI1")
    s = q_pow(k)
    K = solve_rank1_quasiK(sd, 0, {0: s}, 2)
    assert K.component((2,)) == K.alg.E(0) * K.alg.E(0) * ai1_coefficient(s)
