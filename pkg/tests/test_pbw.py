import random

import pytest
from hypothesis import given, settings, strategies as st

from iqpbw.iqg import LeadingTermError, diamond_params
from iqpbw.pbw import (
    enumerate_pbw_monomials, expand_in_pbw, graded_dimensions, independence_rank, pbw_basis, verify_pbw,
)
from iqpbw.relbraid import RootVectorTable
from iqpbw.rootdata import builtin_satake
from iqpbw.scalars import ONE, q_pow
from iqpbw.utilde import ResourceCapError

_tables = {}


def table(name):
    if name not in _tables:
        _tables[name] = RootVectorTable(builtin_satake(name))
    return _tables[name]


def test_enumerate_small_caps():
    t = table("A2split")
    assert [m.a for m in enumerate_pbw_monomials(t, 0)] == [(0, 0, 0)]
    assert {m.a for m in enumerate_pbw_monomials(t, 1)} == {(0, 0, 0), (1, 0, 0), (0, 0, 1)}
    mons = enumerate_pbw_monomials(t, 2)
    assert len(mons) == 7
    assert all(a1 + 2 * a12 + a2 <= 2 for a1, a12, a2 in (m.a for m in mons))


def test_enumerate_black_part():
    t = table("AII3")
    mons = enumerate_pbw_monomials(t, 0, black_cap=1)
    # 1, F_1, F_3 on each side
    assert len(mons) == 9
    with pytest.raises(ResourceCapError):
        enumerate_pbw_monomials(t, 4, black_cap=2, max_monomials=50)
    with pytest.raises(ValueError):
        enumerate_pbw_monomials(t, -1)


def test_realized_monomials():
    t = table("A2split")
    iq = t.iq
    b = pbw_basis(t)
    m = b.realize((1, 1, 0))
    assert m.element == iq.B(0) * t.element((1, 1))
    assert m.degree == 3


def test_independence_split_a2():
    mons = enumerate_pbw_monomials(table("A2split"), 2)
    cert = independence_rank(mons)
    assert cert["rank"] == 7 == cert["count"]
    assert cert["dependent"] == [] and cert["duplicates"] == []


def test_independence_names_duplicate():
    mons = enumerate_pbw_monomials(table("A2split"), 2)
    cert = independence_rank(mons + [mons[3]])
    assert cert["rank"] == 7 and cert["count"] == 8
    assert cert["duplicates"] == [(3, 7)]
    assert cert["dependent"] == [7]


def test_independence_aiii11():
    mons = enumerate_pbw_monomials(table("AIII11"), 3)
    assert independence_rank(mons)["rank"] == len(mons) == 10


@pytest.mark.parametrize("name, expected", [
    ("A2split", {0: 1, 1: 2, 2: 4, 3: 6, 4: 9}),
    ("A3qs", {0: 1, 1: 3, 2: 8, 3: 17, 4: 33}),
])
def test_graded_dimensions_and_rank(name, expected):
    t = table(name)
    assert graded_dimensions(t, 4) == expected
    report = verify_pbw(t, 4)
    assert report["pass"], report
    assert report["ranks"] == expected


def test_expand_examples():
    t = table("A2split")
    iq = t.iq
    assert expand_in_pbw(iq.B(0) ** 2, t) == {((2, 0, 0), (), (), None): ONE}
    assert expand_in_pbw(t.element((1, 1)), t) == {((0, 1, 0), (), (), None): ONE}
    # B_2 B_1 = q B_1 B_2 + B_{12}
    assert expand_in_pbw(iq.B(1) * iq.B(0), t) == {
        ((1, 0, 1), (), (), None): q_pow(1),
        ((0, 1, 0), (), (), None): ONE,
    }


def test_expand_with_cartan_and_black_parts():
    t = table("AII3")
    iq = t.iq
    x = iq.F(0) * iq.B(1) * iq.E(2) * iq.k(1) * iq.B(1) * iq.K(0)
    ex = expand_in_pbw(x, t)
    assert any(label[3] is not None for label in ex)
    assert any(any(label[2]) for label in ex)


@pytest.mark.parametrize("name", ["A2split", "A3qs"])
def test_expand_realize_identity(name):
    t = table(name)
    for m in enumerate_pbw_monomials(t, 3):
        assert expand_in_pbw(m.element, t) == {m.label: ONE}


def test_expand_rejects_non_imath_element():
    t = table("A2split")
    with pytest.raises(LeadingTermError):
        expand_in_pbw(t.iq.alg.E(0), t)


def test_central_reduction_of_monomials():
    t = table("A3qs")
    iq = t.iq
    params = diamond_params(t.sd)
    rng = random.Random(5)
    mons = enumerate_pbw_monomials(t, 3)
    for m in rng.sample(mons, 6):
        expected = iq.alg.sibling_U().one()
        for e, k in zip(t.entries, m.a):
            for _ in range(k):
                expected = expected * iq.central_reduction(e["element"], params)
        assert iq.central_reduction(m.element, params) == expected


@settings(max_examples=15, deadline=None)
@given(st.lists(st.sampled_from(["B1", "B2", "k1", "k2"]), min_size=0, max_size=4),
       st.integers(min_value=-1, max_value=1))
def test_expand_reconstructs_words(word, e):
    t = table("A2split")
    iq = t.iq
    letters = {"B1": iq.B(0), "B2": iq.B(1), "k1": iq.k(0, e or 1), "k2": iq.k(1, e or 1)}
    x = iq.scalar(q_pow(e))
    for w in word:
        x = x * letters[w]
    ex = expand_in_pbw(x, t)
    b = pbw_basis(t)
    total = iq.alg.zero()
    for label, c in ex.items():
        total = total + b.realize(*label).value * c
    assert total == x.value
