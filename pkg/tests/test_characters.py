import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qkloosterman.characters import (
    AddChar,
    CharacterError,
    MultChar,
    canonical_psi,
    chi_table,
    eval_chi,
    eval_psi,
    mult_char,
    quadratic_char,
    trivial_psi,
)
from qkloosterman.field import field_for_q, make_field, prime_powers_upto

from oracles import naive_field

QS = prime_powers_upto(64)


def root(k, n):
    return cmath.exp(2j * math.pi * k / n)


def test_f2_psi():
    f = make_field(2)
    assert eval_psi(f, canonical_psi(f), 1) == pytest.approx(-1)


def test_f5_psi():
    f = make_field(5)
    psi = canonical_psi(f)
    assert eval_psi(f, psi, 2) == pytest.approx(root(2, 5))
    assert eval_psi(f, psi, 1) * eval_psi(f, psi, 4) == pytest.approx(1)


def test_f4_psi_on_trace_one_element():
    f = make_field(2, 2)
    x = f.element([0, 1])
    assert f.trace(x) == 1
    assert eval_psi(f, canonical_psi(f), x) == pytest.approx(-1)


@pytest.mark.parametrize("q", QS)
def test_psi_at_zero_and_matches_trace(q):
    f = field_for_q(q)
    psi = canonical_psi(f)
    nf = naive_field(f)
    assert psi(f, 0) == 1
    table = psi.table(f)
    for x in range(q):
        assert abs(table[x] - nf.psi(x)) < 1e-12
        assert abs(psi(f, x) - table[x]) < 1e-12


def test_chi_examples():
    f = make_field(5)
    assert all(eval_chi(f, MultChar(0, 4), a) == 1 for a in range(1, 5))
    chi2 = quadratic_char(f)
    assert chi2.m == 2
    assert eval_chi(f, chi2, 4) == pytest.approx(1)
    assert eval_chi(f, chi2, 2) == pytest.approx(-1)
    with pytest.raises(CharacterError):
        quadratic_char(make_field(2, 2))
    with pytest.raises(CharacterError):
        eval_chi(f, chi2, 0)


@pytest.mark.parametrize("q", QS)
def test_chi1_at_generator(q):
    f = field_for_q(q)
    assert eval_chi(f, mult_char(f, 1), f.a1) == pytest.approx(root(1, q - 1), abs=1e-14)


@pytest.mark.parametrize("q", [q for q in QS if q % 2])
def test_quadratic_character_is_euler_criterion(q):
    f = field_for_q(q)
    nf = naive_field(f)
    chi2 = quadratic_char(f)
    for a in range(1, q):
        euler = nf.power(a, (q - 1) // 2)
        expected = 1 if euler == 1 else -1
        assert eval_chi(f, chi2, a) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("q", QS)
def test_orthogonality(q):
    f = field_for_q(q)
    for m in range(q - 1):
        total = chi_table(f, MultChar(m, q - 1)).sum()
        assert abs(total - (q - 1 if m == 0 else 0)) < 1e-9
    assert abs(canonical_psi(f).table(f).sum()) < 1e-9
    assert abs(trivial_psi(f).table(f).sum() - q) < 1e-9


@pytest.mark.parametrize("q", [4, 9, 25, 27])
def test_chi_table_indexed_by_log(q):
    f = field_for_q(q)
    chi = MultChar(1, q - 1)
    table = chi_table(f, chi)
    for d in range(q - 1):
        assert abs(table[d] - eval_chi(f, chi, f.exp_a1(d))) < 1e-12


def test_group_law():
    a, b = MultChar(3, 7), MultChar(6, 7)
    assert (a * b).m == 2
    assert a.inverse().m == 4
    assert MultChar(-1, 7).m == 6
    with pytest.raises(CharacterError):
        a * MultChar(1, 4)


def test_from_values_roundtrip():
    f = make_field(3, 2)
    psi = AddChar.from_values(f, [root(1, 3), root(2, 3)])
    assert psi.exponents == (1, 2)
    assert psi.nontrivial
    assert AddChar.from_values(f, [1, 1]) == trivial_psi(f)
    with pytest.raises(CharacterError):
        AddChar.from_values(f, [1j, 1])
    with pytest.raises(CharacterError):
        AddChar.from_values(f, [1])


fields = st.sampled_from(QS + [1009]).map(field_for_q)


@settings(max_examples=200, deadline=None)
@given(fields, st.data())
def test_homomorphisms(f, data):
    nz = st.integers(1, f.q - 1)
    a, b = data.draw(nz), data.draw(nz)
    m, m2 = data.draw(st.integers(0, f.q - 2)), data.draw(st.integers(0, f.q - 2))
    chi, chi2 = MultChar(m, f.q - 1), MultChar(m2, f.q - 1)
    assert abs(eval_chi(f, chi, f.mul(a, b)) - eval_chi(f, chi, a) * eval_chi(f, chi, b)) < 1e-10
    assert abs(eval_chi(f, chi * chi2, a) - eval_chi(f, chi, a) * eval_chi(f, chi2, a)) < 1e-10
    exps = data.draw(st.lists(st.integers(0, f.p - 1), min_size=f.r, max_size=f.r))
    psi = AddChar(f.p, tuple(exps))
    x, y = data.draw(st.integers(0, f.q - 1)), data.draw(st.integers(0, f.q - 1))
    assert abs(psi(f, f.add(x, y)) - psi(f, x) * psi(f, y)) < 1e-10
    assert abs(abs(psi(f, x)) - 1) < 1e-12
    assert all(abs(v**f.p - 1) < 1e-12 for v in psi.values_on_basis)


def test_serialisation():
    f = make_field(2, 2)
    assert MultChar(2, 3).to_json() == {"type": "mult", "m": 2}
    vals = canonical_psi(f).to_json()["values"]
    assert np.allclose([complex(*v) for v in vals], [1, -1])
