"""
Tests :mod:`field` module
Description: Finite field tables, coset structure and Frobenius data
"""

import pytest

from tarotools.tatra import cfg, field
from tarotools.tatra.common import InadmissibleParametersError, SizeLimitExceededError
from tarotools.tatra.field import coset_structure, field_of_order, frobenius_data, make_field, verify_field
from tarotools.tatra.test.testutil import reset_config


@pytest.fixture(autouse=True)
def restore_config():
    yield
    reset_config()


def test_gf4_modulus_and_primitive_element():
    f = make_field(2, 2)
    assert f.order == 4
    assert f.modulus == (1, 1, 1)  # x^2 + x + 1
    omega = f.primitive_element
    assert f.add(f.mul(omega, omega), f.add(omega, 1)) == 0


def test_gf5_primitive_element_is_smallest_primitive_root():
    f = make_field(5, 1)
    assert f.primitive_element == 2
    assert [f.exp(k) for k in range(4)] == [1, 2, 4, 3]


def test_non_prime_characteristic():
    with pytest.raises(InadmissibleParametersError):
        make_field(4, 1)


def test_not_prime_power():
    with pytest.raises(InadmissibleParametersError):
        field_of_order(12)


def test_field_order_limit():
    cfg.field_max_order = 16
    with pytest.raises(SizeLimitExceededError):
        make_field(3, 3)


@pytest.mark.parametrize('q', [2, 3, 4, 5, 7, 8, 9, 16, 25, 27])
def test_tables_agree_with_polynomial_arithmetic(q):
    f = field_of_order(q)
    verify_field(f)
    for x in f.nonzero():
        assert f.exp(f.log(x)) == x
        assert f.mul(x, f.inv(x)) == 1


def test_frobenius_fixes_prime_field_and_has_order_d():
    f = field_of_order(9)
    for a in f.elements():
        assert f.frobenius(a, f.degree) == a
    assert any(f.frobenius(a) != a for a in f.elements())


def test_det():
    f = field_of_order(7)
    assert f.det((1, 0), (0, 1)) == 1
    assert f.det((2, 3), (2, 3)) == 0
    assert f.det((0, 1), (1, 0)) == f.minus_one


def test_coset_structure_m_one():
    c = coset_structure(field_of_order(4), 3)
    assert c.m == 1
    assert c.kernel == (1,)


def test_coset_structure_contains_minus_one():
    f = field_of_order(7)
    c = coset_structure(f, 3)
    assert c.m == 2
    assert set(c.kernel) == {1, 6}
    assert c.coset_of(6) == c.identity_coset


def test_coset_members_partition_units():
    f = field_of_order(13)
    c = coset_structure(f, 3)
    members = [x for g in range(3) for x in c.members(g)]
    assert sorted(members) == list(f.nonzero())
    assert all(c.coset_of(x) == g for g in range(3) for x in c.members(g))


def test_odd_q_q_minus_one_over_n():
    with pytest.raises(InadmissibleParametersError, match=r"q\(q-1\)/n odd"):
        coset_structure(field_of_order(5), 4)


def test_n_not_dividing():
    with pytest.raises(InadmissibleParametersError):
        coset_structure(field_of_order(7), 4)


@pytest.mark.parametrize('q, n, d, d0', [(4, 3, 2, 1), (7, 3, 1, 1), (16, 5, 4, 1), (16, 3, 4, 2), (9, 2, 2, 2)])
def test_frobenius_data(q, n, d, d0):
    f = field_of_order(q)
    data = frobenius_data(f, coset_structure(f, n))
    assert (data.d, data.d0) == (d, d0)
    assert data.d0 * data.order_on_C == data.d


def test_frobenius_exponent_of():
    f = field_of_order(4)
    data = frobenius_data(f, coset_structure(f, 3))
    assert data.exponent_of(1) == 0
    assert data.exponent_of(2) == 1


@pytest.mark.parametrize('n, phi', [(1, 1), (3, 2), (7, 6), (15, 8)])
def test_euler_phi(n, phi):
    assert field.euler_phi(n) == phi


def test_primitive_root():
    assert field.is_primitive_root(2, 3)
    assert not field.is_primitive_root(7, 3)
    assert field.is_primitive_root(5, 1)
    assert not field.is_primitive_root(2, 7)
    assert field.is_primitive_root(2, 5)


def test_primitive_root_requires_unit():
    with pytest.raises(ValueError):
        field.is_primitive_root(3, 6)


def test_power_subgroup():
    assert field.power_subgroup(2, 7) == (1, 2, 4)
    assert field.units(8) == (1, 3, 5, 7)


@pytest.mark.parametrize('q, expected', [(2, (2, 1)), (27, (3, 3)), (64, (2, 6)), (49, (7, 2))])
def test_prime_power(q, expected):
    assert field.prime_power(q) == expected


@pytest.mark.parametrize('a, n, order', [(2, 7, 3), (3, 8, 2), (2, 3, 2), (5, 1, 1), (3, 7, 6)])
def test_multiplicative_order(a, n, order):
    assert field.multiplicative_order(a, n) == order


def test_multiplicative_order_of_non_unit():
    with pytest.raises(ValueError):
        field.multiplicative_order(2, 4)
