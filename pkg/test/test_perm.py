"""
Tests :mod:`perm` module
Description: Permutations, orbits and the stabilizer chain
"""

import numpy as np
import pytest

from tarotools.tatra.perm import PermGroup, Permutation
from tarotools.tatra.test.testutil import group_elements


def cyc(degree, *cycles):
    return Permutation.from_cycles(degree, *cycles)


def test_multiplication_applies_left_factor_first():
    p = cyc(3, (0, 1))
    q = cyc(3, (1, 2))
    assert (p * q)(0) == q(p(0)) == 2
    assert (p * q).inverse() * (p * q) == Permutation.identity(3)


def test_invalid_images():
    with pytest.raises(ValueError):
        Permutation([0, 0, 1])


def test_power_and_cycles():
    p = cyc(5, (0, 1, 2, 3, 4))
    assert (p ** 5).is_identity()
    assert p ** -1 == p.inverse()
    assert p.cycles() == [(0, 1, 2, 3, 4)]


def test_orbit_trivial_group():
    assert PermGroup(4).orbit(2) == {2}


def test_orbit_cycle():
    assert PermGroup(6, [cyc(6, (0, 1, 2, 3, 4, 5))]).orbit(0) == set(range(6))


def test_orbit_two_transpositions():
    assert PermGroup(4, [cyc(4, (0, 1)), cyc(4, (2, 3))]).orbit(0) == {0, 1}


def test_orbit_out_of_range():
    with pytest.raises(ValueError):
        PermGroup(3).orbit(3)


def test_pair_orbits_trivial_group():
    labels = PermGroup(2).orbits_on_pairs()
    assert len(np.unique(labels)) == 4


def test_pair_orbits_symmetric_group():
    labels = PermGroup(3, [cyc(3, (0, 1)), cyc(3, (0, 1, 2))]).orbits_on_pairs()
    assert len(np.unique(labels)) == 2
    assert len(set(labels.diagonal())) == 1


def test_pair_orbits_cyclic_group():
    labels = PermGroup(3, [cyc(3, (0, 1, 2))]).orbits_on_pairs()
    assert sorted(np.unique(labels, return_counts=True)[1]) == [3, 3, 3]


def test_order_symmetric_group():
    assert PermGroup(4, [cyc(4, (0, 1)), cyc(4, (0, 1, 2, 3))]).order() == 24


def test_order_cyclic_group():
    assert PermGroup(5, [cyc(5, (0, 1, 2, 3, 4))]).order() == 5


def test_order_trivial_group():
    assert PermGroup(5).order() == 1
    assert PermGroup(5, [Permutation.identity(5)]).order() == 1


@pytest.mark.parametrize('generators', [
    [cyc(6, (0, 1, 2)), cyc(6, (3, 4, 5))],
    [cyc(6, (0, 1, 2, 3, 4, 5)), cyc(6, (1, 5), (2, 4))],
    [cyc(7, (0, 1, 2, 3, 4, 5, 6)), cyc(7, (1, 2, 4), (3, 6, 5))],
    [cyc(8, (0, 1)), cyc(8, (2, 3)), cyc(8, (0, 2), (1, 3)), cyc(8, (4, 5, 6, 7))],
])
def test_order_and_elements_match_brute_force(generators):
    degree = generators[0].degree
    group = PermGroup(degree, generators)
    expected = group_elements(degree, generators)
    assert group.order() == len(expected)
    enumerated = [tuple(int(v) for v in images) for images in group.iter_images()]
    assert len(enumerated) == len(set(enumerated))
    assert set(enumerated) == expected


def test_contains_identity():
    group = PermGroup(4, [cyc(4, (0, 1, 2, 3))])
    assert group.contains(Permutation.identity(4))


def test_not_contains():
    assert not PermGroup(3, [cyc(3, (0, 1))]).contains(cyc(3, (0, 1, 2)))


def test_alternating_group_excludes_transposition():
    group = PermGroup(5, [cyc(5, (0, 1, 2)), cyc(5, (0, 1, 2, 3, 4))])
    assert group.order() == 60
    assert not group.contains(cyc(5, (0, 1)))
    assert group.contains(cyc(5, (0, 1), (2, 3)))


def test_contains_degree_mismatch():
    with pytest.raises(ValueError):
        PermGroup(3).contains(Permutation.identity(4))


def random_word(generators, rng, length=8):
    word = Permutation.identity(generators[0].degree)
    for i in rng.integers(0, len(generators), size=length):
        word = word * generators[i]
    return word


@pytest.mark.parametrize('seed', range(10))
def test_contains_random_products(seed):
    generators = [cyc(6, (0, 1, 2)), cyc(6, (1, 2, 3, 4, 5))]
    group = PermGroup(6, generators)
    assert group.order() == 360
    rng = np.random.default_rng(seed)
    g, h = random_word(generators, rng), random_word(generators, rng)
    assert group.contains(g * h)
    assert group.contains(h * g)
    assert not group.contains(g * h * cyc(6, (0, 1)))
