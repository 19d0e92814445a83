"""
Tests :mod:`coco` module
Description: Coherent configurations, axioms, closure, extensions and the matrix text format
"""

import numpy as np
import pytest

from tarotools.tatra import cfg
from tarotools.tatra.coco import CoherentConfiguration, canonical_colors, coherent_closure, colors_between, \
    dumps_matrix, extension_diagonal, intersection_tensor, is_regular, load_matrix, dump_matrix, m_extension, \
    one_point_extension, parabolic_closure, parse_matrix, restriction, same_partition, verify_axioms
from tarotools.tatra.common import SizeLimitExceededError, VerificationError
from tarotools.tatra.perm import PermGroup, Permutation
from tarotools.tatra.scheme import build_tatra
from tarotools.tatra.test.testutil import cycle_coloring, path_coloring, random_coloring, rank_two_matrix, \
    relabel_matrix, reset_config, swap_pair_color


@pytest.fixture(autouse=True)
def restore_config():
    yield
    reset_config()


def test_canonical_colors_first_occurrence():
    assert canonical_colors([[5, 3], [3, 5]]).tolist() == [[0, 1], [1, 0]]


def test_constructor_requires_contiguous_colors():
    with pytest.raises(ValueError):
        CoherentConfiguration([[0, 2], [2, 0]])


def test_rank_two_scheme_passes():
    report = verify_axioms(rank_two_matrix(5))
    assert report
    assert report.axiom is None


def test_recolored_cell_fails_with_witness_triple():
    m = swap_pair_color(rank_two_matrix(5), 0, 1, 2)
    report = verify_axioms(m)
    assert not report
    assert report.axiom == 'intersection_numbers'
    assert {'r', 's', 't'} <= set(report.witness)
    with pytest.raises(VerificationError) as exc_info:
        report.raise_on_failure()
    assert exc_info.value.check == 'intersection_numbers'


def test_single_recolored_cell_breaks_transposition():
    m = rank_two_matrix(5)
    m[0, 1] = 2
    assert verify_axioms(m).axiom == 'transpose'


def test_diagonal_color_off_diagonal():
    m = rank_two_matrix(4)
    m[1, 2] = 0
    assert verify_axioms(m).axiom == 'diagonal'


def test_tatra_matrix_passes():
    x = build_tatra(4, 3)
    assert verify_axioms(x.config)
    assert x.rank == 6


def test_intersection_numbers_rank_two():
    x = CoherentConfiguration(rank_two_matrix(5))
    c = intersection_tensor(x)
    assert c[1, 1, 0] == 4
    assert c[1, 1, 1] == 3
    assert c[0, 1, 1] == 1


def test_fibers_of_scheme():
    x = CoherentConfiguration(rank_two_matrix(4))
    assert x.is_scheme()
    assert x.fibers == ((0, 1, 2, 3),)
    assert x.valencies == (1, 3)
    assert x.inverse(1) == 1


def test_fibers_of_configuration():
    m = np.array([[0, 1, 1], [2, 3, 4], [2, 4, 3]])
    x = CoherentConfiguration(m)
    assert verify_axioms(m)
    assert x.fibers == ((0,), (1, 2))
    assert x.fiber_pair(1) == (0, 1)
    assert x.inverse(1) == 2


def test_parabolic_of_diagonal():
    x = CoherentConfiguration(rank_two_matrix(4))
    assert parabolic_closure(x, 0).classes == ((0,), (1,), (2,), (3,))


def test_parabolic_line_classes():
    x = build_tatra(4, 3)
    parabolic = parabolic_closure(x.config, [x.r(1), x.r(2)])
    assert parabolic.class_sizes == (3,) * 5


def test_parabolic_of_s_relation_is_connected():
    x = build_tatra(7, 3)
    for g in range(3):
        assert parabolic_closure(x.config, x.s(g)).class_sizes == (24,)


def test_closure_of_coherent_matrix_is_fixed_point():
    x = build_tatra(4, 3)
    assert same_partition(coherent_closure(x.config.matrix).matrix, x.config.matrix)


def test_closure_of_pentagon():
    closed = coherent_closure(cycle_coloring(5))
    assert closed.rank == 3
    assert same_partition(closed.matrix, cycle_coloring(5))


def test_closure_of_path_is_orbital_configuration():
    closed = coherent_closure(path_coloring(3))
    reflection = PermGroup(3, [Permutation.from_cycles(3, (0, 2))])
    assert verify_axioms(closed)
    assert same_partition(closed.matrix, reflection.orbits_on_pairs())
    assert len(closed.fibers) == 2


def test_closure_is_invariant_under_relabeling():
    images = [3, 0, 4, 1, 5, 2]
    coloring = path_coloring(6)
    closed = coherent_closure(coloring).matrix
    relabeled = coherent_closure(relabel_matrix(coloring, images)).matrix
    assert same_partition(relabel_matrix(closed, images), relabeled)


@pytest.mark.parametrize('seed', range(50))
def test_closure_of_random_coloring(seed):
    size = 2 + seed % 39
    coloring = random_coloring(size, 2 + seed % 3, seed)
    closed = coherent_closure(coloring)
    assert verify_axioms(closed)
    assert same_partition(coherent_closure(closed.matrix).matrix, closed.matrix)
    images = np.random.default_rng(seed).permutation(size)
    relabeled = coherent_closure(relabel_matrix(coloring, images)).matrix
    assert same_partition(relabel_matrix(closed.matrix, images), relabeled)


def test_one_point_extension_rank_two():
    y = one_point_extension(CoherentConfiguration(rank_two_matrix(5)), 2)
    assert set(y.fibers) == {(2,), (0, 1, 3, 4)}


def test_one_point_extension_fibers_are_neighbourhoods():
    x = build_tatra(4, 3)
    alpha = 7
    y = one_point_extension(x.config, alpha)
    assert len(y.fibers) == 6
    assert set(y.fibers) == {x.config.neighbourhood(alpha, s) for s in range(x.rank)}


def test_one_point_extension_fiber_sizes():
    x = build_tatra(7, 3)
    y = one_point_extension(x.config, 0)
    assert sorted(len(f) for f in y.fibers) == [1, 1, 1, 7, 7, 7]


def test_restriction_to_singleton():
    y = one_point_extension(CoherentConfiguration(rank_two_matrix(5)), 0)
    single = restriction(y, (0,))
    assert single.size == 1
    assert single.rank == 1
    assert is_regular(single)


def test_restriction_to_delta_is_regular():
    x = build_tatra(4, 3)
    alpha = 0
    y = one_point_extension(x.config, alpha)
    delta = x.config.neighbourhood(alpha, x.s(0))
    restricted = restriction(y, delta)
    assert restricted.size == 4
    assert restricted.rank == 4
    assert is_regular(restricted)


def test_restriction_requires_fiber():
    x = CoherentConfiguration(rank_two_matrix(4))
    with pytest.raises(ValueError):
        restriction(x, (0, 1))


def test_rank_two_is_not_regular():
    assert not is_regular(CoherentConfiguration(rank_two_matrix(5)))


def test_regularity_needs_scheme():
    y = one_point_extension(CoherentConfiguration(rank_two_matrix(3)), 0)
    with pytest.raises(ValueError):
        is_regular(y)


def test_m_extension_single_point():
    ext = m_extension(CoherentConfiguration([[0]]))
    assert ext.size == 1
    assert ext.rank == 1


def test_m_extension_rank_two():
    ext = m_extension(CoherentConfiguration(rank_two_matrix(4)))
    assert ext.size == 16
    assert verify_axioms(ext)
    diagonal = set(extension_diagonal(4))
    assert any(set(fiber) == diagonal for fiber in ext.fibers)


def test_m_extension_tatra_diagonal_is_union_of_fibers():
    x = build_tatra(4, 3)
    ext = m_extension(x.config)
    assert ext.size == 225
    diagonal = set(extension_diagonal(15))
    inside = [set(f) for f in ext.fibers if set(f) <= diagonal]
    assert set().union(*inside) == diagonal


def test_m_extension_size_limit():
    cfg.extension_max_points = 15
    with pytest.raises(SizeLimitExceededError):
        m_extension(CoherentConfiguration(rank_two_matrix(4)))


def test_m_extension_limit_counts_points():
    cfg.extension_max_points = 16
    assert m_extension(CoherentConfiguration(rank_two_matrix(4))).size == 16


def test_default_extension_limit_admits_degree_300():
    assert cfg.DEF_EXTENSION_MAX_POINTS == 300 * 300


def test_m_extension_only_two():
    with pytest.raises(ValueError):
        m_extension(CoherentConfiguration(rank_two_matrix(2)), m=3)


def test_matrix_text_format(tmp_path):
    x = build_tatra(4, 1)
    text = dumps_matrix(x.config)
    assert text.splitlines()[0] == '5 2'
    assert np.array_equal(parse_matrix(text), x.config.matrix)

    path = dump_matrix(x.config, tmp_path / 'x41.matrix')
    assert np.array_equal(load_matrix(path), x.config.matrix)


def test_parse_matrix_wrong_header():
    with pytest.raises(ValueError):
        parse_matrix("2 3\n0 1\n1 0\n")


def test_colors_between_fibers():
    x = CoherentConfiguration(np.array([[0, 1, 1], [2, 3, 4], [2, 4, 3]]))
    assert colors_between(x, 0, 1) == (1,)
    assert colors_between(x, 1, 0) == (2,)
    assert colors_between(x, 1, 1) == (3, 4)
