import dataclasses
from itertools import product
from pathlib import Path
from typing import Iterable, Set, Tuple

import numpy as np
import tomli_w

from tarotools.tatra import cfg
from tarotools.tatra import paths
from tarotools.tatra.coco import CoherentConfiguration
from tarotools.tatra.perm import Permutation
from tarotools.tatra.scheme import TatraScheme


# Admissible (q, n) pairs covering prime fields, prime power fields, n = 1 and n = q - 1
BATTERY = ((4, 1), (4, 3), (5, 2), (7, 3), (8, 7), (9, 4), (11, 5), (13, 3), (13, 6), (16, 3), (16, 5), (16, 15))


def battery(max_degree: int = 300):
    return [(q, n) for q, n in BATTERY if n * (q + 1) <= max_degree]


def reset_config():
    cfg.log_mode = cfg.DEF_LOG
    cfg.log_stdout_level = cfg.DEF_LOG_STDOUT_LEVEL
    cfg.log_file_level = cfg.DEF_LOG_FILE_LEVEL
    cfg.log_file_path = cfg.DEF_LOG_FILE_PATH
    cfg.log_timing = cfg.DEF_LOG_TIMING

    cfg.field_max_order = cfg.DEF_FIELD_MAX_ORDER
    cfg.max_degree = cfg.DEF_MAX_DEGREE
    cfg.extension_max_points = cfg.DEF_EXTENSION_MAX_POINTS

    cfg.all_alpha_max_degree = cfg.DEF_ALL_ALPHA_MAX_DEGREE
    cfg.alpha_sample_size = cfg.DEF_ALPHA_SAMPLE_SIZE

    cfg.schurity_max_degree = cfg.DEF_SCHURITY_MAX_DEGREE
    cfg.iso_enumeration_max_order = cfg.DEF_ISO_ENUMERATION_MAX_ORDER
    cfg.algebraic_search_max_rank = cfg.DEF_ALGEBRAIC_SEARCH_MAX_RANK
    cfg.relation_image_samples = cfg.DEF_RELATION_IMAGE_SAMPLES
    cfg.random_seed = cfg.DEF_RANDOM_SEED


def create_test_config(config):
    return create_custom_test_config(paths.CONFIG_FILE, config)


def create_custom_test_config(filename, config):
    path = _custom_test_config_path(filename)
    with open(path, 'wb') as outfile:
        tomli_w.dump(config, outfile)
    return path


def remove_test_config():
    remove_custom_test_config(paths.CONFIG_FILE)


def remove_custom_test_config(filename):
    config = _custom_test_config_path(filename)
    if config.exists():
        config.unlink()


def _custom_test_config_path(filename) -> Path:
    return Path.cwd() / filename


def rank_two_matrix(size: int) -> np.ndarray:
    """The trivial scheme: diagonal color 0, everything else color 1."""
    return 1 - np.eye(size, dtype=np.int64)


def cycle_coloring(size: int) -> np.ndarray:
    """Diagonal, edges of the cycle 0-1-...-(size-1)-0, non-edges."""
    m = np.full((size, size), 2, dtype=np.int64)
    np.fill_diagonal(m, 0)
    for a in range(size):
        m[a, (a + 1) % size] = m[(a + 1) % size, a] = 1
    return m


def path_coloring(size: int) -> np.ndarray:
    """Diagonal, edges of the path 0-1-...-(size-1), non-edges."""
    m = np.full((size, size), 2, dtype=np.int64)
    np.fill_diagonal(m, 0)
    for a in range(size - 1):
        m[a, a + 1] = m[a + 1, a] = 1
    return m


def random_coloring(size: int, colors: int, seed: int) -> np.ndarray:
    return np.random.default_rng(seed).integers(0, colors, size=(size, size))


def relabel_matrix(matrix, images: Iterable[int]) -> np.ndarray:
    """The color matrix with point a renamed to images[a]."""
    m = np.asarray(matrix)
    images = np.asarray(list(images), dtype=np.int64)
    out = np.empty_like(m)
    out[np.ix_(images, images)] = m
    return out


def group_elements(degree: int, generators: Iterable[Permutation]) -> Set[Tuple[int, ...]]:
    """All elements of a small permutation group by closure under right multiplication with generators."""
    gens = [tuple(int(v) for v in g.images) for g in generators]
    identity = tuple(range(degree))
    elements = {identity}
    frontier = [identity]
    while frontier:
        nxt = []
        for element, gen in product(frontier, gens):
            composed = tuple(gen[element[p]] for p in range(degree))
            if composed not in elements:
                elements.add(composed)
                nxt.append(composed)
        frontier = nxt
    return elements


def swap_pair_color(matrix, a: int, b: int, color: int) -> np.ndarray:
    """Copy of `matrix` with the cells (a, b) and (b, a) recolored."""
    m = np.array(matrix, dtype=np.int64)
    m[a, b] = m[b, a] = color
    return m


def corrupted_scheme(x: TatraScheme) -> TatraScheme:
    """`x` with one symmetric pair moved from s_0 to s_1; all colors still occur."""
    m = x.config.matrix
    a = 0
    b = int(np.flatnonzero(m[a] == x.s(0))[0])
    corrupted = swap_pair_color(m, a, b, x.s(1))
    return dataclasses.replace(x, config=CoherentConfiguration(corrupted))
