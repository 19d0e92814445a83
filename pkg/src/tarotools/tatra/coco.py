"""
Coherent configurations on a point set {0..N-1} given by a dense color matrix.

The module provides the generic machinery used by the Tatra scheme checks:
 - axiom verification and exact intersection numbers,
 - fibers, valencies, inverse relations and parabolics,
 - coherent closure (2-dimensional Weisfeiler-Leman stabilization), one-point extensions,
   restrictions to fibers and the 2-extension.

Colors are always numbered canonically by first occurrence in a row-major scan, so two configurations
are equal up to renaming of colors iff their canonical matrices are equal.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, Mapping, Optional, Tuple, Union

import numpy as np

from tarotools.tatra import cfg, log as tatra_log
from tarotools.tatra.common import SizeLimitExceededError, VerificationError
from tarotools.tatra.util import write_text_file

log = logging.getLogger(__name__)


def _as_square(matrix) -> np.ndarray:
    arr = np.asarray(matrix)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"Color matrix must be square, got shape {arr.shape}")
    return arr


def canonical_colors(matrix) -> np.ndarray:
    """Renumber the colors of `matrix` 0, 1, ... by first occurrence in a row-major scan."""
    arr = np.asarray(matrix)
    flat = arr.reshape(-1)
    if flat.size == 0:
        return np.zeros(arr.shape, dtype=np.int64)
    _, first, inverse = np.unique(flat, return_index=True, return_inverse=True)
    order = np.argsort(first)
    renumber = np.empty_like(order)
    renumber[order] = np.arange(order.size)
    return renumber[inverse.reshape(-1)].reshape(arr.shape).astype(np.int64)


def same_partition(a, b) -> bool:
    """True iff the colorings `a` and `b` induce the same partition of the cells."""
    a, b = np.asarray(a), np.asarray(b)
    return a.shape == b.shape and np.array_equal(canonical_colors(a), canonical_colors(b))


def color_count(matrix) -> int:
    return int(np.unique(np.asarray(matrix)).size)


class CoherentConfiguration:
    """
    Immutable coherent configuration. The constructor expects colors 0..k-1 that all occur; the relation
    metadata (fibers, valency, inverse, fiber pair) is read from the first occurrence of each color.
    Use `verify_axioms` to check that the matrix actually is coherent.
    """

    def __init__(self, matrix):
        arr = _as_square(matrix)
        colors = np.unique(arr)
        if colors.size and (colors[0] != 0 or colors[-1] != colors.size - 1):
            raise ValueError("Colors must be 0..k-1 with every color occurring")
        rank = int(colors.size)

        self._matrix = arr.astype(np.uint16 if rank <= np.iinfo(np.uint16).max else np.int32)
        self._matrix.setflags(write=False)
        self._rank = rank

        n = arr.shape[0]
        diagonal = self._matrix.diagonal().astype(np.int64)
        _, first_diag = np.unique(diagonal, return_index=True)
        fiber_colors = diagonal[np.sort(first_diag)]
        self._fibers = tuple(tuple(int(p) for p in np.flatnonzero(diagonal == c)) for c in fiber_colors)
        self._point_fiber = np.empty(n, dtype=np.int64)
        for idx, fiber in enumerate(self._fibers):
            self._point_fiber[list(fiber)] = idx

        flat = self._matrix.reshape(-1).astype(np.int64)
        _, first = np.unique(flat, return_index=True)
        self._representatives = tuple((int(i // n), int(i % n)) for i in first)
        self._inverse = tuple(int(self._matrix[b, a]) for a, b in self._representatives)
        self._fiber_pairs = tuple((int(self._point_fiber[a]), int(self._point_fiber[b]))
                                  for a, b in self._representatives)
        self._valencies = tuple(int(np.count_nonzero(self._matrix[a] == c))
                                for c, (a, _) in enumerate(self._representatives))

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def size(self) -> int:
        return self._matrix.shape[0]

    @property
    def rank(self) -> int:
        return self._rank

    @property
    def fibers(self) -> Tuple[Tuple[int, ...], ...]:
        return self._fibers

    def fiber_of(self, point: int) -> int:
        return int(self._point_fiber[point])

    def is_scheme(self) -> bool:
        return len(self._fibers) == 1

    def color(self, a: int, b: int) -> int:
        return int(self._matrix[a, b])

    def valency(self, s: int) -> int:
        """n_s, the number of points b with (a, b) in s for any a in the source fiber of s."""
        return self._valencies[s]

    @property
    def valencies(self) -> Tuple[int, ...]:
        return self._valencies

    def inverse(self, s: int) -> int:
        return self._inverse[s]

    def fiber_pair(self, s: int) -> Tuple[int, int]:
        return self._fiber_pairs[s]

    def representative(self, s: int) -> Tuple[int, int]:
        return self._representatives[s]

    def neighbourhood(self, a: int, s: int) -> Tuple[int, ...]:
        """The set a·s = {b : (a, b) in s}."""
        return tuple(int(b) for b in np.flatnonzero(self._matrix[a] == s))

    def diagonal_colors(self) -> Tuple[int, ...]:
        return tuple(int(self._matrix[f[0], f[0]]) for f in self._fibers)

    def __repr__(self):
        return f"CoherentConfiguration(size={self.size}, rank={self.rank}, fibers={len(self._fibers)})"


def colors_between(x: CoherentConfiguration, i: int, j: int) -> Tuple[int, ...]:
    """Colors contained in F_i x F_j for the fibers with indices `i` and `j`."""
    return tuple(s for s in range(x.rank) if x.fiber_pair(s) == (i, j))


@dataclass(frozen=True)
class AxiomReport:
    passed: bool
    axiom: Optional[str] = None
    message: str = 'coherent'
    witness: Mapping[str, Any] = field(default_factory=dict)

    def __bool__(self):
        return self.passed

    def raise_on_failure(self):
        if not self.passed:
            raise VerificationError(self.axiom, self.message, self.witness)


def verify_axioms(matrix) -> AxiomReport:
    """
    Check that a color matrix is a coherent configuration:
     1. colors are 0..k-1 and all occur,
     2. the diagonal is a union of colors,
     3. the colors are closed under transposition,
     4. the intersection numbers are well defined.

    The first failing axiom is reported with a counterexample.

    Raises:
        ValueError: non-square input
    """
    if isinstance(matrix, CoherentConfiguration):
        matrix = matrix.matrix
    m = _as_square(matrix).astype(np.int64)
    n = m.shape[0]
    present = np.unique(m)
    k = int(present.size)
    if k and (present[0] != 0 or present[-1] != k - 1):
        return AxiomReport(False, 'colors', "colors are not 0..k-1", {'colors': present.tolist()})

    diag_colors = np.unique(m.diagonal())
    off_diag = ~np.eye(n, dtype=bool)
    clash = np.argwhere(off_diag & np.isin(m, diag_colors))
    if clash.size:
        a, b = (int(v) for v in clash[0])
        return AxiomReport(False, 'diagonal', "a diagonal color occurs off the diagonal",
                           {'pair': [a, b], 'color': int(m[a, b])})

    inverse = np.full(k, -1, dtype=np.int64)
    inverse[m.reshape(-1)] = m.T.reshape(-1)
    bad = np.argwhere(inverse[m] != m.T)
    if bad.size:
        a, b = (int(v) for v in bad[0])
        return AxiomReport(False, 'transpose', "transposes of one color have different colors",
                           {'pair': [a, b], 'color': int(m[a, b]), 'transpose_color': int(m[b, a])})

    # column beta of sorted(codes) is the multiset {(c(alpha, gamma), c(gamma, beta))} over gamma
    refs = np.zeros((k, n), dtype=np.int64)
    ref_pair = np.full((k, 2), -1, dtype=np.int64)
    for a in range(n):
        codes = m[a][:, None] * k + m
        signatures = np.sort(codes, axis=0).T
        row_colors = m[a]
        for b in np.flatnonzero(ref_pair[row_colors, 0] < 0):
            t = row_colors[b]
            if ref_pair[t, 0] < 0:
                refs[t] = signatures[b]
                ref_pair[t] = (a, b)
        mismatch = np.flatnonzero(np.any(refs[row_colors] != signatures, axis=1))
        if mismatch.size:
            b = int(mismatch[0])
            t = int(row_colors[b])
            got = dict(zip(*np.unique(signatures[b], return_counts=True)))
            expected = dict(zip(*np.unique(refs[t], return_counts=True)))
            code = min(c for c in set(got) | set(expected) if got.get(c, 0) != expected.get(c, 0))
            return AxiomReport(False, 'intersection_numbers', "intersection number is not constant on a color",
                               {'r': int(code // k), 's': int(code % k), 't': t, 'pair': [a, b],
                                'count': int(got.get(code, 0)), 'expected': int(expected.get(code, 0)),
                                'reference_pair': [int(v) for v in ref_pair[t]]})

    return AxiomReport(True)


class IntersectionTensor:
    """Dense array c[r, s, t] of the intersection numbers c_{rs}^t."""

    def __init__(self, entries: np.ndarray):
        self._entries = np.asarray(entries, dtype=np.int64)
        self._entries.setflags(write=False)

    @property
    def rank(self) -> int:
        return self._entries.shape[0]

    @property
    def entries(self) -> np.ndarray:
        return self._entries

    def __getitem__(self, rst):
        return int(self._entries[rst])

    def to_json(self) -> Dict[str, Any]:
        return {'rank': self.rank, 'entries': self._entries.tolist()}


def intersection_tensor(x: CoherentConfiguration) -> IntersectionTensor:
    """
    Exact intersection numbers counted on the representative pair (a, b) of each color t:
    c[r, s, t] = |{g : (a, g) in r and (g, b) in s}|. Axioms are assumed to hold.
    """
    m = x.matrix.astype(np.int64)
    k = x.rank
    entries = np.zeros((k, k, k), dtype=np.int64)
    for t in range(k):
        a, b = x.representative(t)
        codes = m[a, :] * k + m[:, b]
        entries[:, :, t] = np.bincount(codes, minlength=k * k).reshape(k, k)
    return IntersectionTensor(entries)


@dataclass(frozen=True)
class Parabolic:
    """An equivalence relation that is a union of colors, given by its classes and its colors."""

    classes: Tuple[Tuple[int, ...], ...]
    colors: Tuple[int, ...]

    @property
    def class_sizes(self) -> Tuple[int, ...]:
        return tuple(len(c) for c in self.classes)

    def class_of(self, point: int) -> Tuple[int, ...]:
        return next(c for c in self.classes if point in c)


def parabolic_closure(x: CoherentConfiguration, s: Union[int, Iterable[int]]) -> Parabolic:
    """
    The smallest equivalence relation containing the union of the colors `s`.

    Raises:
        VerificationError: the closure is not a union of colors (X is not coherent)
    """
    colors = [s] if isinstance(s, (int, np.integer)) else list(s)
    m = x.matrix.astype(np.int64)
    n = x.size
    adjacency = np.isin(m, colors)
    adjacency |= adjacency.T
    np.fill_diagonal(adjacency, True)

    class_id = np.full(n, -1, dtype=np.int64)
    classes = []
    for start in range(n):
        if class_id[start] >= 0:
            continue
        members = np.zeros(n, dtype=bool)
        members[start] = True
        frontier = members.copy()
        while frontier.any():
            reached = adjacency[frontier].any(axis=0) & ~members
            members |= reached
            frontier = reached
        class_id[members] = len(classes)
        classes.append(tuple(int(p) for p in np.flatnonzero(members)))

    same_class = class_id[:, None] == class_id[None, :]
    inside = np.bincount(m[same_class], minlength=x.rank)
    total = np.bincount(m.reshape(-1), minlength=x.rank)
    split = np.flatnonzero((inside != 0) & (inside != total))
    if split.size:
        raise VerificationError('parabolic_union_of_colors', "parabolic closure is not a union of colors",
                                {'color': int(split[0]), 'generators': [int(c) for c in colors]})

    return Parabolic(tuple(classes), tuple(int(c) for c in np.flatnonzero(inside)))


def _refine(colors: np.ndarray) -> np.ndarray:
    """
    One 2-dim WL round: the new color of (a, b) is determined by its current color and the multiset
    {(c(a, g), c(g, b)) : g}. Signatures are compared exactly; new colors are numbered by first occurrence.
    """
    n = colors.shape[0]
    k = int(colors.max()) + 1 if colors.size else 0
    dtype = np.int32 if k * k + k < np.iinfo(np.int32).max else np.int64
    cur = colors.astype(dtype)
    refined = np.empty((n, n), dtype=np.int64)
    signatures: Dict[bytes, int] = {}
    for a in range(n):
        codes = np.sort(cur[a][:, None] * k + cur, axis=0).T
        keyed = np.concatenate([cur[a][:, None], codes], axis=1)
        for b in range(n):
            refined[a, b] = signatures.setdefault(keyed[b].tobytes(), len(signatures))
    return refined


@tatra_log.timing('coherent_closure')
def coherent_closure(coloring) -> CoherentConfiguration:
    """
    The coarsest coherent configuration refining `coloring`. The initial partition is refined by
    (P(a, b), P(b, a), a = b) so the diagonal and transposition axioms hold from the start, then
    WL rounds run until the number of colors stops growing.
    """
    base = canonical_colors(_as_square(coloring))
    n = base.shape[0]
    if n == 0:
        return CoherentConfiguration(base)
    k0 = int(base.max()) + 1
    colors = canonical_colors((base * k0 + base.T) * 2 + np.eye(n, dtype=np.int64))
    count = int(colors.max()) + 1

    rounds = 0
    while True:
        refined = _refine(colors)
        rounds += 1
        refined_count = int(refined.max()) + 1
        log.debug(f"event=[wl_round] round=[{rounds}] colors=[{refined_count}]")
        if refined_count == count:
            break
        colors, count = refined, refined_count

    log.debug(f"event=[closure_stable] points=[{n}] rounds=[{rounds}] rank=[{count}]")
    return CoherentConfiguration(colors)


def one_point_extension(x: CoherentConfiguration, alpha: int) -> CoherentConfiguration:
    """X_alpha: the closure of X with the cell (alpha, alpha) in a color of its own."""
    if not 0 <= alpha < x.size:
        raise ValueError(f"Point {alpha} out of range 0..{x.size - 1}")
    coloring = x.matrix.astype(np.int64)
    coloring[alpha, alpha] = x.rank
    return coherent_closure(coloring)


def restriction(x: CoherentConfiguration, delta: Iterable[int]) -> CoherentConfiguration:
    """
    X_delta for a fiber delta: the submatrix on delta (points in increasing order) with colors renumbered.

    Raises:
        ValueError: `delta` is not a fiber of `x`
    """
    points = tuple(sorted(int(p) for p in delta))
    if points not in x.fibers:
        raise ValueError(f"Point set of size {len(points)} is not a fiber")
    sub = x.matrix[np.ix_(points, points)]
    return CoherentConfiguration(canonical_colors(sub))


def is_regular(x: CoherentConfiguration) -> bool:
    """
    Raises:
        ValueError: `x` has more than one fiber
    """
    if not x.is_scheme():
        raise ValueError(f"Regularity is defined for schemes, the configuration has {len(x.fibers)} fibers")
    return all(v == 1 for v in x.valencies)


def extension_diagonal(size: int) -> Tuple[int, ...]:
    """Indices of the points (a, a) among the points a * size + b of the 2-extension."""
    return tuple(a * size + a for a in range(size))


def m_extension(x: CoherentConfiguration, m: int = 2) -> CoherentConfiguration:
    """
    The 2-extension of `x`: the coherent closure on the ordered pairs of points (point (a, b) has index
    a * N + b) of the Cartesian square coloring ((a, b), (c, d)) -> (c(a, c), c(b, d)), with the points
    (a, a) separated from the others.

    Raises:
        ValueError: m != 2
        SizeLimitExceededError: the N^2 points exceed `cfg.extension_max_points`
    """
    if m != 2:
        raise ValueError(f"Only the 2-extension is supported, got m={m}")
    n = x.size
    if n * n > cfg.extension_max_points:
        raise SizeLimitExceededError('extension point count', n * n, cfg.extension_max_points)

    c = x.matrix.astype(np.int64)
    k = x.rank
    square = (c[:, None, :, None] * k + c[None, :, None, :]).reshape(n * n, n * n)
    on_diagonal = np.eye(n, dtype=np.int64).reshape(-1)
    coloring = square * 4 + 2 * on_diagonal[:, None] + on_diagonal[None, :]
    log.info(f"event=[m_extension_started] points=[{n * n}] base_rank=[{k}]")
    return coherent_closure(coloring)


def dumps_matrix(matrix) -> str:
    """Text format: a header line "N k" followed by N rows of space separated colors."""
    if isinstance(matrix, CoherentConfiguration):
        matrix = matrix.matrix
    arr = _as_square(matrix)
    lines = [f"{arr.shape[0]} {color_count(arr)}"]
    lines += [' '.join(str(int(v)) for v in row) for row in arr]
    return '\n'.join(lines) + '\n'


def parse_matrix(text: str) -> np.ndarray:
    lines = [line.split() for line in text.splitlines() if line.strip()]
    if not lines or len(lines[0]) != 2:
        raise ValueError("Missing header line `N k`")
    n, k = (int(v) for v in lines[0])
    rows = lines[1:]
    if len(rows) != n or any(len(row) != n for row in rows):
        raise ValueError(f"Expected {n} rows of {n} colors")
    arr = np.array([[int(v) for v in row] for row in rows], dtype=np.int64).reshape(n, n)
    if color_count(arr) != k:
        raise ValueError(f"Header announces {k} colors, matrix has {color_count(arr)}")
    return arr


def dump_matrix(matrix, path):
    return write_text_file(path, dumps_matrix(matrix))


def load_matrix(path) -> np.ndarray:
    with open(path, 'r', encoding='utf-8') as file:
        return parse_matrix(file.read())
