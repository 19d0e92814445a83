"""
Permutation groups of small degree: orbits, orbits on ordered pairs and a deterministic Schreier-Sims
stabilizer chain (base points are always the smallest moved point) for group order, membership and
element enumeration.

Permutations act from the right: `p * q` applies p first, then q, so `(p * q)(x) == q(p(x))`.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

import numpy as np

from tarotools.tatra import log as tatra_log

log = logging.getLogger(__name__)


class Permutation:
    """Bijection of {0..N-1} stored as a read-only image array."""

    __slots__ = ('_images',)

    def __init__(self, images, *, check: bool = True):
        arr = np.array(images, dtype=np.int64)
        if check:
            if arr.ndim != 1 or not np.array_equal(np.sort(arr), np.arange(arr.size)):
                raise ValueError(f"Not a permutation of 0..{arr.size - 1}: {list(images)}")
        arr.setflags(write=False)
        self._images = arr

    @classmethod
    def identity(cls, degree: int) -> 'Permutation':
        return cls(np.arange(degree), check=False)

    @classmethod
    def from_cycles(cls, degree: int, *cycles: Sequence[int]) -> 'Permutation':
        images = list(range(degree))
        for cycle in cycles:
            for i, point in enumerate(cycle):
                images[point] = cycle[(i + 1) % len(cycle)]
        return cls(images)

    @property
    def images(self) -> np.ndarray:
        return self._images

    @property
    def degree(self) -> int:
        return self._images.size

    def __call__(self, point: int) -> int:
        return int(self._images[point])

    def __mul__(self, other: 'Permutation') -> 'Permutation':
        if other.degree != self.degree:
            raise ValueError(f"Degree mismatch: {self.degree} and {other.degree}")
        return Permutation(other._images[self._images], check=False)

    def inverse(self) -> 'Permutation':
        inv = np.empty_like(self._images)
        inv[self._images] = np.arange(self.degree)
        return Permutation(inv, check=False)

    def __pow__(self, k: int) -> 'Permutation':
        base = self if k >= 0 else self.inverse()
        result = Permutation.identity(self.degree)
        for _ in range(abs(k)):
            result = result * base
        return result

    def is_identity(self) -> bool:
        return bool(np.array_equal(self._images, np.arange(self.degree)))

    def smallest_moved_point(self) -> Optional[int]:
        moved = np.flatnonzero(self._images != np.arange(self.degree))
        return int(moved[0]) if moved.size else None

    def cycles(self) -> List[Tuple[int, ...]]:
        seen = set()
        out = []
        for start in range(self.degree):
            if start in seen or self(start) == start:
                continue
            cycle = [start]
            seen.add(start)
            point = self(start)
            while point != start:
                cycle.append(point)
                seen.add(point)
                point = self(point)
            out.append(tuple(cycle))
        return out

    def __eq__(self, other):
        return isinstance(other, Permutation) and np.array_equal(self._images, other._images)

    def __hash__(self):
        return hash(self._images.tobytes())

    def __repr__(self):
        cycles = ''.join('(' + ' '.join(map(str, c)) + ')' for c in self.cycles())
        return f"Permutation[{self.degree}]{cycles or '()'}"


@dataclass
class _Level:
    point: int
    generators: List[Permutation] = field(default_factory=list)
    transversal: Dict[int, Permutation] = field(default_factory=dict)

    def rebuild(self, degree: int):
        """BFS from the base point; transversal[x] maps the base point to x."""
        self.transversal = {self.point: Permutation.identity(degree)}
        queue = [self.point]
        for x in queue:
            for s in self.generators:
                y = s(x)
                if y not in self.transversal:
                    self.transversal[y] = self.transversal[x] * s
                    queue.append(y)


class PermGroup:
    """
    Group generated by permutations of {0..degree-1}. The stabilizer chain is built on first use;
    afterwards the group is immutable.
    """

    def __init__(self, degree: int, generators: Iterable[Permutation] = ()):
        self._degree = degree
        self._generators = []
        for g in generators:
            if g.degree != degree:
                raise ValueError(f"Generator of degree {g.degree} in a group of degree {degree}")
            if not g.is_identity() and g not in self._generators:
                self._generators.append(g)
        self._chain: Optional[List[_Level]] = None

    @property
    def degree(self) -> int:
        return self._degree

    @property
    def generators(self) -> Tuple[Permutation, ...]:
        return tuple(self._generators)

    def _check_point(self, point: int):
        if not 0 <= point < self._degree:
            raise ValueError(f"Point {point} out of range 0..{self._degree - 1}")

    def orbit(self, point: int) -> Set[int]:
        self._check_point(point)
        orbit = {point}
        queue = [point]
        for x in queue:
            for g in self._generators:
                y = g(x)
                if y not in orbit:
                    orbit.add(y)
                    queue.append(y)
        return orbit

    def orbits_on_pairs(self) -> np.ndarray:
        """
        Orbits of the componentwise action on ordered pairs as an N x N label matrix. Labels are numbered by the
        first occurrence of the orbit in a row-major scan, the same numbering as `coco.canonical_colors`.
        """
        n = self._degree
        labels = np.full((n, n), -1, dtype=np.int64)
        flat = labels.reshape(-1)
        images = [g.images for g in self._generators]
        label = 0
        for start in range(n * n):
            if flat[start] >= 0:
                continue
            flat[start] = label
            frontier = np.array([start], dtype=np.int64)
            while frontier.size:
                rows, cols = np.divmod(frontier, n)
                found = []
                for img in images:
                    codes = img[rows] * n + img[cols]
                    codes = np.unique(codes[flat[codes] < 0])
                    flat[codes] = label
                    found.append(codes)
                frontier = np.concatenate(found) if found else np.empty(0, dtype=np.int64)
            label += 1
        log.debug(f"event=[pair_orbits] degree=[{n}] orbits=[{label}]")
        return labels

    def _stabilizer_chain(self) -> List[_Level]:
        if self._chain is None:
            self._chain = self._schreier_sims()
        return self._chain

    @tatra_log.timing('stabilizer_chain')
    def _schreier_sims(self) -> List[_Level]:
        degree = self._degree
        levels: List[_Level] = []

        def fixes_base(g, upto):
            return all(g(levels[k].point) == levels[k].point for k in range(upto))

        for g in self._generators:
            if fixes_base(g, len(levels)):
                levels.append(_Level(g.smallest_moved_point()))
        for g in self._generators:
            for j, level in enumerate(levels):
                if not fixes_base(g, j):
                    break
                level.generators.append(g)
        for level in levels:
            level.rebuild(degree)

        i = len(levels) - 1
        while i >= 0:
            extended = False
            level = levels[i]
            for beta, u_beta in list(level.transversal.items()):
                for s in level.generators:
                    schreier = u_beta * s * level.transversal[s(beta)].inverse()
                    if schreier.is_identity():
                        continue
                    residue, j = self._strip(levels, schreier, i + 1)
                    if residue.is_identity():
                        continue
                    if j == len(levels):
                        levels.append(_Level(residue.smallest_moved_point()))
                    for k in range(i + 1, j + 1):
                        levels[k].generators.append(residue)
                        levels[k].rebuild(degree)
                    i = j
                    extended = True
                    break
                if extended:
                    break
            if not extended:
                i -= 1

        log.debug(f"event=[stabilizer_chain] degree=[{degree}] base=[{[lv.point for lv in levels]}]"
                  f" sizes=[{[len(lv.transversal) for lv in levels]}]")
        return levels

    @staticmethod
    def _strip(levels: List[_Level], g: Permutation, start: int) -> Tuple[Permutation, int]:
        for k in range(start, len(levels)):
            beta = g(levels[k].point)
            u = levels[k].transversal.get(beta)
            if u is None:
                return g, k
            g = g * u.inverse()
        return g, len(levels)

    @property
    def base(self) -> Tuple[int, ...]:
        return tuple(level.point for level in self._stabilizer_chain())

    @property
    def transversal_sizes(self) -> Tuple[int, ...]:
        return tuple(len(level.transversal) for level in self._stabilizer_chain())

    def order(self) -> int:
        result = 1
        for size in self.transversal_sizes:
            result *= size
        return result

    def contains(self, f: Permutation) -> bool:
        if f.degree != self._degree:
            raise ValueError(f"Permutation of degree {f.degree} tested against a group of degree {self._degree}")
        levels = self._stabilizer_chain()
        residue, j = self._strip(levels, f, 0)
        return j == len(levels) and residue.is_identity()

    def iter_images(self) -> Iterator[np.ndarray]:
        """
        Every group element exactly once, as an image array. Elements are the products
        u_{L-1} * ... * u_0 of transversal elements, enumerated depth first in transversal order.
        """
        levels = self._stabilizer_chain()
        identity = np.arange(self._degree)
        if not levels:
            yield identity
            return

        tables = [[u.images for u in level.transversal.values()] for level in levels]

        def walk(idx, acc):
            for u in tables[idx]:
                nxt = u[acc]
                if idx == 0:
                    yield nxt
                else:
                    yield from walk(idx - 1, nxt)

        yield from walk(len(levels) - 1, identity)

    def __repr__(self):
        return f"PermGroup(degree={self._degree}, generators={len(self._generators)})"
