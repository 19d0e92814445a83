"""
Combinatorial and algebraic automorphisms of Tatra schemes.

The semilinear group acts on the points by (Kv)^(T, sigma) = K(T v^sigma). A map (T, Frob^i) sends
r_g to r_{g r^i} and s_g to s_{det(T) + g r^i} (C written additively). The algebraic automorphisms are the
maps phi_{u,g}: r_h -> r_{uh}, s_h -> s_{uh+g} for units u mod n; phi_{u,g} is induced by a combinatorial
isomorphism iff u is a power of the characteristic r modulo n.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from tarotools.tatra import cfg
from tarotools.tatra.coco import CoherentConfiguration, IntersectionTensor, intersection_tensor, parabolic_closure, \
    same_partition
from tarotools.tatra.common import SizeLimitExceededError, VerificationError
from tarotools.tatra.field import euler_phi, is_primitive_root, units
from tarotools.tatra.perm import PermGroup, Permutation
from tarotools.tatra.scheme import OmegaPoint, TatraScheme

log = logging.getLogger(__name__)

Matrix = Tuple[Tuple[int, int], Tuple[int, int]]
ColorMap = Tuple[int, ...]


@dataclass(frozen=True)
class SemilinearMap:
    """v -> T v^sigma with sigma = Frob^frob_power."""

    matrix: Matrix
    frob_power: int = 0

    def det(self, x: TatraScheme) -> int:
        (a, b), (c, d) = self.matrix
        return x.field.sub(x.field.mul(a, d), x.field.mul(b, c))

    def apply(self, x: TatraScheme, v: Tuple[int, int]) -> Tuple[int, int]:
        f = x.field
        (a, b), (c, d) = self.matrix
        v1, v2 = f.frobenius(v[0], self.frob_power), f.frobenius(v[1], self.frob_power)
        return f.add(f.mul(a, v1), f.mul(b, v2)), f.add(f.mul(c, v1), f.mul(d, v2))

    def to_json(self) -> Dict[str, Any]:
        return {'matrix': [list(row) for row in self.matrix], 'frob_power': self.frob_power}


def identity_map() -> SemilinearMap:
    return SemilinearMap(((1, 0), (0, 1)), 0)


def diagonal_map(x: int, frob_power: int = 0) -> SemilinearMap:
    return SemilinearMap(((x, 0), (0, 1)), frob_power)


def _check_invertible(f: SemilinearMap, x: TatraScheme):
    if f.det(x) == 0:
        raise ValueError(f"Singular matrix {f.matrix}")


def act(f: SemilinearMap, x: TatraScheme, alpha: OmegaPoint) -> OmegaPoint:
    """The point K(T v^sigma) for alpha = Kv."""
    return x.canonical(f.apply(x, alpha.rep))


def perm_of(f: SemilinearMap, x: TatraScheme) -> Permutation:
    _check_invertible(f, x)
    return Permutation([x.index_of(act(f, x, alpha)) for alpha in x.points])


def formula_color_map(f: SemilinearMap, x: TatraScheme) -> ColorMap:
    """r_g -> r_{g r^i}, s_g -> s_{det(T) + g r^i}"""
    scale = pow(x.field.char, f.frob_power % x.field.degree, x.n)
    shift = x.cosets.coset_of(f.det(x))
    images = []
    for label in x.labels:
        if label.kind == 'r':
            images.append(x.r(label.g * scale))
        else:
            images.append(x.s(shift + label.g * scale))
    return tuple(images)


def relation_image(f: SemilinearMap, x: TatraScheme) -> ColorMap:
    """
    The color map of f, computed from the formula and from the permutation of f on the whole color matrix.

    Raises:
        VerificationError: the two computations disagree
    """
    expected = formula_color_map(f, x)
    p = perm_of(f, x)
    m = x.config.matrix.astype(np.int64)
    images = p.images
    moved = m[np.ix_(images, images)]
    predicted = np.array(expected, dtype=np.int64)[m]
    if not np.array_equal(moved, predicted):
        a, b = (int(v) for v in np.argwhere(moved != predicted)[0])
        raise VerificationError('relation_image', "permutation action disagrees with the relation image formula",
                                {'map': f.to_json(), 'pair': [a, b], 'color': int(m[a, b]),
                                 'image_color': int(moved[a, b]), 'formula_color': int(predicted[a, b])})
    return expected


def _transvections(x: TatraScheme) -> List[SemilinearMap]:
    f = x.field
    maps = []
    for i in range(f.degree):
        rho_i = f.exp(i)
        maps.append(SemilinearMap(((1, rho_i), (0, 1))))
        maps.append(SemilinearMap(((1, 0), (rho_i, 1))))
    return maps


def automorphism_generators(x: TatraScheme) -> List[SemilinearMap]:
    """SL(2,q), diag(kappa, 1) with <kappa> = K and Frob^(d/d0), the generator of Sigma_0."""
    return (_transvections(x)
            + [diagonal_map(x.cosets.kappa)]
            + [SemilinearMap(((1, 0), (0, 1)), x.frobenius.order_on_C % x.field.degree)])


def isomorphism_generators(x: TatraScheme) -> List[SemilinearMap]:
    """Generators of the full semilinear group: the automorphism generators, diag(rho, 1) and Frob."""
    return (automorphism_generators(x)
            + [diagonal_map(x.field.primitive_element)]
            + [SemilinearMap(((1, 0), (0, 1)), 1 % x.field.degree)])


@lru_cache(maxsize=8)
def automorphism_group(x: TatraScheme) -> PermGroup:
    group = PermGroup(x.degree, [perm_of(f, x) for f in automorphism_generators(x)])
    log.info(f"event=[aut_group] scheme=[{x!r}] order=[{group.order()}]")
    return group


@lru_cache(maxsize=8)
def isomorphism_group(x: TatraScheme) -> PermGroup:
    group = PermGroup(x.degree, [perm_of(f, x) for f in isomorphism_generators(x)])
    log.info(f"event=[iso_group] scheme=[{x!r}] order=[{group.order()}]")
    return group


def gl2_order(q: int) -> int:
    return (q * q - 1) * (q * q - q)


def sl2_order(q: int) -> int:
    return q * (q * q - 1)


def is_orbit_partition(group: PermGroup, matrix) -> bool:
    """True iff the orbits of `group` on ordered pairs are exactly the color classes of `matrix`."""
    return same_partition(group.orbits_on_pairs(), matrix)


def schurity_check(x: TatraScheme) -> bool:
    """
    Raises:
        SizeLimitExceededError: degree above `cfg.schurity_max_degree`
    """
    if x.degree > cfg.schurity_max_degree:
        raise SizeLimitExceededError('schurity check degree', x.degree, cfg.schurity_max_degree)
    return is_orbit_partition(automorphism_group(x), x.config.matrix)


@dataclass(frozen=True)
class AlgebraicAut:
    """phi_{u,g}: r_h -> r_{uh}, s_h -> s_{uh+g} on the relations of a Tatra scheme with |C| = n."""

    u: int
    g_shift: int
    n: int

    def __post_init__(self):
        if math.gcd(self.u, self.n) != 1:
            raise ValueError(f"u={self.u} is not a unit modulo n={self.n}")

    def color_map(self, x: TatraScheme) -> ColorMap:
        if x.n != self.n:
            raise ValueError(f"Algebraic automorphism for n={self.n} applied to {x!r}")
        images = []
        for label in x.labels:
            if label.kind == 'r':
                images.append(x.r(self.u * label.g))
            else:
                images.append(x.s(self.u * label.g + self.g_shift))
        return tuple(images)

    def is_identity(self) -> bool:
        return self.u % self.n == 1 % self.n and self.g_shift % self.n == 0

    def to_json(self) -> Dict[str, int]:
        return {'u': self.u, 'g': self.g_shift}


def preserves_tensor(tensor: IntersectionTensor, cmap: Sequence[int]) -> bool:
    idx = np.asarray(cmap, dtype=np.int64)
    return bool(np.array_equal(tensor.entries[np.ix_(idx, idx, idx)], tensor.entries))


def search_algebraic_automorphisms(config: CoherentConfiguration,
                                   tensor: Optional[IntersectionTensor] = None) -> List[ColorMap]:
    """
    Every permutation of the colors that preserves valencies and all intersection numbers, by backtracking
    over the colors 0, 1, ... with the sub-tensor on the assigned colors checked at every step.
    """
    tensor = tensor if tensor is not None else intersection_tensor(config)
    c = tensor.entries
    k = config.rank
    valencies = config.valencies
    assignment = np.full(k, -1, dtype=np.int64)
    used = np.zeros(k, dtype=bool)
    found: List[ColorMap] = []

    def consistent(depth):
        idx = np.arange(depth + 1)
        img = assignment[:depth + 1]
        return np.array_equal(c[np.ix_(img, img, img)], c[np.ix_(idx, idx, idx)])

    def extend(depth):
        if depth == k:
            found.append(tuple(int(v) for v in assignment))
            return
        for target in range(k):
            if used[target] or valencies[target] != valencies[depth]:
                continue
            assignment[depth] = target
            if consistent(depth):
                used[target] = True
                extend(depth + 1)
                used[target] = False
            assignment[depth] = -1

    extend(0)
    log.debug(f"event=[algebraic_search] rank=[{k}] found=[{len(found)}]")
    return found


def enumerate_algebraic_auts(x: TatraScheme) -> List[AlgebraicAut]:
    """
    All phi_{u,g}, each checked to preserve the intersection tensor, the valencies and the parabolics
    <s>. Up to rank `cfg.algebraic_search_max_rank` the list is also compared with an exhaustive search
    over all valency-preserving color permutations.

    Raises:
        VerificationError: a map fails a check or the exhaustive search finds different maps
    """
    tensor = intersection_tensor(x.config)
    valencies = np.array(x.config.valencies)
    parabolic_colors = [frozenset(parabolic_closure(x.config, s).colors) for s in range(x.rank)]

    auts = [AlgebraicAut(u, g, x.n) for u in units(x.n) for g in range(x.n)]
    for phi in auts:
        cmap = phi.color_map(x)
        if not preserves_tensor(tensor, cmap):
            raise VerificationError('algebraic_aut_tensor', "map does not preserve intersection numbers",
                                    phi.to_json())
        if not np.array_equal(valencies[list(cmap)], valencies):
            raise VerificationError('algebraic_aut_valency', "map does not preserve valencies", phi.to_json())
        for s in range(x.rank):
            if frozenset(cmap[t] for t in parabolic_colors[s]) != parabolic_colors[cmap[s]]:
                raise VerificationError('algebraic_aut_parabolic', "map does not preserve the parabolic <s>",
                                        {**phi.to_json(), 'relation': s})

    if len(auts) != x.n * euler_phi(x.n):
        raise VerificationError('algebraic_aut_count', "number of maps differs from n*phi(n)",
                                {'count': len(auts), 'expected': x.n * euler_phi(x.n)})

    if x.rank <= cfg.algebraic_search_max_rank:
        searched = set(search_algebraic_automorphisms(x.config, tensor))
        expected = {phi.color_map(x) for phi in auts}
        if searched != expected:
            extra = sorted(searched - expected)
            raise VerificationError('algebraic_aut_exhaustive', "exhaustive search disagrees with Hol(C)",
                                    {'searched': len(searched), 'expected': len(expected),
                                     'extra': [list(cm) for cm in extra[:1]]})
    else:
        log.info(f"event=[algebraic_search_skipped] scheme=[{x!r}] rank=[{x.rank}]"
                 f" limit=[{cfg.algebraic_search_max_rank}]")

    return auts


def _iso_enumeration_allowed(x: TatraScheme) -> bool:
    return isomorphism_group(x).order() <= cfg.iso_enumeration_max_order


def induced_color_maps(x: TatraScheme) -> FrozenSet[ColorMap]:
    """
    Color maps of all elements of the isomorphism group, by enumeration of the group.

    Raises:
        SizeLimitExceededError: group order above `cfg.iso_enumeration_max_order`
    """
    order = isomorphism_group(x).order()
    if order > cfg.iso_enumeration_max_order:
        raise SizeLimitExceededError('isomorphism group order', order, cfg.iso_enumeration_max_order)
    return _induced_color_maps(x)


@lru_cache(maxsize=8)
def _induced_color_maps(x: TatraScheme) -> FrozenSet[ColorMap]:
    group = isomorphism_group(x)
    order = group.order()
    m = x.config.matrix.astype(np.int64)
    reps = np.array([x.config.representative(c) for c in range(x.rank)], dtype=np.int64)
    maps = set()
    for images in group.iter_images():
        maps.add(tuple(int(c) for c in m[images[reps[:, 0]], images[reps[:, 1]]]))
    log.debug(f"event=[induced_maps] scheme=[{x!r}] elements=[{order}] maps=[{len(maps)}]")
    return frozenset(maps)


def is_induced(phi: AlgebraicAut, x: TatraScheme) -> Optional[SemilinearMap]:
    """
    A semilinear map inducing phi, or None. The witness (diag(x, 1), Frob^i) with r^i = u mod n and
    coset(x) = g is checked with `relation_image`; when the isomorphism group is small enough the answer is
    also compared with the color maps of all its elements.

    Raises:
        VerificationError: the witness does not induce phi or the two routes disagree
    """
    target = phi.color_map(x)
    i = x.frobenius.exponent_of(phi.u % x.n)
    witness = None
    if i is not None:
        witness = diagonal_map(x.cosets.representative(phi.g_shift), i)
        if relation_image(witness, x) != target:
            raise VerificationError('induced_witness', "witness does not induce the algebraic automorphism",
                                    {**phi.to_json(), 'witness': witness.to_json()})

    if _iso_enumeration_allowed(x):
        brute = target in induced_color_maps(x)
        if brute != (witness is not None):
            raise VerificationError('induced_routes', "criterion and group enumeration disagree",
                                    {**phi.to_json(), 'criterion': witness is not None, 'enumeration': brute})
    return witness


@dataclass(frozen=True)
class InducedRatio:
    alg_aut_count: int
    induced_count: int
    ratio: int


def induced_ratio(x: TatraScheme) -> InducedRatio:
    """
    |Aut_alg| / |Aut_alg^ind| with the induced count taken by counting induced phi and as |Iso| / |Aut|.

    Raises:
        VerificationError: the two counts disagree or differ from n*d/d0
    """
    auts = enumerate_algebraic_auts(x)
    counted = sum(1 for phi in auts if is_induced(phi, x) is not None)
    iso_order = isomorphism_group(x).order()
    aut_order = automorphism_group(x).order()
    expected = x.n * x.frobenius.d // x.frobenius.d0
    if iso_order % aut_order or iso_order // aut_order != counted or counted != expected:
        raise VerificationError('induced_ratio', "induced counts disagree",
                                {'counted': counted, 'iso_order': iso_order, 'aut_order': aut_order,
                                 'expected': expected})

    ratio, rest = divmod(len(auts), counted)
    expected_ratio = euler_phi(x.n) * x.frobenius.d0 // x.frobenius.d
    if rest or ratio != expected_ratio:
        raise VerificationError('induced_ratio', "ratio differs from phi(n) d0 / d",
                                {'alg_aut_count': len(auts), 'induced_count': counted, 'expected': expected_ratio})
    return InducedRatio(len(auts), counted, ratio)


def random_semilinear_map(x: TatraScheme, rng: np.random.Generator) -> SemilinearMap:
    f = x.field
    while True:
        a, b, c, d = (int(v) for v in rng.integers(0, f.order, size=4))
        candidate = SemilinearMap(((a, b), (c, d)), int(rng.integers(0, f.degree)))
        if candidate.det(x):
            return candidate


def check_relation_images(x: TatraScheme, samples: Optional[int] = None, seed: Optional[int] = None) -> int:
    """Run `relation_image` on random semilinear maps; returns the number of checked maps."""
    samples = cfg.relation_image_samples if samples is None else samples
    rng = np.random.default_rng(cfg.random_seed if seed is None else seed)
    for _ in range(samples):
        relation_image(random_semilinear_map(x, rng), x)
    return samples


def groups_report(x: TatraScheme) -> Dict[str, Any]:
    iso_order = isomorphism_group(x).order()
    aut_order = automorphism_group(x).order()
    ratio = induced_ratio(x)
    frob = x.frobenius
    return {
        'q': x.q,
        'n': x.n,
        'm': x.m,
        'd': frob.d,
        'd0': frob.d0,
        'rank': x.rank,
        'degree': x.degree,
        'aut_order': aut_order,
        'iso_order': iso_order,
        'alg_aut_count': ratio.alg_aut_count,
        'induced_count': ratio.induced_count,
        'ratio': ratio.ratio,
        'primitive_root': is_primitive_root(x.field.char, x.n),
        'iso_kernel_order': gl2_order(x.q) * frob.d // iso_order,
        'aut_kernel_order': sl2_order(x.q) * x.m * frob.d0 // aut_order,
    }
