"""
Tatra schemes X(q, n).

Points are the classes Kv of nonzero vectors v of F^2 modulo the index-n subgroup K of F*. The symplectic
form <Ku, Kv> = K det(u, v) is well defined with values in C = F*/K, and the basis relations are

    r_g = {(a, b) : <a, b> = 0 and b = g a}       s_g = {(a, b) : <a, b> = g}       (g in C)

C is written additively (coset g = log mod n), so r_h r_g = r_{h+g}, r_h s_g = s_{g-h} and s_g r_h = s_{g+h}.
"""

import logging
import dataclasses
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np

from tarotools.tatra import cfg, log as tatra_log
from tarotools.tatra.coco import CoherentConfiguration, IntersectionTensor, canonical_colors, intersection_tensor, \
    parabolic_closure, verify_axioms
from tarotools.tatra.common import SizeLimitExceededError, VerificationError
from tarotools.tatra.field import CosetStructure, FiniteField, FrobeniusData, coset_structure, field_of_order, \
    frobenius_data

log = logging.getLogger(__name__)

Vector = Tuple[int, int]


@dataclass(frozen=True)
class OmegaPoint:
    """The class Kv, represented by the minimum of {xv : x in K} in discrete-log order (0 first)."""

    rep: Vector

    def __str__(self):
        return f"K{self.rep}"


@dataclass(frozen=True)
class RelationLabel:
    kind: str  # 'r' or 's'
    g: int

    def to_json(self):
        return {'kind': self.kind, 'g': self.g}

    def __str__(self):
        return f"{self.kind}_{self.g}"


def _key(f: FiniteField, x: int) -> int:
    return 0 if x == 0 else f.log_table[x] + 1


def canonical_point(cosets: CosetStructure, v: Vector) -> OmegaPoint:
    """
    Canonical representative of Kv: the first nonzero coordinate is scaled into the range of discrete logs
    0..n-1, which is the minimum over the K-orbit.

    Raises:
        ValueError: v is the zero vector
    """
    f = cosets.field
    lead = v[0] if v[0] else v[1]
    if lead == 0:
        raise ValueError("The zero vector does not define a point")
    shift = f.exp(-(f.log(lead) - f.log(lead) % cosets.n))  # element of K
    return OmegaPoint((f.mul(shift, v[0]), f.mul(shift, v[1])))


def point_key(f: FiniteField, point: OmegaPoint) -> Tuple[int, int]:
    return _key(f, point.rep[0]), _key(f, point.rep[1])


def enumerate_points(cosets: CosetStructure) -> List[OmegaPoint]:
    """All n(q+1) points in increasing order of their representatives."""
    f = cosets.field
    reps = [(0, f.exp(g)) for g in range(cosets.n)]
    reps += [(f.exp(g), y) for g in range(cosets.n) for y in f.elements()]
    points = [OmegaPoint(rep) for rep in reps]
    return sorted(points, key=lambda p: point_key(f, p))


@dataclass(frozen=True, eq=False)
class TatraScheme:
    q: int
    n: int
    m: int
    field: FiniteField = dataclasses.field(repr=False)
    cosets: CosetStructure = dataclasses.field(repr=False)
    frobenius: FrobeniusData = dataclasses.field(repr=False)
    points: Tuple[OmegaPoint, ...] = dataclasses.field(repr=False)
    config: CoherentConfiguration = dataclasses.field(repr=False)
    labels: Tuple[RelationLabel, ...] = dataclasses.field(repr=False)
    _index: Dict[Vector, int] = dataclasses.field(repr=False, compare=False)
    _colors: Dict[RelationLabel, int] = dataclasses.field(repr=False, compare=False)

    @property
    def degree(self) -> int:
        return len(self.points)

    @property
    def rank(self) -> int:
        return self.config.rank

    def r(self, g: int) -> int:
        """Color of r_g."""
        return self._colors[RelationLabel('r', g % self.n)]

    def s(self, g: int) -> int:
        """Color of s_g."""
        return self._colors[RelationLabel('s', g % self.n)]

    def label(self, color: int) -> RelationLabel:
        return self.labels[color]

    @property
    def r_colors(self) -> Tuple[int, ...]:
        return tuple(self.r(g) for g in range(self.n))

    @property
    def s_colors(self) -> Tuple[int, ...]:
        return tuple(self.s(g) for g in range(self.n))

    def index_of(self, point) -> int:
        rep = point.rep if isinstance(point, OmegaPoint) else canonical_point(self.cosets, point).rep
        return self._index[rep]

    def canonical(self, v: Vector) -> OmegaPoint:
        return canonical_point(self.cosets, v)

    def form_value(self, alpha: OmegaPoint, beta: OmegaPoint) -> Optional[int]:
        """<alpha, beta> as a coset index, None for zero."""
        if alpha.rep not in self._index or beta.rep not in self._index:
            raise ValueError(f"Points {alpha}, {beta} do not belong to X({self.q},{self.n})")
        return form_value(self.field, self.cosets, alpha.rep, beta.rep)

    def label_map(self) -> Dict[str, Dict[str, object]]:
        """JSON label map {color: {"kind": "r"|"s", "g": g}}."""
        return {str(color): label.to_json() for color, label in enumerate(self.labels)}

    def __repr__(self):
        return f"X({self.q},{self.n})"


def form_value(f: FiniteField, cosets: CosetStructure, u: Vector, v: Vector) -> Optional[int]:
    det = f.det(u, v)
    return None if det == 0 else cosets.coset_of(det)


def _relation_code(f: FiniteField, cosets: CosetStructure, u: Vector, v: Vector) -> int:
    """r_g -> g, s_g -> n + g"""
    det = f.det(u, v)
    if det:
        return cosets.n + cosets.coset_of(det)
    i = 0 if u[0] else 1
    return cosets.coset_of(f.div(v[i], u[i]))


def build_tatra(q: int, n: int) -> TatraScheme:
    """
    Raises:
        InadmissibleParametersError: q not a prime power, n does not divide q-1 or q(q-1)/n odd
        SizeLimitExceededError: field order or degree n(q+1) above the configured limits
    """
    f = field_of_order(q)
    coset_structure(f, n)
    if n * (q + 1) > cfg.max_degree:
        raise SizeLimitExceededError('degree', n * (q + 1), cfg.max_degree)
    return _build_tatra(q, n)


@lru_cache(maxsize=16)
@tatra_log.timing('build_tatra', args_idx=(0, 1))
def _build_tatra(q: int, n: int) -> TatraScheme:
    f = field_of_order(q)
    cosets = coset_structure(f, n)
    frob = frobenius_data(f, cosets)
    points = tuple(enumerate_points(cosets))
    size = len(points)

    codes = np.empty((size, size), dtype=np.int64)
    for a, alpha in enumerate(points):
        u = alpha.rep
        codes[a] = [_relation_code(f, cosets, u, beta.rep) for beta in points]

    colors = canonical_colors(codes)
    _, first = np.unique(colors.reshape(-1), return_index=True)
    first_codes = [int(code) for code in codes.reshape(-1)[first]]
    ordered_labels = tuple(RelationLabel('r', code) if code < n else RelationLabel('s', code - n)
                           for code in first_codes)

    scheme = TatraScheme(
        q=q, n=n, m=cosets.m, field=f, cosets=cosets, frobenius=frob, points=points,
        config=CoherentConfiguration(colors), labels=ordered_labels,
        _index={p.rep: i for i, p in enumerate(points)},
        _colors={label: c for c, label in enumerate(ordered_labels)})
    log.info(f"event=[tatra_built] q=[{q}] n=[{n}] degree=[{scheme.degree}] rank=[{scheme.rank}]")
    return scheme


@dataclass(frozen=True)
class StructureReport:
    q: int
    n: int
    m: int
    degree: int
    rank: int
    checks: Tuple[str, ...]

    def to_json(self):
        return {'q': self.q, 'n': self.n, 'm': self.m, 'degree': self.degree, 'rank': self.rank,
                'checks': list(self.checks), 'passed': True}


def _fail(check: str, message: str, **witness):
    raise VerificationError(check, message, witness)


def check_constants(x: TatraScheme):
    if x.degree != x.n * (x.q + 1):
        _fail('degree', "degree differs from n(q+1)", degree=x.degree, expected=x.n * (x.q + 1))
    if x.rank != 2 * x.n:
        _fail('rank', "rank differs from 2n", rank=x.rank, expected=2 * x.n)
    if x.config.color(0, 0) != x.r(0) or not x.config.is_scheme():
        _fail('diagonal', "the diagonal is not the single relation r_e")


def check_valencies(x: TatraScheme):
    for g in range(x.n):
        if x.config.valency(x.r(g)) != 1:
            _fail('valency_r', "n_{r_g} != 1", g=g, valency=x.config.valency(x.r(g)))
        if x.config.valency(x.s(g)) != x.q:
            _fail('valency_s', "n_{s_g} != q", g=g, valency=x.config.valency(x.s(g)))


def check_inverses(x: TatraScheme):
    for g in range(x.n):
        if x.config.inverse(x.r(g)) != x.r(-g):
            _fail('inverse_r', "r_g* != r_{g^-1}", g=g)
        if x.config.inverse(x.s(g)) != x.s(g):
            _fail('inverse_s', "s_g* != s_g", g=g)


def _single_product(c: IntersectionTensor, a: int, b: int, expected: int, check: str, **witness):
    support = np.flatnonzero(c.entries[a, b])
    if support.tolist() != [expected] or c[a, b, expected] != 1:
        _fail(check, "unexpected relation product", support=support.tolist(), expected=expected, **witness)


def check_products(x: TatraScheme, c: IntersectionTensor):
    """r_h r_g = r_{h+g}, r_h s_g = s_{g-h}, s_g r_h = s_{g+h} as supports of intersection numbers."""
    for h in range(x.n):
        for g in range(x.n):
            _single_product(c, x.r(h), x.r(g), x.r(h + g), 'product_rr', h=h, g=g)
            _single_product(c, x.r(h), x.s(g), x.s(g - h), 'product_rs', h=h, g=g)
            _single_product(c, x.s(g), x.r(h), x.s(g + h), 'product_sr', h=h, g=g)


def check_ss_numbers(x: TatraScheme, c: IntersectionTensor):
    for h in range(x.n):
        for g in range(x.n):
            a, b = x.s(h), x.s(g)
            for y in range(x.n):
                value = c[a, b, x.r(y)]
                expected = x.q if y == (g - h) % x.n else 0
                if value != expected:
                    _fail('c_ss_r', "c_{s_h s_g}^{r_x} mismatch", h=h, g=g, x=y, value=value, expected=expected)
                value = c[a, b, x.s(y)]
                if value != x.m:
                    _fail('c_ss_s', "c_{s_h s_g}^{s_y} != m", h=h, g=g, y=y, value=value, expected=x.m)


def check_line_parabolic(x: TatraScheme):
    """r_C is a parabolic with q+1 classes of size n."""
    parabolic = parabolic_closure(x.config, x.r_colors)
    if sorted(parabolic.colors) != sorted(x.r_colors):
        _fail('r_C_colors', "closure of r_C contains s relations", colors=list(parabolic.colors))
    if parabolic.class_sizes != (x.n,) * (x.q + 1):
        _fail('r_C_classes', "r_C classes are not q+1 classes of size n", sizes=list(parabolic.class_sizes))
    return parabolic


def check_transversal_sections(x: TatraScheme, classes: Iterable[Tuple[int, ...]]):
    """|a s_g ∩ Γ| = 1 for every r_C-class Γ not containing a."""
    class_id = np.empty(x.degree, dtype=np.int64)
    classes = list(classes)
    for idx, members in enumerate(classes):
        class_id[list(members)] = idx
    m = x.config.matrix
    for a in range(x.degree):
        expected = np.ones(len(classes), dtype=np.int64)
        expected[class_id[a]] = 0  # s_g does not meet r_C
        for g in range(x.n):
            counts = np.bincount(class_id[m[a] == x.s(g)], minlength=len(classes))
            bad = np.flatnonzero(counts != expected)
            if bad.size:
                _fail('section', "|a s_g ∩ Γ| != 1", point=a, g=g, cls=int(bad[0]), count=int(counts[bad[0]]))


def check_form_symmetry(x: TatraScheme):
    f, cosets = x.field, x.cosets
    for a, alpha in enumerate(x.points):
        for beta in x.points[a:]:
            if form_value(f, cosets, alpha.rep, beta.rep) != form_value(f, cosets, beta.rep, alpha.rep):
                _fail('form_symmetry', "<a, b> != <b, a>", a=list(alpha.rep), b=list(beta.rep))


def star_table(x: TatraScheme, c: IntersectionTensor) -> np.ndarray:
    """
    The product of the group S*: r * s is the relation product when one factor has valency 1, and
    s_h * s_g is the unique valency-1 relation in s_h s_g.
    """
    k = x.rank
    valency_one = np.array([v == 1 for v in x.config.valencies])
    table = np.empty((k, k), dtype=np.int64)
    for a in range(k):
        for b in range(k):
            support = c.entries[a, b] > 0
            if not (valency_one[a] or valency_one[b]):
                support &= valency_one
            candidates = np.flatnonzero(support)
            if candidates.size != 1:
                _fail('star_product', "star product is not a single relation", a=a, b=b,
                      candidates=candidates.tolist())
            table[a, b] = candidates[0]
    return table


def verify_star_group(x: TatraScheme, c: Optional[IntersectionTensor] = None) -> None:
    """
    (S, *) is a dihedral group of order 2n: r_e is the identity, {r_g} is a cyclic subgroup of index 2
    generated by r_1, every s_g is an involution and s_g * r_h * s_g = r_{-h}.
    """
    c = c if c is not None else intersection_tensor(x.config)
    table = star_table(x, c)
    k = x.rank
    e = x.r(0)
    if not (np.array_equal(table[e], np.arange(k)) and np.array_equal(table[:, e], np.arange(k))):
        _fail('star_identity', "r_e is not the identity of S*")
    for a in range(k):
        left = table[table[a]]  # (a*b)*c over b, c
        right = table[a][table]  # a*(b*c) over b, c
        if not np.array_equal(left, right):
            b, cc = (int(v) for v in np.argwhere(left != right)[0])
            _fail('star_associative', "star product is not associative", a=a, b=b, c=cc)
    for a in range(k):
        if e not in table[a]:
            _fail('star_inverse', "relation without inverse in S*", relation=a)

    generator = x.r(1)
    power, order = generator, 1
    while power != e:
        power = int(table[power, generator])
        order += 1
        if order > k:
            break
    if order != x.n:
        _fail('star_cyclic', "r_1 does not generate a cyclic subgroup of order n", order=order)
    for h in range(x.n):
        if int(table[x.r(h), generator]) != x.r(h + 1):
            _fail('star_cyclic', "r_h * r_1 != r_{h+1}", h=h)
    for g in range(x.n):
        sg = x.s(g)
        if table[sg, sg] != e:
            _fail('star_involution', "s_g is not an involution", g=g)
        for h in range(x.n):
            if table[table[sg, x.r(h)], sg] != x.r(-h):
                _fail('star_dihedral', "s_g * r_h * s_g != r_{-h}", g=g, h=h)


def verify_structure(x: TatraScheme) -> StructureReport:
    """
    Verify the defining properties of X(q, n) against the exact intersection numbers.

    Raises:
        VerificationError: on the first failing check, with a witness
    """
    checks = []

    verify_axioms(x.config).raise_on_failure()
    checks.append('axioms')
    check_constants(x)
    checks.append('constants')

    c = intersection_tensor(x.config)
    check_valencies(x)
    checks.append('valencies')
    check_inverses(x)
    checks.append('inverses')
    check_products(x, c)
    checks.append('products')
    check_ss_numbers(x, c)
    checks.append('intersection_numbers')
    parabolic = check_line_parabolic(x)
    checks.append('line_parabolic')
    check_transversal_sections(x, parabolic.classes)
    checks.append('sections')
    check_form_symmetry(x)
    checks.append('form_symmetry')
    verify_star_group(x, c)
    checks.append('star_group')

    log.info(f"event=[structure_verified] q=[{x.q}] n=[{x.n}] checks=[{len(checks)}]")
    return StructureReport(x.q, x.n, x.m, x.degree, x.rank, tuple(checks))
