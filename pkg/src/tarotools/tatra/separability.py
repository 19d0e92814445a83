"""
Separability bounds for Tatra schemes.

For a base point alpha with one-point extension Y = X_alpha and the fiber Delta = alpha s_e of Y, the
following hypotheses give s(X) <= 2:
 - the fibers of Y are exactly the sets alpha s,
 - every other fiber is linked to Delta by a relation of valency 1,
 - Y restricted to Delta is a regular scheme.
The first two hold for every Tatra scheme. The last one holds iff m = (q - 1)/n = 1: otherwise diag(kappa, 1) with
kappa generating K is an automorphism fixing alpha and a single point of Delta, and the upper bound is left open.

A lower bound s(X) >= 2 is certified by an algebraic automorphism phi_{u,e} that no combinatorial
isomorphism induces, which exists exactly when the characteristic is not a primitive root modulo n.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, Optional, Tuple

import numpy as np

from tarotools.tatra import cfg, log as tatra_log
from tarotools.tatra.autiso import AlgebraicAut, is_induced
from tarotools.tatra.coco import CoherentConfiguration, colors_between, is_regular, one_point_extension, restriction
from tarotools.tatra.common import VerificationError
from tarotools.tatra.field import is_primitive_root, power_subgroup, units
from tarotools.tatra.scheme import TatraScheme, build_tatra

log = logging.getLogger(__name__)


def _as_fiber(y: CoherentConfiguration, delta: Iterable[int]) -> int:
    points = tuple(sorted(int(p) for p in delta))
    try:
        return y.fibers.index(points)
    except ValueError:
        raise ValueError(f"Point set of size {len(points)} is not a fiber of the extension") from None


def verify_extension_fibers(x: TatraScheme, alpha: int, extension: Optional[CoherentConfiguration] = None) -> bool:
    """F(X_alpha) = {alpha s : s in S}"""
    y = extension if extension is not None else one_point_extension(x.config, alpha)
    expected = {x.config.neighbourhood(alpha, s) for s in range(x.rank)}
    return set(y.fibers) == expected


def verify_valency_one_links(y: CoherentConfiguration, delta: Iterable[int]) -> bool:
    """
    Every fiber other than `delta` is reached from `delta` by a relation of valency 1.

    Raises:
        ValueError: `delta` is not a fiber of `y`
    """
    i = _as_fiber(y, delta)
    for j in range(len(y.fibers)):
        if j != i and not any(y.valency(t) == 1 for t in colors_between(y, i, j)):
            log.debug(f"event=[missing_valency_one_link] fiber=[{i}] other=[{j}]")
            return False
    return True


def verify_delta_regular(y: CoherentConfiguration, delta: Iterable[int]) -> bool:
    return is_regular(restriction(y, delta))


def verify_extension_refines_cells(x: TatraScheme, y: CoherentConfiguration, alpha: int) -> bool:
    """Every relation of Y = X_alpha lies inside a single cell r ∩ (alpha s × alpha t) with r, s, t in S."""
    m = x.config.matrix.astype(np.int64)
    k = x.rank
    row = m[alpha]
    cells = (m * k + row[:, None]) * k + row[None, :]
    pairs = np.unique(np.stack([y.matrix.reshape(-1).astype(np.int64), cells.reshape(-1)]), axis=1)
    return pairs.shape[1] == y.rank


@dataclass(frozen=True)
class AlphaResult:
    alpha: int
    fiber_sizes: Tuple[int, ...]
    extension_rank: int
    fibers_ok: bool
    links_ok: bool
    delta_regular_ok: bool
    refines_ok: bool

    @property
    def passed(self) -> bool:
        return self.fibers_ok and self.links_ok and self.delta_regular_ok and self.refines_ok

    def to_json(self) -> Dict[str, Any]:
        return {'alpha': self.alpha, 'fiber_sizes': list(self.fiber_sizes), 'extension_rank': self.extension_rank,
                'fibers_ok': self.fibers_ok, 'links_ok': self.links_ok, 'delta_regular_ok': self.delta_regular_ok,
                'refines_ok': self.refines_ok}


def check_base_point(x: TatraScheme, alpha: int) -> AlphaResult:
    y = one_point_extension(x.config, alpha)
    delta = x.config.neighbourhood(alpha, x.s(0))
    fibers_ok = verify_extension_fibers(x, alpha, y)
    delta_is_fiber = delta in y.fibers
    result = AlphaResult(
        alpha=alpha,
        fiber_sizes=tuple(sorted(len(fiber) for fiber in y.fibers)),
        extension_rank=y.rank,
        fibers_ok=fibers_ok,
        links_ok=delta_is_fiber and verify_valency_one_links(y, delta),
        delta_regular_ok=delta_is_fiber and verify_delta_regular(y, delta),
        refines_ok=verify_extension_refines_cells(x, y, alpha))
    log.debug(f"event=[base_point_checked] scheme=[{x!r}] alpha=[{alpha}] passed=[{result.passed}]")
    return result


def sample_base_points(degree: int, sample_size: int) -> Tuple[int, ...]:
    """Evenly spaced points 0 = a_0 < ... <= degree - 1."""
    count = max(1, min(sample_size, degree))
    return tuple(sorted({int(round(v)) for v in np.linspace(0, degree - 1, num=count)}))


def noninduced_witness_unit(r: int, n: int) -> Optional[int]:
    """Smallest unit mod n outside <r mod n>, None when r is a primitive root modulo n."""
    powers = set(power_subgroup(r, n))
    return next((u for u in units(n) if u not in powers), None)


@dataclass(frozen=True)
class SeparabilityReport:
    q: int
    n: int
    m: int
    degree: int
    rank: int
    all_alpha: bool
    alphas: Tuple[int, ...]
    extension_fibers_ok: bool
    valency_one_links_ok: bool
    delta_regular_ok: bool
    extension_refines_cells_ok: bool
    s_upper_bound: Optional[int]
    primitive_root: bool
    noninduced_witness: Optional[AlgebraicAut]
    s_lower_bound: int
    fiber_sizes: Tuple[int, ...]
    per_alpha: Tuple[AlphaResult, ...] = field(default=(), repr=False)

    @property
    def separability(self) -> Optional[int]:
        """s(X) when both bounds meet."""
        return self.s_upper_bound if self.s_upper_bound == self.s_lower_bound else None

    def to_json(self, *, per_alpha: bool = False) -> Dict[str, Any]:
        payload = {
            'q': self.q,
            'n': self.n,
            'm': self.m,
            'degree': self.degree,
            'rank': self.rank,
            'all_alpha': self.all_alpha,
            'alphas_checked': len(self.alphas),
            'extension_fibers_ok': self.extension_fibers_ok,
            'valency_one_links_ok': self.valency_one_links_ok,
            'delta_regular_ok': self.delta_regular_ok,
            'extension_refines_cells_ok': self.extension_refines_cells_ok,
            's_upper_bound': self.s_upper_bound,
            's_lower_bound': self.s_lower_bound,
            's': self.separability,
            'primitive_root': self.primitive_root,
            'noninduced_witness': self.noninduced_witness.to_json() if self.noninduced_witness else None,
            'fiber_sizes': list(self.fiber_sizes),
        }
        if per_alpha:
            payload['per_alpha'] = [result.to_json() for result in self.per_alpha]
        return payload

    def summary(self) -> str:
        regular = _ok(self.delta_regular_ok) if self.m == 1 else ('yes' if self.delta_regular_ok else 'no')
        lines = [
            f"X({self.q},{self.n}): degree {self.degree}, rank {self.rank}",
            f"  base points checked: {len(self.alphas)}{' (all)' if self.all_alpha else ''}",
            f"  extension fibers {{alpha s}}: {_ok(self.extension_fibers_ok)}",
            f"  valency-1 links from Delta: {_ok(self.valency_one_links_ok)}",
            f"  Delta regular: {regular}",
            f"  char is primitive root mod n: {'yes' if self.primitive_root else 'no'}",
        ]
        if self.noninduced_witness:
            lines.append(f"  non-induced algebraic automorphism: u={self.noninduced_witness.u},"
                         f" g={self.noninduced_witness.g_shift}")
        if self.s_upper_bound is None:
            lines.append(f"  s(X) >= {self.s_lower_bound}, upper bound not certified (m = {self.m})")
        else:
            lines.append(f"  {self.s_lower_bound} <= s(X) <= {self.s_upper_bound}")
        return '\n'.join(lines)


def _ok(flag: bool) -> str:
    return 'ok' if flag else 'FAILED'


def _raise_first_failure(x: TatraScheme, results: Iterable[AlphaResult], *, delta_regular: bool):
    for result in results:
        checks = [('extension_fibers', result.fibers_ok), ('valency_one_links', result.links_ok)]
        if delta_regular:
            checks.append(('delta_regular', result.delta_regular_ok))
        checks.append(('extension_refines_cells', result.refines_ok))
        for check, passed in checks:
            if not passed:
                raise VerificationError(check, f"hypothesis failed for base point {result.alpha} of {x!r}",
                                        {'q': x.q, 'n': x.n, **result.to_json()})


@tatra_log.timing('separability_verdict', args_idx=(0, 1))
def separability_verdict(q: int, n: int, all_alpha: Optional[bool] = None) -> SeparabilityReport:
    """
    Check the extension hypotheses for every base point (or an evenly spaced sample above
    `cfg.all_alpha_max_degree`) and look for a non-induced algebraic automorphism.

    Raises:
        VerificationError: a hypothesis fails for some base point (regularity of Delta only when m = 1) or the
            witness is induced
    """
    x = build_tatra(q, n)
    if all_alpha is None:
        all_alpha = x.degree <= cfg.all_alpha_max_degree
    alphas = tuple(range(x.degree)) if all_alpha else sample_base_points(x.degree, cfg.alpha_sample_size)

    results = tuple(check_base_point(x, alpha) for alpha in alphas)
    _raise_first_failure(x, results, delta_regular=x.m == 1)
    sizes = sorted({result.fiber_sizes for result in results})
    if len(sizes) != 1:
        raise VerificationError('alpha_independence', "extension fiber sizes depend on the base point",
                                {'sizes': [list(s) for s in sizes]})

    r = x.field.char
    primitive_root = is_primitive_root(r, n)
    witness = None
    if not primitive_root:
        witness = AlgebraicAut(noninduced_witness_unit(r, n), 0, n)
        if is_induced(witness, x) is not None:
            raise VerificationError('noninduced_witness', "witness automorphism is induced", witness.to_json())

    report = SeparabilityReport(
        q=q, n=n, m=x.m, degree=x.degree, rank=x.rank, all_alpha=all_alpha, alphas=alphas,
        extension_fibers_ok=all(res.fibers_ok for res in results),
        valency_one_links_ok=all(res.links_ok for res in results),
        delta_regular_ok=all(res.delta_regular_ok for res in results),
        extension_refines_cells_ok=all(res.refines_ok for res in results),
        s_upper_bound=2 if all(res.passed for res in results) else None, primitive_root=primitive_root,
        noninduced_witness=witness, s_lower_bound=2 if witness else 1,
        fiber_sizes=results[0].fiber_sizes, per_alpha=results)
    log.info(f"event=[separability_verdict] q=[{q}] n=[{n}] alphas=[{len(alphas)}]"
             f" lower=[{report.s_lower_bound}] upper=[{report.s_upper_bound}]")
    return report
