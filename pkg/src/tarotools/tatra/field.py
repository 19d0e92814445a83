"""
Tabulated arithmetic of the finite field GF(r^d) together with the coset data of Tatra schemes:
the index-n subgroup K of the multiplicative group, the cyclic quotient C = F*/K and the action of the
Frobenius automorphisms on C.

Elements are the integers 0..q-1; the base-r digits of an element are the coefficients of its polynomial
representative (digit i belongs to x^i). Multiplication goes through discrete-log tables, addition through
Zech logarithms, so every operation is a couple of table lookups.
"""

import itertools
import logging
import math
import dataclasses
from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple, List, Iterable, Optional

from tarotools.tatra import cfg
from tarotools.tatra.common import InadmissibleParametersError, SizeLimitExceededError, VerificationError

log = logging.getLogger(__name__)


def is_prime(k: int) -> bool:
    if k < 2:
        return False
    if k % 2 == 0:
        return k == 2
    return all(k % p for p in range(3, math.isqrt(k) + 1, 2))


def prime_factors(k: int) -> List[int]:
    """Distinct prime factors of `k` in increasing order (trial division)."""
    if k < 1:
        raise ValueError(f"Cannot factor non-positive integer {k}")
    factors = []
    p = 2
    while p * p <= k:
        if k % p == 0:
            factors.append(p)
            while k % p == 0:
                k //= p
        p += 1
    if k > 1:
        factors.append(k)
    return factors


def prime_power(q: int) -> Tuple[int, int]:
    """
    Decompose a prime power.

    Returns:
        (r, d) with r prime and q = r^d

    Raises:
        InadmissibleParametersError: `q` is not a prime power
    """
    if q < 2:
        raise InadmissibleParametersError(f"q={q} is not a prime power")
    r = prime_factors(q)[0]
    d = 0
    rest = q
    while rest % r == 0:
        rest //= r
        d += 1
    if rest != 1:
        raise InadmissibleParametersError(f"q={q} is not a prime power")
    return r, d


def euler_phi(n: int) -> int:
    if n < 1:
        raise ValueError(f"Euler function is defined for positive integers only, got {n}")
    result = n
    for p in prime_factors(n):
        result -= result // p
    return result


def multiplicative_order(a: int, n: int) -> int:
    """Order of the unit `a` modulo `n`; 1 for n = 1."""
    if n < 1:
        raise ValueError(f"Modulus must be positive, got {n}")
    if n == 1:
        return 1
    if math.gcd(a, n) != 1:
        raise ValueError(f"{a} is not a unit modulo {n}")
    a %= n
    order, x = 1, a
    while x != 1:
        x = (x * a) % n
        order += 1
    return order


def units(n: int) -> Tuple[int, ...]:
    """Residues coprime to `n`, i.e. Aut(C) for the cyclic group C of order n. Units mod 1 are {0}."""
    return tuple(u for u in range(n) if math.gcd(u, n) == 1)


def power_subgroup(r: int, n: int) -> Tuple[int, ...]:
    """The cyclic subgroup of units mod `n` generated by `r`, sorted."""
    return tuple(sorted({pow(r, i, n) for i in range(multiplicative_order(r, n))}))


def is_primitive_root(r: int, n: int) -> bool:
    """
    True iff `r` generates the unit group modulo `n`. Every integer counts as a primitive root modulo 1 and 2.

    Raises:
        ValueError: gcd(r, n) != 1
    """
    if n < 1:
        raise ValueError(f"Modulus must be positive, got {n}")
    if n <= 2:
        return True
    if math.gcd(r, n) != 1:
        raise ValueError(f"{r} is not a unit modulo {n}")
    return multiplicative_order(r, n) == euler_phi(n)


@dataclass(frozen=True, eq=False)
class FiniteField:
    """
    GF(r^d) over a fixed primitive modulus. The primitive element is the root x of the modulus
    (for d = 1 the modulus is x - g with g the smallest primitive root of r).

    Attributes:
        char: characteristic r
        degree: extension degree d
        modulus: coefficients of the monic modulus, low-to-high degree (length d + 1)
        exp_table: exp_table[k] = primitive_element^k for k in 0..q-2
        log_table: inverse of exp_table, log_table[0] = -1
        zech_table: zech_table[k] = log(1 + exp(k)), -1 when the sum is zero
    """

    char: int
    degree: int
    modulus: Tuple[int, ...]
    exp_table: Tuple[int, ...] = dataclasses.field(repr=False)
    log_table: Tuple[int, ...] = dataclasses.field(repr=False)
    zech_table: Tuple[int, ...] = dataclasses.field(repr=False)

    @property
    def order(self) -> int:
        return self.char ** self.degree

    @property
    def unit_order(self) -> int:
        return self.order - 1

    @property
    def primitive_element(self) -> int:
        return self.exp_table[1 % self.unit_order]

    @property
    def minus_one(self) -> int:
        return self.exp_table[self.unit_order // 2] if self.char != 2 else 1

    def elements(self) -> range:
        return range(self.order)

    def nonzero(self) -> range:
        return range(1, self.order)

    def log(self, x: int) -> int:
        if x == 0:
            raise ValueError("Zero has no discrete logarithm")
        return self.log_table[x]

    def exp(self, k: int) -> int:
        return self.exp_table[k % self.unit_order]

    def add(self, a: int, b: int) -> int:
        if a == 0:
            return b
        if b == 0:
            return a
        la, lb = self.log_table[a], self.log_table[b]
        z = self.zech_table[(lb - la) % self.unit_order]
        if z < 0:
            return 0
        return self.exp_table[(la + z) % self.unit_order]

    def neg(self, a: int) -> int:
        return self.mul(a, self.minus_one)

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self.exp_table[(self.log_table[a] + self.log_table[b]) % self.unit_order]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("Zero is not invertible")
        return self.exp_table[-self.log_table[a] % self.unit_order]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def power(self, a: int, k: int) -> int:
        if a == 0:
            if k < 0:
                raise ZeroDivisionError("Zero is not invertible")
            return 0 if k else 1
        return self.exp_table[(self.log_table[a] * k) % self.unit_order]

    def frobenius(self, a: int, i: int = 1) -> int:
        """x -> x^(r^i)"""
        if a == 0:
            return 0
        return self.exp_table[(self.log_table[a] * pow(self.char, i % self.degree)) % self.unit_order]

    def det(self, u: Tuple[int, int], v: Tuple[int, int]) -> int:
        """Determinant of the 2x2 matrix with columns u, v."""
        return self.sub(self.mul(u[0], v[1]), self.mul(u[1], v[0]))

    def digits(self, a: int) -> List[int]:
        return _digits(a, self.char, self.degree)

    def __repr__(self):
        return f"GF({self.char}^{self.degree})"


def _digits(a: int, r: int, d: int) -> List[int]:
    out = []
    for _ in range(d):
        a, digit = divmod(a, r)
        out.append(digit)
    return out


def _encode(digits: Iterable[int], r: int) -> int:
    value = 0
    for digit in reversed(list(digits)):
        value = value * r + digit
    return value


def _times_root(a: int, r: int, modulus: Tuple[int, ...]) -> int:
    """Multiply by the root x of the monic `modulus`."""
    d = len(modulus) - 1
    digits = _digits(a, r, d)
    top = digits[-1]
    shifted = [0] + digits[:-1]
    return _encode(((shifted[i] - top * modulus[i]) % r for i in range(d)), r)


def _root_powers(r: int, modulus: Tuple[int, ...]) -> Optional[List[int]]:
    """Powers 1, x, x^2, ... of the root of `modulus` if x has order r^d - 1, otherwise None."""
    q = r ** (len(modulus) - 1)
    powers = [1]
    value = _times_root(1, r, modulus)
    while value != 1:
        if len(powers) >= q - 1 or value == 0:
            return None
        powers.append(value)
        value = _times_root(value, r, modulus)
    return powers if len(powers) == q - 1 else None


def _smallest_primitive_root(r: int) -> int:
    return next(g for g in range(1, r) if multiplicative_order(g, r) == r - 1)


def _primitive_modulus(r: int, d: int) -> Tuple[Tuple[int, ...], List[int]]:
    if d == 1:
        g = _smallest_primitive_root(r)
        modulus = ((-g) % r, 1)
        return modulus, _root_powers(r, modulus)

    # Lexicographic over the coefficients (f_0, ..., f_{d-1}), low degree first
    for low in itertools.product(range(r), repeat=d):
        if low[0] == 0:
            continue
        modulus = tuple(low) + (1,)
        powers = _root_powers(r, modulus)
        if powers is not None:
            return modulus, powers

    raise InadmissibleParametersError(f"No primitive polynomial of degree {d} over GF({r})")  # unreachable


@lru_cache(maxsize=32)
def _build_field(r: int, d: int) -> FiniteField:
    q = r ** d
    modulus, exp_table = _primitive_modulus(r, d)

    log_table = [-1] * q
    for k, value in enumerate(exp_table):
        log_table[value] = k

    def add_one(value):
        return value - value % r + (value % r + 1) % r

    zech_table = []
    for value in exp_table:
        shifted = add_one(value)
        zech_table.append(log_table[shifted] if shifted else -1)

    log.debug(f"event=[field_built] q=[{q}] modulus=[{modulus}]")
    return FiniteField(r, d, modulus, tuple(exp_table), tuple(log_table), tuple(zech_table))


def make_field(r: int, d: int) -> FiniteField:
    """
    Build GF(r^d) over the lexicographically smallest monic primitive polynomial (d > 1) or with the smallest
    primitive root as primitive element (d = 1).

    Raises:
        InadmissibleParametersError: `r` not a prime or `d` < 1
        SizeLimitExceededError: r^d exceeds `cfg.field_max_order`
    """
    if not is_prime(r):
        raise InadmissibleParametersError(f"Characteristic r={r} is not a prime")
    if d < 1:
        raise InadmissibleParametersError(f"Degree d={d} must be at least 1")
    if r ** d > cfg.field_max_order:
        raise SizeLimitExceededError('field order', r ** d, cfg.field_max_order)
    return _build_field(r, d)


def field_of_order(q: int) -> FiniteField:
    return make_field(*prime_power(q))


def verify_field(f: FiniteField) -> None:
    """
    Exhaustive check of the tables against schoolbook polynomial arithmetic modulo `f.modulus`,
    plus the Frobenius properties. Quadratic in the field order.

    Raises:
        VerificationError: with the offending elements as witness
    """
    r, d, q = f.char, f.degree, f.order

    if sorted(f.exp_table) != list(range(1, q)):
        raise VerificationError('field_exp_bijection', "exp table is not a bijection onto F*")
    for x in f.nonzero():
        if f.exp(f.log(x)) != x:
            raise VerificationError('field_exp_log', "exp(log(x)) != x", {'x': x})

    def poly_mul(a, b):
        product = [0] * (2 * d - 1)
        for i, ai in enumerate(_digits(a, r, d)):
            for j, bj in enumerate(_digits(b, r, d)):
                product[i + j] = (product[i + j] + ai * bj) % r
        for k in range(2 * d - 2, d - 1, -1):  # reduce x^k with x^d = -(f_0 + ... + f_{d-1} x^{d-1})
            top = product[k]
            if top:
                product[k] = 0
                for i in range(d):
                    product[k - d + i] = (product[k - d + i] - top * f.modulus[i]) % r
        return _encode(product[:d], r)

    for a in f.elements():
        da = _digits(a, r, d)
        for b in f.elements():
            expected_sum = _encode(((x + y) % r for x, y in zip(da, _digits(b, r, d))), r)
            if f.add(a, b) != expected_sum:
                raise VerificationError('field_add', "table addition disagrees with digit addition", {'a': a, 'b': b})
            if f.mul(a, b) != poly_mul(a, b):
                raise VerificationError('field_mul', "table multiplication disagrees with polynomial product",
                                        {'a': a, 'b': b})
            if f.frobenius(f.add(a, b)) != f.add(f.frobenius(a), f.frobenius(b)):
                raise VerificationError('frobenius_additive', "Frobenius is not additive", {'a': a, 'b': b})
            if f.frobenius(f.mul(a, b)) != f.mul(f.frobenius(a), f.frobenius(b)):
                raise VerificationError('frobenius_multiplicative', "Frobenius is not multiplicative",
                                        {'a': a, 'b': b})
        if f.add(a, f.neg(a)) != 0:
            raise VerificationError('field_neg', "a + (-a) != 0", {'a': a})

    for a in range(r):  # prime subfield
        if f.frobenius(a) != a:
            raise VerificationError('frobenius_prime_field', "Frobenius moves an element of GF(r)", {'a': a})

    order, x = 1, f.primitive_element
    while x != 1:
        x = f.mul(x, f.primitive_element)
        order += 1
    if order != q - 1:
        raise VerificationError('primitive_element', "primitive element has wrong order", {'order': order})


@dataclass(frozen=True)
class CosetStructure:
    """
    K = the index-n subgroup of F*, C = F*/K written additively: coset g is {x : log(x) = g mod n}.
    The identity coset e = K is 0.
    """

    field: FiniteField = dataclasses.field(repr=False)
    n: int
    m: int
    identity_coset: int = 0

    @property
    def q(self) -> int:
        return self.field.order

    def coset_of(self, x: int) -> int:
        return self.field.log(x) % self.n

    def members(self, g: int) -> Tuple[int, ...]:
        """The m field elements of coset `g`."""
        return tuple(self.field.exp(g % self.n + self.n * j) for j in range(self.m))

    @property
    def kernel(self) -> Tuple[int, ...]:
        """The subgroup K itself."""
        return self.members(self.identity_coset)

    @property
    def kappa(self) -> int:
        """Generator of K."""
        return self.field.exp(self.n)

    def representative(self, g: int) -> int:
        return self.field.exp(g % self.n)


def coset_structure(f: FiniteField, n: int) -> CosetStructure:
    """
    Raises:
        InadmissibleParametersError: n does not divide q-1, or q(q-1)/n is odd
    """
    q = f.order
    if n < 1 or (q - 1) % n:
        raise InadmissibleParametersError(f"n={n} does not divide q-1={q - 1}")
    if (q * (q - 1) // n) % 2:
        raise InadmissibleParametersError(f"q(q-1)/n odd for q={q}, n={n}")

    cosets = CosetStructure(f, n, (q - 1) // n)
    if q % 2 and cosets.coset_of(f.minus_one) != cosets.identity_coset:
        raise VerificationError('minus_one_in_kernel', "-1 is not in K", {'q': q, 'n': n})
    return cosets


@dataclass(frozen=True)
class FrobeniusData:
    """
    Sigma = <Frob> of order d acting on C. Frob^i maps coset g to g * r^i (additive C), so its action is
    `action_on_C[i]` = r^i mod n. Sigma_0 is the kernel of this action, of order d0 = d / ord_n(r).
    """

    d: int
    d0: int
    action_on_C: Tuple[int, ...]

    @property
    def order_on_C(self) -> int:
        """ord_n(r), the order of the image of Sigma in Aut(C)."""
        return self.d // self.d0

    @property
    def kernel_powers(self) -> Tuple[int, ...]:
        """Exponents i with Frob^i in Sigma_0."""
        return tuple(i for i, u in enumerate(self.action_on_C) if u == self.action_on_C[0])

    def exponent_of(self, u: int) -> Optional[int]:
        """Smallest i with r^i = u mod n or None when u is no power of r."""
        return next((i for i, value in enumerate(self.action_on_C) if value == u), None)


def frobenius_data(f: FiniteField, cosets: CosetStructure) -> FrobeniusData:
    if (cosets.field.char, cosets.field.degree) != (f.char, f.degree):
        raise ValueError(f"Coset structure of {cosets.field!r} does not belong to {f!r}")

    n = cosets.n
    action = tuple(pow(f.char, i, n) for i in range(f.degree))
    d0 = sum(1 for u in action if u == 1 % n)
    data = FrobeniusData(f.degree, d0, action)
    if d0 * multiplicative_order(f.char, n) != f.degree:
        raise VerificationError('frobenius_kernel', "d0 * ord_n(r) != d", {'d': f.degree, 'd0': d0, 'n': n})
    return data
