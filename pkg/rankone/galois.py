# coding: utf-8
"""Finite-field helpers for the primitive-root and trace spacer families."""
from functools import lru_cache
from itertools import product
from typing import List, Tuple

import sympy
from sympy import sieve
from sympy.ntheory import n_order

from rankone.constant import MAX_FIELD_DEGREE
from rankone.errors import InvalidParam, NoGenerator, NotIrreducible, NotPrime
from rankone.logger import logger

X = sympy.Symbol('x')


def check_prime(p: int, what: str = 'p') -> int:
    p = int(p)
    if not sympy.isprime(p):
        raise NotPrime(f'{what} = {p} is not prime')
    return p


def nth_prime(j: int) -> int:
    """The j-th prime, 1-indexed (p(1) = 2), from sympy's deterministic sieve."""
    if j < 1:
        raise InvalidParam(f'prime index must be positive, got {j}')
    return int(sieve[j])


def primes_below(n: int) -> List[int]:
    return [int(p) for p in sieve.primerange(2, n)]


@lru_cache(maxsize=None)
def primitive_root(p: int) -> int:
    """Smallest generator of the multiplicative group of F_p."""
    p = check_prime(p)
    if p == 2:
        return 1
    return int(sympy.primitive_root(p))


def power_sequence(p: int, g: int, count: int, start: int = 0) -> List[int]:
    """Representatives in [1, p) of g^start, ..., g^(start+count-1) mod p."""
    value = pow(g, start, p)
    seq = []
    for _ in range(count):
        seq.append(value)
        value = value * g % p
    return seq


def difference_injective(p: int, g: int, window: int) -> bool:
    """Whether i -> {g^i} - {g^(i+window)} is injective on i = 0..p-window-1."""
    count = p - window
    if count <= 1:
        return True
    values = power_sequence(p, g, count + window)
    diffs = [values[i] - values[i + window] for i in range(count)]
    return len(set(diffs)) == count


def _certified_windows(p: int, g: int):
    """Windows whose injectivity follows from the multiplicative order of g.

    If g^w != 1 the residues g^i (1 - g^w) are distinct while i stays below
    ord(g), and distinct residues mod p force distinct integer differences.
    """
    order = n_order(g, p) if p > 2 else 1
    gw = 1
    for w in range(1, p):
        gw = gw * g % p
        count = p - w
        if count <= 1 or (gw != 1 and count <= order):
            yield w, True
        else:
            yield w, None


def validate_all_windows(p: int, g: int = None) -> bool:
    """Injectivity of the difference map for every window 0 < w < p."""
    p = check_prime(p)
    g = primitive_root(p) if g is None else g
    for w, certified in _certified_windows(p, g):
        if certified is None and not difference_injective(p, g, w):
            logger.debug(f'difference map not injective for p={p}, g={g}, window={w}')
            return False
    return True


def validate_injectivity(schedule, j: int, window: int) -> bool:
    """Injectivity check for stage j of a Galois primitive-root schedule."""
    r = schedule.stage(j).r
    if not 0 < window < r:
        raise InvalidParam(f'window must satisfy 0 < p < r_j = {r}, got {window}')
    return difference_injective(r, primitive_root(r), window)


class GaloisField(object):
    """F_{b^n} as polynomials over F_b modulo a monic irreducible of degree n.

    Elements are tuples of n coefficients, lowest degree first.
    """

    def __init__(self, b: int, n: int, modulus: Tuple[int, ...] = None):
        self.b = check_prime(b, 'b')
        if not 1 <= n <= MAX_FIELD_DEGREE:
            raise InvalidParam(f'field degree must lie in [1, {MAX_FIELD_DEGREE}], got {n}')
        self.n = int(n)
        self.order = self.b ** self.n

        if modulus is None:
            modulus = self.find_irreducible(self.b, self.n)
        elif not self.is_irreducible(self.b, modulus):
            raise NotIrreducible(f'{modulus} is not irreducible over F_{self.b}')
        # low-first coefficients of x^n - modulus, used to reduce x^n
        self.modulus = tuple(int(c) % self.b for c in modulus)
        self._reduce = tuple((-c) % self.b for c in self.modulus[:-1])

        self.generator = self.find_generator()
        self._basis_trace = tuple(self.trace_full(self.monomial(k)) for k in range(self.n))

    @staticmethod
    def is_irreducible(b: int, coefficients) -> bool:
        """``coefficients`` lowest degree first, leading coefficient last."""
        poly = sympy.Poly(list(reversed([int(c) for c in coefficients])), X, modulus=b)
        return poly.degree() >= 1 and poly.is_irreducible

    @classmethod
    def find_irreducible(cls, b: int, n: int) -> Tuple[int, ...]:
        # exhaustive search over monic polynomials, smallest lower coefficients first
        for lower in product(range(b), repeat=n):
            candidate = tuple(reversed(lower)) + (1,)
            if n > 1 and candidate[0] == 0:
                continue
            if cls.is_irreducible(b, candidate):
                logger.debug(f'F_{b}^{n}: using modulus {candidate}')
                return candidate
        raise NotIrreducible(f'no irreducible polynomial of degree {n} over F_{b}')

    @property
    def one(self):
        return (1,) + (0,) * (self.n - 1)

    def monomial(self, k: int):
        return tuple(1 if i == k else 0 for i in range(self.n))

    def add(self, u, v):
        return tuple((a + c) % self.b for a, c in zip(u, v))

    def mul(self, u, v):
        prod = [0] * (2 * self.n - 1)
        for i, a in enumerate(u):
            if a:
                for k, c in enumerate(v):
                    prod[i + k] += a * c
        for d in range(2 * self.n - 2, self.n - 1, -1):
            top = prod[d] % self.b
            if top:
                for i, c in enumerate(self._reduce):
                    prod[d - self.n + i] += top * c
            prod[d] = 0
        return tuple(c % self.b for c in prod[:self.n])

    def pow(self, u, e: int):
        result, base = self.one, u
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def find_generator(self):
        group = self.order - 1
        factors = sympy.factorint(group) if group > 1 else {}
        for lower in product(range(self.b), repeat=self.n):
            candidate = tuple(reversed(lower))
            if not any(candidate):
                continue
            if all(self.pow(candidate, group // f) != self.one for f in factors):
                return candidate
        raise NoGenerator(f'no generator found for F_{self.b}^{self.n}')

    def trace_full(self, u) -> int:
        """tr(u) = u + u^b + ... + u^(b^(n-1)), computed in the field."""
        total = u
        term = u
        for _ in range(1, self.n):
            term = self.pow(term, self.b)
            total = self.add(total, term)
        if any(total[1:]):
            raise NoGenerator(f'trace of {u} left the prime field: {total}')
        return total[0]

    def trace(self, u) -> int:
        return sum(a * t for a, t in zip(u, self._basis_trace)) % self.b

    def powers(self, count: int, start: int = 0):
        value = self.pow(self.generator, start)
        for _ in range(count):
            yield value
            value = self.mul(value, self.generator)


@lru_cache(maxsize=64)
def galois_field(b: int, n: int) -> GaloisField:
    return GaloisField(b, n)


def trace_sequence(b: int, n: int, count: int, start: int = 0) -> List[int]:
    """tr(q^i) for i = start..start+count-1, q the field's generator."""
    field = galois_field(b, n)
    return [field.trace(u) for u in field.powers(count, start)]
