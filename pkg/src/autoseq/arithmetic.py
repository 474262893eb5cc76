"""Valuations, factorization and exact Dirichlet characters.

Characters are stored as integer numerators over one common denominator
``D``: ``chi(n) = exp(2*pi*i*num[n]/D)``, with ``num[n] = -1`` marking the
residues that share a factor with the modulus.  Tables are numpy arrays so
that whole families of characters can be split and compared at once.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import NotADivisor, NotCoprime, NotDivisible
from .values import ZERO, Value


def nu(p: int, n: int) -> int:
    """p-adic valuation of n >= 1."""
    if n <= 0:
        raise ValueError("valuation needs n >= 1")
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


def strip(p: int, n: int) -> tuple[int, int]:
    """``(nu_p(n), n / p**nu_p(n))``."""
    e = nu(p, n)
    return e, n // p**e


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for q in small:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@lru_cache(maxsize=4096)
def _factor_tuple(n: int) -> tuple:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1 if d == 2 else 2
    if n > 1:
        out.append((n, 1))
    return tuple(out)


def factorize(n: int) -> dict[int, int]:
    """Prime factorization ``{p: e}`` in ascending order of p."""
    if n < 1:
        raise ValueError("factorize needs n >= 1")
    return dict(_factor_tuple(n))


def prime_factors(n: int) -> list[int]:
    return [p for p, _ in _factor_tuple(n)]


def radical(n: int) -> int:
    return math.prod(prime_factors(n))


def prime_power_base(n: int) -> tuple[int, int] | None:
    """``(p, e)`` when n = p**e with e >= 1, else None."""
    f = _factor_tuple(n) if n > 1 else ()
    return f[0] if len(f) == 1 else None


def euler_phi(n: int) -> int:
    out = n
    for p in prime_factors(n):
        out = out // p * (p - 1)
    return out


def crt(residues, moduli) -> int:
    """Smallest non-negative solution of pairwise coprime congruences."""
    x, m = 0, 1
    for r, k in zip(residues, moduli):
        if math.gcd(m, k) != 1:
            raise NotCoprime(f"moduli {m} and {k} are not coprime", witness=(m, k))
        t = ((r - x) * pow(m, -1, k)) % k if k > 1 else 0
        x, m = x + m * t, m * k
    return x % m


@lru_cache(maxsize=None)
def primitive_root(p: int, e: int = 1) -> int:
    """Smallest generator of (Z/p^e)^*; p must be odd, or p^e in {2, 4}."""
    if p == 2 and e > 2:
        raise ValueError("(Z/2^e)^* is not cyclic for e >= 3")
    q = p**e
    if q == 2:
        return 1
    phi = euler_phi(q)
    divisors = prime_factors(phi)
    for g in range(2, q):
        if math.gcd(g, q) == 1 and all(pow(g, phi // r, q) != 1 for r in divisors):
            return g
    raise AssertionError("no primitive root found")


# ---------------------------------------------------------------------------
# group structure


@lru_cache(maxsize=None)
def _prime_power_components(p: int, e: int) -> tuple:
    q = p**e
    if p == 2 and e >= 3:
        # (Z/2^e)^* = <-1> x <5>
        log_sign = np.full(q, -1, dtype=np.int64)
        log_five = np.full(q, -1, dtype=np.int64)
        x = 1
        for j in range(q // 4):
            log_sign[x], log_five[x] = 0, j
            log_sign[(-x) % q], log_five[(-x) % q] = 1, j
            x = x * 5 % q
        return ((q, q - 1, 2, log_sign), (q, 5, q // 4, log_five))
    if q == 2:
        return ()
    g = primitive_root(p, e)
    order = euler_phi(q)
    log = np.full(q, -1, dtype=np.int64)
    x = 1
    for j in range(order):
        log[x] = j
        x = x * g % q
    return ((q, g, order, log),)


@lru_cache(maxsize=None)
def _components(k: int) -> tuple:
    """Per generator: (modulus q, generator g, order, log table mod q)."""
    comps = ()
    for p, e in _factor_tuple(k) if k > 1 else ():
        comps += _prime_power_components(p, e)
    return comps


@lru_cache(maxsize=None)
def character_table(k: int) -> tuple[np.ndarray, int]:
    """All characters mod k as an integer matrix (phi(k) x k) over denominator D.

    Rows follow ``itertools.product`` over generator exponents, so row 0 is
    the principal character.  Entries are -1 where gcd(n, k) > 1.
    """
    comps = _components(k)
    n = np.arange(k, dtype=np.int64)
    coprime = np.gcd(n, k) == 1
    D = 1
    for _, _, order, _ in comps:
        D = math.lcm(D, order)
    logs = np.zeros((len(comps), k), dtype=np.int64)
    for i, (q, _, order, log) in enumerate(comps):
        logs[i] = log[n % q] * (D // order)
    if comps:
        exps = np.array(list(itertools.product(*[range(c[2]) for c in comps])), dtype=np.int64)
        table = (exps @ logs) % D
    else:
        table = np.zeros((1, k), dtype=np.int64)
    table[:, ~coprime] = -1
    table.setflags(write=False)
    return table, D


class DirichletCharacter:
    """Exact character mod ``modulus``; equality is by value table."""

    __slots__ = ("modulus", "num", "denominator", "_values")

    def __init__(self, modulus: int, num, denominator: int, check: bool = True):
        num = np.asarray(num, dtype=np.int64)
        if modulus < 1 or num.shape != (modulus,):
            raise ValueError("table must list one entry per residue")
        live = num >= 0
        g = math.gcd(denominator, *[int(x) for x in np.unique(num[live])])
        if g > 1:
            num = np.where(live, num // g, -1)
            denominator //= g
        num = np.where(live, num % denominator, -1)
        num.setflags(write=False)
        self.modulus = modulus
        self.num = num
        self.denominator = denominator
        self._values = None
        if check:
            self._check()

    def _check(self):
        k, D, num = self.modulus, self.denominator, self.num
        n = np.arange(k)
        expect = np.gcd(n, k) == 1
        if not np.array_equal(num >= 0, expect):
            raise ValueError("a character vanishes exactly off the units")
        if num[1 % k] != 0:
            raise ValueError("chi(1) must be 1")
        units = n[expect]
        prod_idx = np.outer(units, units) % k
        lhs = num[prod_idx]
        rhs = (num[units][:, None] + num[units][None, :]) % D
        if not np.array_equal(lhs, rhs):
            i, j = np.argwhere(lhs != rhs)[0]
            raise ValueError(f"not multiplicative at ({units[i]}, {units[j]})")

    @classmethod
    def from_phases(cls, modulus: int, phases: dict) -> "DirichletCharacter":
        fr = {int(r) % modulus: Fraction(v) % 1 for r, v in phases.items()}
        D = math.lcm(1, *[f.denominator for f in fr.values()])
        num = [-1] * modulus
        for r, f in fr.items():
            num[r] = int(f * D)
        return cls(modulus, num, D)

    def __call__(self, n: int) -> Value:
        return self.values_table()[n % self.modulus]

    def values_table(self) -> tuple:
        if self._values is None:
            D = self.denominator
            self._values = tuple(ZERO if x < 0 else Value(1, Fraction(int(x), D))
                                 for x in self.num.tolist())
        return self._values

    def phase(self, n: int) -> Fraction | None:
        x = int(self.num[n % self.modulus])
        return None if x < 0 else Fraction(x, self.denominator)

    @property
    def order(self) -> int:
        return self.denominator

    @property
    def is_principal(self) -> bool:
        return self.denominator == 1

    def table(self) -> dict[int, Fraction]:
        return {r: Fraction(int(x), self.denominator)
                for r, x in enumerate(self.num.tolist()) if x >= 0}

    def __eq__(self, other):
        if not isinstance(other, DirichletCharacter):
            return NotImplemented
        return (self.modulus == other.modulus and self.denominator == other.denominator
                and np.array_equal(self.num, other.num))

    def __hash__(self):
        return hash((self.modulus, self.denominator, self.num.tobytes()))

    def __mul__(self, other: "DirichletCharacter") -> "DirichletCharacter":
        if other.modulus != self.modulus:
            raise ValueError("multiply characters of the same modulus")
        D = math.lcm(self.denominator, other.denominator)
        a = self.num * (D // self.denominator)
        b = other.num * (D // other.denominator)
        return DirichletCharacter(self.modulus, np.where(self.num >= 0, a + b, -1), D,
                                  check=False)

    def to_json(self) -> dict:
        return {"modulus": self.modulus,
                "phases": {str(r): f"{f.numerator}/{f.denominator}"
                           for r, f in self.table().items()}}

    @classmethod
    def from_json(cls, doc) -> "DirichletCharacter":
        return cls.from_phases(int(doc["modulus"]), doc["phases"])

    def index(self) -> int:
        """Position in the ``characters_mod`` enumeration."""
        return characters_mod(self.modulus).index(self)

    def __repr__(self):
        return f"DirichletCharacter(mod {self.modulus}, order {self.order})"


@lru_cache(maxsize=None)
def _characters(k: int) -> tuple:
    table, D = character_table(k)
    return tuple(DirichletCharacter(k, row, D, check=False) for row in table)


def characters_mod(k: int) -> list[DirichletCharacter]:
    """The phi(k) characters mod k, principal first, in a fixed order."""
    if k < 1:
        raise ValueError("modulus must be >= 1")
    return list(_characters(k))


def principal(k: int) -> DirichletCharacter:
    return _characters(k)[0]


def induce(eta: DirichletCharacter, k: int) -> DirichletCharacter:
    """Lift ``eta`` mod d to modulus k by multiplying with the principal character."""
    d = eta.modulus
    if k % d:
        raise NotDivisible(f"{d} does not divide {k}", witness=(d, k))
    n = np.arange(k)
    num = np.where(np.gcd(n, k) == 1, eta.num[n % d], -1)
    return DirichletCharacter(k, num, eta.denominator, check=False)


def _split_indices(k1: int, k2: int) -> tuple[np.ndarray, np.ndarray]:
    """Residues mod k1*k2 congruent to (r, 1) and (1, r) respectively."""
    if math.gcd(k1, k2) != 1:
        raise NotCoprime(f"{k1} and {k2} are not coprime", witness=(k1, k2))
    k = k1 * k2
    e1 = crt([1, 0], [k1, k2])  # 1 mod k1, 0 mod k2
    e2 = crt([0, 1], [k1, k2])
    r1 = np.arange(k1)
    r2 = np.arange(k2)
    return (r1 * e1 + e2) % k, (r2 * e2 + e1) % k


def crt_split(chi: DirichletCharacter, k1: int, k2: int):
    """Factor chi mod k1*k2 as chi_{k1} * chi_{k2}."""
    if chi.modulus != k1 * k2:
        raise ValueError(f"character modulus {chi.modulus} != {k1}*{k2}")
    i1, i2 = _split_indices(k1, k2)
    return (DirichletCharacter(k1, chi.num[i1], chi.denominator, check=False),
            DirichletCharacter(k2, chi.num[i2], chi.denominator, check=False))


def crt_split_table(table: np.ndarray, k1: int, k2: int) -> tuple[np.ndarray, np.ndarray]:
    """Row-wise ``crt_split`` of a character matrix (same denominator)."""
    i1, i2 = _split_indices(k1, k2)
    return table[:, i1], table[:, i2]


def _modulus_of(dense_or_modulus) -> int:
    return dense_or_modulus.modulus if isinstance(dense_or_modulus, DenseData) else int(dense_or_modulus)


def pbar(p: int, dense_or_modulus) -> int:
    """Residue mod M that is 1 mod p^alpha and p mod M/p^alpha."""
    M = _modulus_of(dense_or_modulus)
    if M % p:
        raise NotADivisor(f"{p} does not divide {M}", witness=(p, M))
    q = p ** nu(p, M)
    rest = M // q
    return crt([1, p % rest], [q, rest])


@dataclass(frozen=True)
class DenseData:
    """Coprime ``h``, ``lam`` and a character mod ``h*lam``."""

    h: int
    lam: int
    chi: DirichletCharacter
    _locals: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if math.gcd(self.h, self.lam) != 1:
            raise NotCoprime(f"h={self.h} and lambda={self.lam} are not coprime",
                             witness=(self.h, self.lam))
        if self.chi.modulus != self.h * self.lam:
            raise ValueError("character modulus must equal h*lambda")

    @property
    def modulus(self) -> int:
        return self.h * self.lam

    @property
    def primes(self) -> list[int]:
        return prime_factors(self.modulus) if self.modulus > 1 else []

    def alpha(self, p: int) -> int:
        return nu(p, self.modulus)

    def _split(self, p: int):
        if p not in self._locals:
            if self.modulus % p:
                raise NotADivisor(f"{p} does not divide {self.modulus}", witness=p)
            q = p ** self.alpha(p)
            self._locals[p] = crt_split(self.chi, q, self.modulus // q)
        return self._locals[p]

    def local(self, p: int) -> DirichletCharacter:
        """chi_{p^alpha(p)}."""
        return self._split(p)[0]

    def complement(self, p: int) -> DirichletCharacter:
        """chi_{M / p^alpha(p)}."""
        return self._split(p)[1]

    def pbar(self, p: int) -> int:
        return pbar(p, self.modulus)

    def in_C(self, n: int) -> bool:
        return math.gcd(n, self.modulus) == 1

    def to_json(self) -> dict:
        return {"h": self.h, "lambda": self.lam, "modulus": self.modulus,
                "character_index": self.chi.index(), "character": self.chi.to_json()}


__all__ = [
    "nu", "strip", "is_prime", "factorize", "prime_factors", "radical", "prime_power_base",
    "euler_phi", "crt", "primitive_root", "character_table", "DirichletCharacter",
    "characters_mod", "principal", "induce", "crt_split", "crt_split_table", "pbar",
    "DenseData",
]
