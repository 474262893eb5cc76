"""Exact scalars: zero, or a positive rational times a root of unity.

``Value`` instances are interned, so equality is identity and products of
values from a small alphabet are cached.  ``CyclotomicNumber`` holds exact
sums of such values (elements of a cyclotomic field) and is used wherever a
sum has to be compared exactly, e.g. character sums and means.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

import mpmath

__all__ = [
    "Value",
    "ZERO",
    "ONE",
    "MINUS_ONE",
    "I",
    "root_of_unity",
    "value_doc",
    "CyclotomicNumber",
    "cyclotomic_polynomial",
    "format_fraction",
    "parse_fraction",
]

DIGITS = 60


def format_fraction(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def parse_fraction(text) -> Fraction:
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    return Fraction(str(text).strip())


class Value:
    """Zero, or ``scale * exp(2*pi*i*phase)`` with rational scale > 0 and phase in [0, 1)."""

    __slots__ = ("scale", "phase", "_hash")
    _pool: dict = {}
    _products: dict = {}

    def __new__(cls, scale=1, phase=0):
        scale = Fraction(scale)
        phase = Fraction(phase) % 1
        if scale < 0:
            raise ValueError("scale must be non-negative; use Value.of for signed numbers")
        if scale == 0:
            phase = Fraction(0)
        key = (scale, phase)
        obj = cls._pool.get(key)
        if obj is None:
            obj = object.__new__(cls)
            object.__setattr__(obj, "scale", scale)
            object.__setattr__(obj, "phase", phase)
            object.__setattr__(obj, "_hash", hash(key))
            cls._pool[key] = obj
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("Value is immutable")

    def __reduce__(self):
        return (Value, (self.scale, self.phase))

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if isinstance(other, Value):
            return self is other
        if isinstance(other, (int, Fraction)):
            return self is Value.of(other)
        return NotImplemented

    def __bool__(self):
        return self.scale != 0

    @property
    def is_zero(self) -> bool:
        return self.scale == 0

    @classmethod
    def of(cls, x) -> "Value":
        """Coerce ints, Fractions, strings, JSON objects and exact complex units."""
        if isinstance(x, Value):
            return x
        if isinstance(x, bool):
            raise TypeError("booleans are not values")
        if isinstance(x, (int, Fraction)):
            x = Fraction(x)
            return cls(-x, Fraction(1, 2)) if x < 0 else cls(x)
        if isinstance(x, complex):
            if x.imag == 0:
                return cls.of(Fraction(x.real))
            if x.real == 0:
                y = Fraction(x.imag)
                return cls(abs(y), Fraction(1, 4) if y > 0 else Fraction(3, 4))
            raise ValueError(f"cannot represent {x!r} exactly")
        if isinstance(x, dict):
            return cls(parse_fraction(x["scale"]), parse_fraction(x.get("phase", 0)))
        if isinstance(x, str):
            return cls.parse(x)
        raise TypeError(f"cannot convert {type(x).__name__} to Value")

    _TERM = re.compile(r"^(?P<scale>[0-9/]+)?\*?e\((?P<phase>-?[0-9/]+)\)$")

    @classmethod
    def parse(cls, text: str) -> "Value":
        s = text.strip().replace(" ", "")
        if s.endswith("i"):
            body = s[:-1]
            sign = Fraction(1, 4)
            if body.startswith("-"):
                sign, body = Fraction(3, 4), body[1:]
            elif body.startswith("+"):
                body = body[1:]
            body = body.rstrip("*")
            return cls(Fraction(body) if body else 1, sign)
        m = cls._TERM.match(s)
        if m:
            return cls(Fraction(m["scale"]) if m["scale"] else 1, Fraction(m["phase"]))
        return cls.of(Fraction(s))

    def __mul__(self, other):
        if not isinstance(other, Value):
            try:
                other = Value.of(other)
            except (TypeError, ValueError):
                return NotImplemented
        key = (id(self), id(other))
        res = Value._products.get(key)
        if res is None:
            res = Value(self.scale * other.scale, self.phase + other.phase)
            Value._products[key] = res
        return res

    __rmul__ = __mul__

    def inverse(self) -> "Value":
        if self.scale == 0:
            raise ZeroDivisionError("Zero has no inverse")
        return Value(1 / self.scale, -self.phase)

    def __truediv__(self, other):
        return self * Value.of(other).inverse()

    def __neg__(self):
        return self * MINUS_ONE

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k == 0:
            return ONE
        if k < 0:
            return self.inverse() ** (-k)
        return Value(self.scale**k, self.phase * k)

    def conjugate(self) -> "Value":
        return Value(self.scale, -self.phase)

    @property
    def order(self) -> int:
        """Order of the phase as a root of unity (1 for positive reals and zero)."""
        return self.phase.denominator

    def to_complex(self, dps: int = DIGITS) -> mpmath.mpc:
        with mpmath.workdps(dps):
            if self.scale == 0:
                return mpmath.mpc(0)
            return mpmath.mpf(self.scale.numerator) / self.scale.denominator * mpmath.expjpi(
                2 * mpmath.mpf(self.phase.numerator) / self.phase.denominator
            )

    def __complex__(self):
        return complex(self.to_complex(20))

    def to_json(self):
        if self.scale == 0:
            return 0
        return {"scale": format_fraction(self.scale), "phase": format_fraction(self.phase)}

    def __str__(self):
        if self.scale == 0:
            return "0"
        s = "" if self.scale == 1 else str(self.scale)
        if self.phase == 0:
            return str(self.scale)
        if self.phase == Fraction(1, 2):
            return "-" + str(self.scale)
        if self.phase == Fraction(1, 4):
            return s + "i"
        if self.phase == Fraction(3, 4):
            return "-" + s + "i"
        return (s + "*" if s else "") + f"e({self.phase})"

    def __repr__(self):
        return f"Value({self})"


ZERO = Value(0)
ONE = Value(1)
MINUS_ONE = Value(1, Fraction(1, 2))
I = Value(1, Fraction(1, 4))


def root_of_unity(phase) -> Value:
    return Value(1, Fraction(phase))


def value_doc(v: Value):
    """Compact document form: an int for integers, else the string form."""
    if v.scale.denominator == 1 and v.phase in (0, Fraction(1, 2)):
        return int(v.scale) if v.phase == 0 else -int(v.scale)
    return str(v)


# ---------------------------------------------------------------------------
# exact cyclotomic arithmetic


def _polydiv(num: list, den: tuple) -> tuple[list, list]:
    """Divide polynomials (coefficients low -> high); ``den`` must be monic."""
    num = list(num)
    dn = len(den) - 1
    if len(num) - 1 < dn:
        return [0], num
    quot = [0] * (len(num) - dn)
    for i in range(len(num) - 1, dn - 1, -1):
        c = num[i]
        if c:
            quot[i - dn] = c
            for j in range(dn + 1):
                num[i - dn + j] -= c * den[j]
    return quot, num[:dn]


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Integer coefficients of the n-th cyclotomic polynomial, low degree first."""
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly, rem = _polydiv(poly, cyclotomic_polynomial(d))
            assert not any(rem)
    return tuple(poly)


class CyclotomicNumber:
    """An element of Q(zeta_N) in the power basis 1, z, ..., z^(phi(N)-1)."""

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs: Iterable):
        coeffs = [Fraction(c) for c in coeffs]
        phi = len(cyclotomic_polynomial(order)) - 1
        if len(coeffs) > phi:
            _, coeffs = _polydiv(coeffs, cyclotomic_polynomial(order))
        coeffs += [Fraction(0)] * (phi - len(coeffs))
        self.order = order
        self.coeffs = tuple(coeffs)

    @classmethod
    def rational(cls, q) -> "CyclotomicNumber":
        return cls(1, [Fraction(q)])

    @classmethod
    def from_terms(cls, terms: Iterable[tuple]) -> "CyclotomicNumber":
        """Sum of ``coefficient * e(phase)`` over ``(coefficient, phase)`` pairs."""
        terms = [(Fraction(c), Fraction(ph) % 1) for c, ph in terms]
        order = 1
        for _, ph in terms:
            order = math.lcm(order, ph.denominator)
        poly = [Fraction(0)] * order
        for c, ph in terms:
            poly[int(ph * order)] += c
        return cls(order, poly)

    @classmethod
    def from_values(cls, values: Iterable[Value], weights: Iterable | None = None):
        values = list(values)
        weights = [1] * len(values) if weights is None else list(weights)
        return cls.from_terms((w * v.scale, v.phase) for v, w in zip(values, weights) if v)

    def lift(self, order: int) -> "CyclotomicNumber":
        if order == self.order:
            return self
        if order % self.order:
            raise ValueError("can only lift to a multiple of the current order")
        step = order // self.order
        poly = [Fraction(0)] * (step * (len(self.coeffs) - 1) + 1)
        for i, c in enumerate(self.coeffs):
            poly[i * step] = c
        return CyclotomicNumber(order, poly)

    def _common(self, other):
        if not isinstance(other, CyclotomicNumber):
            other = CyclotomicNumber.rational(other)
        n = math.lcm(self.order, other.order)
        return self.lift(n), other.lift(n), n

    def __add__(self, other):
        a, b, n = self._common(other)
        return CyclotomicNumber(n, [x + y for x, y in zip(a.coeffs, b.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicNumber(self.order, [-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other if isinstance(other, CyclotomicNumber) else -Fraction(other))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CyclotomicNumber(self.order, [c * other for c in self.coeffs])
        a, b, n = self._common(other)
        poly = [Fraction(0)] * (len(a.coeffs) + len(b.coeffs) - 1)
        for i, x in enumerate(a.coeffs):
            if x:
                for j, y in enumerate(b.coeffs):
                    poly[i + j] += x * y
        return CyclotomicNumber(n, poly)

    __rmul__ = __mul__

    def __truediv__(self, q):
        return self * (1 / Fraction(q))

    @property
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, (CyclotomicNumber, int, Fraction)):
            return NotImplemented
        a, b, _ = self._common(other)
        return a.coeffs == b.coeffs

    __hash__ = None

    def as_rational(self) -> Fraction | None:
        """The value as a Fraction when it is rational, else None."""
        if not any(self.coeffs[1:]):
            return self.coeffs[0]
        return None

    def to_complex(self, dps: int = DIGITS) -> mpmath.mpc:
        with mpmath.workdps(dps):
            z = mpmath.expjpi(mpmath.mpf(2) / self.order)
            total = mpmath.mpc(0)
            for i, c in enumerate(self.coeffs):
                if c:
                    total += mpmath.mpf(c.numerator) / c.denominator * z**i
            return total

    def __repr__(self):
        return f"CyclotomicNumber(order={self.order}, coeffs={[str(c) for c in self.coeffs]})"
