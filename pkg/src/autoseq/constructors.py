"""Sequences of the form a(n) = f1(nu_p(n)) * f2(n / p^nu_p(n)) and their automata."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .arithmetic import characters_mod, is_prime, nu
from .automata import Dfao, eventual_period_detect, minimize, remove_p_powers
from .errors import NotMultiplicative, PeriodUndetected, SpecInvalid
from .sequences import SequenceOracle, as_oracle, int64_indices
from .values import ONE, ZERO, Value, value_doc


@dataclass(frozen=True)
class EventuallyPeriodicSeq:
    """k -> preperiod[k] for small k, then the period repeats; stored canonically."""

    preperiod: tuple
    period: tuple

    def __post_init__(self):
        pre = [Value.of(v) for v in self.preperiod]
        per = [Value.of(v) for v in self.period]
        if not per:
            raise ValueError("period must be non-empty")
        L = len(per)
        for d in range(1, L + 1):
            if L % d == 0 and all(per[i] is per[i % d] for i in range(L)):
                per = per[:d]
                break
        while pre and pre[-1] is per[-1]:
            pre.pop()
            per = [per[-1]] + per[:-1]
        object.__setattr__(self, "preperiod", tuple(pre))
        object.__setattr__(self, "period", tuple(per))

    def __call__(self, k: int) -> Value:
        if k < len(self.preperiod):
            return self.preperiod[k]
        return self.period[(k - len(self.preperiod)) % len(self.period)]

    def values(self, count: int) -> list[Value]:
        return [self(k) for k in range(count)]

    def index_array(self, ks: np.ndarray) -> np.ndarray:
        """Position of each ``k`` in ``preperiod + period``."""
        n0, L = len(self.preperiod), len(self.period)
        return np.where(ks < n0, ks, n0 + (ks - n0) % L)

    @property
    def alphabet(self) -> tuple:
        return self.preperiod + self.period

    def to_json(self) -> dict:
        return {"preperiod": [value_doc(v) for v in self.preperiod],
                "period": [value_doc(v) for v in self.period]}

    @classmethod
    def from_json(cls, doc) -> "EventuallyPeriodicSeq":
        return cls(tuple(doc.get("preperiod", [])), tuple(doc["period"]))


@dataclass(frozen=True)
class PeriodicMult:
    """Periodic multiplicative function given by its values on residues mod ``period``."""

    period: int
    values: tuple

    def __post_init__(self):
        d = self.period
        vals = [Value.of(v) for v in self.values]
        if d < 1 or len(vals) != d:
            raise SpecInvalid("need one value per residue")
        if vals[1 % d] is not ONE:
            raise NotMultiplicative("f(1) must be 1", witness=(1, 1))
        # coprime m, n exist in residue classes r, s exactly when gcd(r, s, d) = 1
        for r in range(d):
            for s in range(r, d):
                if math.gcd(r, s, d) == 1 and vals[r * s % d] is not vals[r] * vals[s]:
                    raise NotMultiplicative(
                        f"f({r}*{s} mod {d}) != f({r}) f({s})", witness=(r, s))
        for e in range(1, d + 1):
            if d % e == 0 and all(vals[i] is vals[i % e] for i in range(d)):
                vals = vals[:e]
                break
        object.__setattr__(self, "period", len(vals))
        object.__setattr__(self, "values", tuple(vals))

    @classmethod
    def from_character(cls, chi) -> "PeriodicMult":
        return cls(chi.modulus, chi.values_table())

    def __call__(self, n: int) -> Value:
        return self.values[n % self.period]

    def vanishes_at_multiples_of(self, p: int) -> bool:
        d = self.period
        if d % p:
            return False
        return all(self.values[r] is ZERO for r in range(0, d, p))

    def zero_extend(self, p: int) -> "PeriodicMult":
        """Multiply by the indicator of ``p`` not dividing ``n``."""
        if self.vanishes_at_multiples_of(p):
            return self
        d = math.lcm(self.period, p)
        return PeriodicMult(d, tuple(ZERO if r % p == 0 else self(r) for r in range(d)))

    def character(self):
        """``(modulus, index)`` when this is a character mod its period, else None."""
        d = self.period
        for i, chi in enumerate(characters_mod(d)):
            if chi.values_table() == self.values:
                return d, i
        return None

    def to_json(self) -> dict:
        found = self.character()
        if found:
            return {"kind": "periodic", "modulus": found[0], "character_index": found[1]}
        return {"kind": "periodic_table", "period": self.period,
                "values": [value_doc(v) for v in self.values]}


@dataclass(frozen=True)
class FiniteSupport:
    """Multiplicative function nonzero only on products of the listed prime powers."""

    prime_powers: tuple

    def __post_init__(self):
        items = {}
        raw = self.prime_powers.items() if isinstance(self.prime_powers, dict) else self.prime_powers
        for (q, e), v in raw:
            v = Value.of(v)
            if not is_prime(q) or e < 0:
                raise SpecInvalid(f"{q}^{e} is not a prime power")
            if e == 0:
                if v is not ONE:
                    raise NotMultiplicative("f(1) must be 1", witness=(1, 1))
                continue
            if v:
                items[(q, e)] = v
        object.__setattr__(self, "prime_powers", tuple(sorted(items.items())))
        object.__setattr__(self, "_support", self._enumerate())

    def _enumerate(self) -> dict:
        support = {1: ONE}
        by_prime: dict[int, list] = {}
        for (q, e), v in self.prime_powers:
            by_prime.setdefault(q, []).append((q**e, v))
        for options in by_prime.values():
            nxt = dict(support)
            for m, v in support.items():
                for qe, w in options:
                    nxt[m * qe] = v * w
            support = nxt
        return dict(sorted(support.items()))

    @property
    def support(self) -> dict:
        """Every n with f(n) != 0, mapped to f(n)."""
        return self._support

    @property
    def bound(self) -> int:
        return max(self._support)

    def __call__(self, n: int) -> Value:
        return self._support.get(n, ZERO)

    def to_json(self) -> dict:
        return {"kind": "finite",
                "prime_powers": {f"{q}^{e}": value_doc(v) for (q, e), v in self.prime_powers}}


MultSpec = Union[PeriodicMult, FiniteSupport]


def mult_spec_from_json(doc, p: int | None = None) -> MultSpec:
    kind = doc.get("kind")
    if kind == "periodic":
        chi = characters_mod(int(doc["modulus"]))[int(doc.get("character_index", 0))]
        spec = PeriodicMult.from_character(chi)
    elif kind == "periodic_table":
        spec = PeriodicMult(int(doc["period"]), tuple(doc["values"]))
    elif kind == "finite":
        items = []
        for key, v in doc["prime_powers"].items():
            q, _, e = str(key).partition("^")
            items.append(((int(q), int(e or 1)) if int(q) != 1 else (2, 0), v))
        return FiniteSupport(tuple(items))
    else:
        raise SpecInvalid(f"unknown f2 kind {kind!r}")
    if p is not None and spec.period % p:
        spec = spec.zero_extend(p)
    return spec


@dataclass(frozen=True)
class TheoremFormSpec:
    p: int
    f1: EventuallyPeriodicSeq
    f2: MultSpec

    def __post_init__(self):
        if not is_prime(self.p):
            raise SpecInvalid(f"p={self.p} is not prime")
        if self.f1(0) is not ONE:
            raise SpecInvalid("f1(0) must be 1")
        if isinstance(self.f2, PeriodicMult):
            if not self.f2.vanishes_at_multiples_of(self.p):
                raise SpecInvalid(f"f2 does not vanish at multiples of {self.p}")
        elif any(q == self.p for (q, _), _v in self.f2.prime_powers):
            raise SpecInvalid(f"f2 does not vanish at multiples of {self.p}")

    @property
    def is_dense(self) -> bool:
        return isinstance(self.f2, PeriodicMult)

    def to_json(self) -> dict:
        return {"p": self.p, "f1": self.f1.to_json(), "f2": self.f2.to_json()}

    @classmethod
    def from_json(cls, doc) -> "TheoremFormSpec":
        if isinstance(doc, str):
            doc = json.loads(doc)
        unknown = set(doc) - {"p", "f1", "f2"}
        if unknown:
            raise SpecInvalid(f"unknown spec fields: {sorted(unknown)}")
        try:
            p = int(doc["p"])
            return cls(p, EventuallyPeriodicSeq.from_json(doc["f1"]),
                       mult_spec_from_json(doc["f2"], p))
        except (KeyError, TypeError, ValueError) as exc:
            raise SpecInvalid(f"malformed spec: {exc}") from None


# ---------------------------------------------------------------------------
# oracles


class TheoremFormOracle(SequenceOracle):
    """a(0) = 0 and a(n) = f1(nu_p(n)) f2(n / p^nu_p(n)) for n >= 1."""

    def __init__(self, spec: TheoremFormSpec):
        super().__init__(name=f"theorem form p={spec.p}")
        self.spec = spec
        f2 = spec.f2
        self._f2_alphabet = (ZERO,) + (f2.values if isinstance(f2, PeriodicMult)
                                       else tuple(f2.support.values()))
        f1a = spec.f1.alphabet
        self._table = [u * v for u in f1a for v in self._f2_alphabet]

    def __call__(self, n: int) -> Value:
        if n == 0:
            return ZERO
        p = self.spec.p
        e = nu(p, n)
        return self.spec.f1(e) * self.spec.f2(n // p**e)

    def codes(self, indices) -> np.ndarray | None:
        """Index into ``self._table`` for each term, or None if not vectorizable."""
        arr = int64_indices(indices)
        if arr is None:
            return None
        p, f2 = self.spec.p, self.spec.f2
        m = arr.copy()
        e = np.zeros_like(m)
        live = m > 0
        while True:
            div = live & (m % p == 0)
            if not div.any():
                break
            m[div] //= p
            e[div] += 1
        if isinstance(f2, PeriodicMult):
            c2 = 1 + m % f2.period
        else:
            c2 = np.zeros_like(m)
            for j, key in enumerate(f2.support, start=1):
                c2[m == key] = j
        c2[~live] = 0
        return self.spec.f1.index_array(e) * len(self._f2_alphabet) + c2

    def values(self, indices):
        codes = self.codes(indices)
        if codes is None:
            return super().values(indices)
        table = self._table
        return [table[c] for c in codes.tolist()]

    def value_counts(self, start, stop, chunk=1 << 20):
        from collections import Counter

        counts: Counter = Counter()
        for lo in range(start, stop, chunk):
            codes = self.codes(range(lo, min(stop, lo + chunk)))
            if codes is None:
                counts.update(super().values(range(lo, min(stop, lo + chunk))))
                continue
            for c, k in enumerate(np.bincount(codes, minlength=len(self._table)).tolist()):
                if k:
                    counts[self._table[c]] += k
        return counts


def theorem_form(spec: TheoremFormSpec) -> TheoremFormOracle:
    return TheoremFormOracle(spec)


# ---------------------------------------------------------------------------
# automata for the two factors


def dfao_for_f1_part(p: int, f1: EventuallyPeriodicSeq) -> Dfao:
    """Base-p automaton for n -> f1(nu_p(n)) (value 0 at n = 0).

    States Z_0..Z_K count the low zero digits read so far (wrapping into the
    period); the first nonzero digit fixes nu_p and jumps to a constant state.
    """
    if f1(0) is not ONE:
        raise SpecInvalid("f1(0) must be 1")
    alphabet = list(dict.fromkeys(f1.alphabet))
    n0, L = len(f1.preperiod), len(f1.period)
    K = n0 + L
    const = {v: K + i for i, v in enumerate(alphabet)}
    delta, outputs = [], []
    for k in range(K):
        nxt = k + 1 if k + 1 < K else n0
        delta.append([nxt] + [const[f1(k)]] * (p - 1))
        outputs.append(ZERO)
    for v in alphabet:
        delta.append([const[v]] * p)
        outputs.append(v)
    return minimize(Dfao(p, delta, outputs, 0))


def _periodic_dfao(p: int, f: PeriodicMult) -> Dfao:
    """Base-p automaton for a d-periodic function: state (n mod d, p^k mod d)."""
    d = f.period
    index = {(0, 1 % d): 0}
    order = [(0, 1 % d)]
    delta = []
    i = 0
    while i < len(order):
        s, w = order[i]
        row = []
        for x in range(p):
            t = ((s + x * w) % d, (w * p) % d)
            if t not in index:
                index[t] = len(order)
                order.append(t)
            row.append(index[t])
        delta.append(row)
        i += 1
    return Dfao(p, delta, [f(s) for s, _ in order], 0)


def _finite_dfao(p: int, f: FiniteSupport) -> Dfao:
    """Exact base-p automaton for a finitely supported function.

    A state is the finite map {n: f(n*p^k + r)} of nonzero values of its
    kernel element, so distinct states are distinct sequences.
    """
    start = frozenset(f.support.items())
    index = {start: 0}
    order = [start]
    delta = []
    i = 0
    while i < len(order):
        sig = order[i]
        row = []
        for x in range(p):
            child = frozenset(((n - x) // p, v) for n, v in sig if n % p == x)
            if child not in index:
                index[child] = len(order)
                order.append(child)
            row.append(index[child])
        delta.append(row)
        i += 1
    outputs = [dict(sig).get(0, ZERO) for sig in order]
    return Dfao(p, delta, outputs, 0)


def dfao_for_f2_part(p: int, f2: MultSpec) -> Dfao:
    """Base-p automaton for n -> f2(n / p^nu_p(n)) on n >= 1."""
    if isinstance(f2, PeriodicMult):
        base = _periodic_dfao(p, f2)
    else:
        base = _finite_dfao(p, f2)
    return minimize(remove_p_powers(base))


def dfao_for_spec(spec: TheoremFormSpec) -> Dfao:
    from .automata import product

    return minimize(product(dfao_for_f1_part(spec.p, spec.f1), dfao_for_f2_part(spec.p, spec.f2)))


# ---------------------------------------------------------------------------
# multiplicativity scans


@dataclass(frozen=True)
class Certified:
    bound: int

    def __bool__(self):
        return True

    def to_json(self):
        return {"verdict": "Certified", "bound": self.bound}


@dataclass(frozen=True)
class Counterexample:
    m: int
    n: int
    detail: str = ""

    def __bool__(self):
        return False

    def to_json(self):
        return {"verdict": "Counterexample", "m": self.m, "n": self.n, "detail": self.detail}


def _smallest_prime_factors(N: int) -> np.ndarray:
    spf = np.zeros(N + 1, dtype=np.int64)
    for q in range(2, math.isqrt(N) + 1):
        if spf[q] == 0:
            block = spf[q * q::q]
            block[block == 0] = q
    idx = np.arange(N + 1)
    spf[spf == 0] = idx[spf == 0]
    return spf


def _scan(f, N: int, complete: bool):
    if N < 2:
        raise ValueError("N must be at least 2")
    vals = as_oracle(f).values(range(N + 1))
    if vals[1] is not ONE:
        return Counterexample(1, 1, f"f(1) = {vals[1]}")
    spf = _smallest_prime_factors(N)
    for P in range(2, N + 1):
        q = int(spf[P])
        if complete:
            m = q
        else:
            m = q
            while (P // m) % q == 0:
                m *= q
        n = P // m
        if n == 1:
            continue
        if vals[P] is not vals[m] * vals[n]:
            a, b = min(m, n), max(m, n)
            return Counterexample(a, b, f"f({P}) = {vals[P]} but f({a}) f({b}) = {vals[m] * vals[n]}")
    return Certified(N)


def is_multiplicative(f, N: int):
    """Certified(N) or the first coprime pair (by product) with f(mn) != f(m)f(n)."""
    return _scan(f, N, complete=False)


def is_completely_multiplicative(f, N: int):
    return _scan(f, N, complete=True)


# ---------------------------------------------------------------------------
# periodic versus finitely supported


@dataclass(frozen=True)
class Periodic:
    d: int

    def to_json(self):
        return {"verdict": "Periodic", "period": self.d}


@dataclass(frozen=True)
class FinitelySupported:
    bound: int

    def to_json(self):
        return {"verdict": "FinitelySupported", "bound": self.bound}


def dichotomy_f2(f, H: int):
    """Decide whether an eventually periodic multiplicative f is periodic or finitely supported."""
    f = as_oracle(f)
    vals = f.values(range(1, H + 1))
    found = eventual_period_detect(vals, H, start=1)
    if found is None:
        raise PeriodUndetected(f"no eventual period within H={H}", witness=H)
    n0, d = found
    if all(v is ZERO for v in vals[n0 - 1:n0 - 1 + d]):
        last = max((i for i, v in enumerate(vals, start=1) if v), default=0)
        return FinitelySupported(last)
    for i in range(len(vals) - d):
        if vals[i + d] is not vals[i]:
            raise NotMultiplicative(
                f"eventually periodic with period {d} but f({i + 1 + d}) != f({i + 1})",
                witness=i + 1)
    return Periodic(d)


__all__ = [
    "EventuallyPeriodicSeq", "PeriodicMult", "FiniteSupport", "MultSpec", "TheoremFormSpec",
    "mult_spec_from_json", "TheoremFormOracle", "theorem_form", "dfao_for_f1_part",
    "dfao_for_f2_part", "dfao_for_spec", "Certified", "Counterexample", "is_multiplicative",
    "is_completely_multiplicative", "Periodic", "FinitelySupported", "dichotomy_f2",
]
