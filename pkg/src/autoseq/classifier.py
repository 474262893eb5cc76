"""Recover (p, f1, f2) from a sequence, and sparse/dense fitting."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arithmetic import (DenseData, DirichletCharacter, characters_mod, factorize, nu,
                         prime_factors, prime_power_base)
from .automata import eventual_period_detect
from .constructors import (Counterexample, EventuallyPeriodicSeq, FiniteSupport,
                           FinitelySupported, PeriodicMult, TheoremFormSpec, dichotomy_f2,
                           is_completely_multiplicative, is_multiplicative, theorem_form)
from .errors import (CompositeNonPeriodic, FormMismatch, NoFit, NotMultiplicative,
                     PeriodUndetected, ReconstructionMismatch)
from .sequences import SequenceOracle, as_oracle
from .values import ONE, ZERO, Value, value_doc

MULT_PRECHECK = 4096


def _first_mismatch(xs, ys, offset: int = 0) -> int | None:
    for i, (x, y) in enumerate(zip(xs, ys)):
        if x is not y:
            return i + offset
    return None


def _precheck(a, H: int, complete: bool = False):
    N = max(2, min(H, MULT_PRECHECK))
    verdict = (is_completely_multiplicative if complete else is_multiplicative)(a, N)
    if isinstance(verdict, Counterexample):
        raise NotMultiplicative(f"multiplicativity fails: {verdict.detail}",
                                witness=(verdict.m, verdict.n))


def periodic_on_horizon(values: list, start: int = 1) -> tuple[int, int] | None:
    """``(n0, d)`` if the terms look eventually periodic over the horizon.

    The periodic tail must show three periods and cover at least half of the
    inspected range, so short coincidental tails do not count.
    """
    H = start + len(values) - 1
    found = eventual_period_detect(values, max(H, 4), start=start)
    if found and found[0] - start <= len(values) // 2:
        return found
    return None


@dataclass(frozen=True)
class Decomposition:
    p: int
    f1: EventuallyPeriodicSeq
    f2: PeriodicMult | FiniteSupport
    unique: bool
    verified_to: int

    @property
    def spec(self) -> TheoremFormSpec:
        return TheoremFormSpec(self.p, self.f1, self.f2)

    def to_json(self) -> dict:
        return {"spec": self.spec.to_json(), "unique": self.unique, "verified_to": self.verified_to}


def _recover_f2(g: list, H: int):
    """``g[n-1]`` is f2(n) for n = 1..H."""
    oracle = SequenceOracle(lambda n: g[n - 1])
    oracle.values = lambda idx: [g[n - 1] for n in idx]
    verdict = dichotomy_f2(oracle, H)
    if isinstance(verdict, FinitelySupported):
        powers = []
        for n in range(2, verdict.bound + 1):
            if g[n - 1]:
                pp = prime_power_base(n)
                if pp:
                    powers.append((pp, g[n - 1]))
        return FiniteSupport(tuple(powers))
    d = verdict.d
    return PeriodicMult(d, tuple(g[(r or d) - 1] for r in range(d)))


def decompose(a, p: int, H: int = 10**5, exponent_horizon: int | None = None) -> Decomposition:
    """Split a multiplicative sequence into f1(nu_p(n)) * f2(n / p^nu_p(n)).

    ``f1(k) = a(p^k)`` is read for ``k < exponent_horizon`` (at least 32 terms),
    ``f2`` is ``a`` on integers prime to ``p``; the result is verified on [1, H].
    """
    a = as_oracle(a)
    _precheck(a, H)
    vals = a.values(range(1, H + 1))
    if not any(vals):
        raise NotMultiplicative("sequence vanishes on [1, H]", witness=H)
    K = exponent_horizon or max(int(math.log(H, p)) + 1, 32)
    f1_terms = a.values([p**k for k in range(K)])
    found = eventual_period_detect(f1_terms, K - 1, start=0)
    if found is None:
        raise PeriodUndetected(f"f1 shows no period within {K} terms", witness=K)
    n0, d = found
    f1 = EventuallyPeriodicSeq(tuple(f1_terms[:n0]), tuple(f1_terms[n0:n0 + d]))
    g = [ZERO if n % p == 0 else v for n, v in enumerate(vals, start=1)]
    try:
        f2 = _recover_f2(g, H)
    except (PeriodUndetected, NotMultiplicative) as exc:
        # a(n) off multiples of p is not the f2 of any decomposition with this p
        raise ReconstructionMismatch(f"no f2 fits for p={p}: {exc}", witness=exc.witness) from None
    spec = TheoremFormSpec(p, f1, f2)
    bad = _first_mismatch(theorem_form(spec).values(range(1, H + 1)), vals, offset=1)
    if bad is not None:
        raise ReconstructionMismatch(
            f"reconstruction differs at n={bad}: a(n)={vals[bad - 1]}", witness=bad)
    return Decomposition(p, f1, f2, unique=periodic_on_horizon(vals) is None, verified_to=H)


@dataclass(frozen=True)
class PeriodicVerdict:
    preperiod_end: int
    period: int
    horizon: int

    def to_json(self) -> dict:
        return {"verdict": "Periodic", "n0": self.preperiod_end, "period": self.period,
                "horizon": self.horizon}


def find_base_prime(a, lam: int, H: int = 10**5):
    """The prime p of the theorem form, or PeriodicVerdict when any p works."""
    a = as_oracle(a)
    _precheck(a, H)
    vals = a.values(range(1, H + 1))
    found = periodic_on_horizon(vals)
    if found:
        return PeriodicVerdict(found[0], found[1], H)
    pp = prime_power_base(lam)
    if pp is None:
        raise CompositeNonPeriodic(
            f"not eventually periodic on [1, {H}] but base {lam} is not a prime power",
            witness=lam)
    decompose(a, pp[0], H)
    return pp[0]


# ---------------------------------------------------------------------------
# sparse / dense


@dataclass(frozen=True)
class Classification:
    verdict: str
    modulus: int
    dense: DenseData | None
    support: tuple | None
    horizon: int
    bound: int

    @property
    def is_dense(self) -> bool:
        return self.verdict == "Dense"

    def to_json(self) -> dict:
        doc = {"verdict": self.verdict, "modulus": self.modulus, "horizon": self.horizon,
               "bound": self.bound}
        if self.dense is not None:
            doc["dense"] = self.dense.to_json()
        if self.support is not None:
            doc["support"] = list(self.support)
        return doc


def _split_modulus(M: int, base: int | None) -> tuple[int, int]:
    """``(h, lam)`` with lam the part of M built from primes of ``base``."""
    lam = 1
    if base:
        for q, e in factorize(M).items() if M > 1 else ():
            if base % q == 0:
                lam *= q**e
    return M // lam, lam


def classify_sparse_dense(a, B: int = 256, H: int = 10**4, base: int | None = None) -> Classification:
    """Smallest M <= B with a = 0 or a = chi on [1, H] off the integers sharing a factor with M."""
    a = as_oracle(a)
    vals = a.values(range(H + 1))
    index: dict = {}
    codes = np.array([index.setdefault(v, len(index)) for v in vals], dtype=np.int64)
    alphabet = list(index)
    n = np.arange(H + 1)
    support = n[1:][codes[1:] != index.get(ZERO, -1)]
    big_support = support[support > 1]
    for M in range(1, B + 1):
        if np.all(np.gcd(big_support, M) > 1):
            return Classification("Sparse", M, None, tuple(int(x) for x in support), H, B)
        if H < M:
            continue
        if M == 1:
            ok = np.all(codes[1:] == codes[1])
            table = [alphabet[int(codes[1])]]
        else:
            idx = n[1:][np.gcd(n[1:], M) == 1]
            ok = np.all(codes[idx] == codes[idx % M])
            table = [alphabet[int(codes[r])] if math.gcd(r, M) == 1 else ZERO for r in range(M)]
        if not ok:
            continue
        for chi in characters_mod(M):
            if list(chi.values_table()) == table:
                h, lam = _split_modulus(M, base)
                return Classification("Dense", M, DenseData(h, lam, chi), None, H, B)
    raise NoFit(f"no modulus up to {B} fits on [1, {H}]", witness=B)


@dataclass(frozen=True)
class Pass:
    def __bool__(self):
        return True

    def to_json(self):
        return {"verdict": "Pass"}


@dataclass(frozen=True)
class Fail:
    n: int
    detail: str = ""

    def __bool__(self):
        return False

    def to_json(self):
        return {"verdict": "Fail", "n": self.n, "detail": self.detail}


def dense_product_form_check(a, dense: DenseData, N: int = 10**4):
    """Check a(n) against the product of its local factors for 1 <= n <= N."""
    a = as_oracle(a)
    vals = a.values(range(N + 1))
    local = []
    for q in dense.primes:
        K = int(math.log(N, q) + 1e-9) + 1
        inv = dense.chi(dense.pbar(q)).inverse()
        ratios = [vals[q**e] * inv**e if q**e <= N else None for e in range(K + 1)]
        local.append((q, dense.local(q).values_table(), dense.local(q).modulus, ratios))
    for n in range(1, N + 1):
        got = ONE
        for q, table, mod, ratios in local:
            e, m = 0, n
            while m % q == 0:
                m //= q
                e += 1
            got = got * table[m % mod] * ratios[e]
        if got is not vals[n]:
            return Fail(n, f"a({n}) = {vals[n]} but the product form gives {got}")
    return Pass()


@dataclass(frozen=True)
class Period:
    d: int
    gamma: int

    def __bool__(self):
        return True

    def to_json(self):
        return {"verdict": "Period", "period": self.d, "gamma": self.gamma}


def _stabilization(seq: list, run: int = 3) -> int | None:
    """Start of the constant tail of ``seq`` if it has at least ``run`` terms."""
    g = len(seq) - 1
    while g > 0 and seq[g - 1] is seq[-1]:
        g -= 1
    return g if len(seq) - g >= run else None


def periodic_factor_check(a, dense: DenseData, q: int, N: int = 10**4):
    """Confirm that n -> chi_q(n/q^v) a(q^v) / chi(qbar)^v (v = nu_q(n)) is periodic on [1, N]."""
    M = dense.modulus
    if M % q:
        raise ValueError(f"{q} does not divide {M}")
    a = as_oracle(a)
    alpha = dense.alpha(q)
    K = int(math.log(N, q) + 1e-9)
    chi_bar = dense.chi(dense.pbar(q))
    ratios = [a(q**k) / chi_bar**k for k in range(K + 1)]
    gamma = _stabilization(ratios)
    if gamma is None:
        return Fail(q**K, f"a(q^k)/chi(qbar)^k does not settle for k <= {K}")
    local = dense.local(q)
    factor = [ZERO]
    for n in range(1, N + 1):
        e = nu(q, n)
        factor.append(local(n // q**e) * ratios[min(e, K)])
    cand = q ** (gamma + alpha)
    for n in range(1, N + 1 - cand):
        if factor[n + cand] is not factor[n]:
            return Fail(n, f"factor({n + cand}) != factor({n}) for period {cand}")
    d = cand
    for r in sorted(x for x in range(1, cand + 1) if cand % x == 0):
        if all(factor[n + r] is factor[n] for n in range(1, N + 1 - r)):
            d = r
            break
    return Period(d, gamma)


# ---------------------------------------------------------------------------
# completely multiplicative and sparse reports


@dataclass(frozen=True)
class CMForm:
    p: int
    epsilon: Value
    chi: DirichletCharacter

    def to_json(self):
        return {"p": self.p, "epsilon": value_doc(self.epsilon), "character": self.chi.to_json()}


@dataclass(frozen=True)
class PowerSupported:
    p: int

    def to_json(self):
        return {"verdict": "PowerSupported", "p": self.p}


def completely_multiplicative_form(a, H: int = 10**4, B: int = 256):
    """a(n) = eps^nu_p(n) * chi(n / p^nu_p(n)), or PowerSupported(p)."""
    a = as_oracle(a)
    _precheck(a, H, complete=True)
    vals = a.values(range(H + 1))
    cls = classify_sparse_dense(a, B, H)
    if not cls.is_dense:
        primes = sorted({q for n in cls.support if n > 1 for q in prime_factors(n)})
        if len(primes) > 1:
            bad = next(n for n in cls.support if n > 1 and prime_factors(n) != [primes[0]])
            raise FormMismatch(f"support is not inside the powers of {primes[0]}", witness=bad)
        return PowerSupported(primes[0] if primes else 2)
    chi = cls.dense.chi
    witness = None
    for p in prime_factors(chi.modulus) if chi.modulus > 1 else [2]:
        eps = a(p)
        bad = next((n for n in range(1, H + 1)
                    if eps ** nu(p, n) * chi(n // p ** nu(p, n)) is not vals[n]), None)
        if bad is None:
            return CMForm(p, eps, chi)
        witness = bad if witness is None else min(witness, bad)
    raise FormMismatch("no prime gives the completely multiplicative form", witness=witness)


@dataclass(frozen=True)
class SparseReport:
    support: tuple
    primes: tuple
    exponent_profiles: dict
    estimate_P: tuple
    off_modulus: tuple
    N: int

    def to_json(self):
        return {"N": self.N, "support": list(self.support), "primes": list(self.primes),
                "exponent_profiles": {str(q): list(v) for q, v in self.exponent_profiles.items()},
                "P_estimate": list(self.estimate_P), "P_estimate_is_heuristic": True,
                "off_modulus": list(self.off_modulus)}


def sparse_support_analysis(a, N: int = 10**6, modulus: int | None = None) -> SparseReport:
    """Support of ``a`` on [1, N] and a finite-scale guess at the primes with infinite profile.

    A prime is put in the estimate when its largest nonzero exponent reaches
    the top quarter of the exponents that fit below N.
    """
    a = as_oracle(a)
    vals = a.values(range(1, N + 1))
    support = tuple(n for n, v in enumerate(vals, start=1) if v)
    primes = sorted({q for n in support if n > 1 for q in prime_factors(n)})
    profiles = {}
    estimate = []
    for q in primes:
        top = int(math.log(N, q) + 1e-9)
        exps = tuple(e for e in range(1, top + 1) if vals[q**e - 1])
        profiles[q] = exps
        if exps and exps[-1] >= 0.75 * top:
            estimate.append(q)
    off = ()
    if modulus:
        off = tuple(n for n in support if n > 1 and any(modulus % q for q in prime_factors(n)))
    return SparseReport(support, tuple(primes), profiles, tuple(estimate), off, N)
