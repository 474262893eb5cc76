"""Means, densities, Toeplitz periods and factor statistics over finite ranges."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .constructors import FiniteSupport, PeriodicMult, TheoremFormSpec
from .sequences import as_oracle
from .values import DIGITS, CyclotomicNumber


def mean_of_f2(f2) -> CyclotomicNumber:
    if isinstance(f2, FiniteSupport):
        return CyclotomicNumber.rational(0)
    d = f2.period
    return CyclotomicNumber.from_values([f2(r) for r in range(1, d + 1)]) / d


def f1_series(p: int, f1) -> CyclotomicNumber:
    """Closed form of sum_k f1(k) / p^k."""
    n0, L = len(f1.preperiod), len(f1.period)
    head = CyclotomicNumber.from_values(f1.preperiod, [Fraction(1, p**k) for k in range(n0)])
    cycle = CyclotomicNumber.from_values(f1.period, [Fraction(1, p**j) for j in range(L)])
    scale = Fraction(1, p**n0) / (1 - Fraction(1, p**L))
    return head + cycle * scale


def mean_formula_exact(spec: TheoremFormSpec) -> CyclotomicNumber:
    return mean_of_f2(spec.f2) * f1_series(spec.p, spec.f1)


def mean_formula(spec: TheoremFormSpec, dps: int = DIGITS) -> mpmath.mpc:
    return mean_formula_exact(spec).to_complex(dps)


def partial_sum_exact(a, N: int) -> CyclotomicNumber:
    counts = as_oracle(a).value_counts(1, N + 1)
    values = list(counts)
    return CyclotomicNumber.from_values(values, [counts[v] for v in values])


def empirical_mean(a, N: int, dps: int = DIGITS) -> mpmath.mpc:
    """(1/N) * sum_{n=1}^N a(n), summed exactly before conversion."""
    if N < 1:
        raise ValueError("N must be >= 1")
    return (partial_sum_exact(a, N) / N).to_complex(dps)


@dataclass(frozen=True)
class MeanReport:
    formula: mpmath.mpc
    empirical: mpmath.mpc
    N: int

    @property
    def discrepancy(self) -> mpmath.mpf:
        return abs(self.formula - self.empirical)

    def row(self) -> list:
        return [self.N, mpmath.nstr(self.empirical.real, 15), mpmath.nstr(self.empirical.imag, 15),
                mpmath.nstr(self.discrepancy, 6)]


def mean_trace(spec: TheoremFormSpec, a, Ns) -> list[MeanReport]:
    formula = mean_formula(spec)
    return [MeanReport(formula, empirical_mean(a, N), N) for N in Ns]


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ToeplitzResult:
    ok: bool
    n: int | None = None
    s: int | None = None

    def __bool__(self):
        return self.ok

    def to_json(self):
        if self.ok:
            return {"verdict": "Pass"}
        return {"verdict": "Fail", "n": self.n, "s": self.s}


def toeplitz_period_factor(spec: TheoremFormSpec) -> int:
    return spec.f2.period if isinstance(spec.f2, PeriodicMult) else 1


def toeplitz_check(a, N: int, S: int, p: int, c: int = 1) -> ToeplitzResult:
    """Check a(n + s*p*n*c) == a(n) for 1 <= n <= N and 1 <= s <= S."""
    a = as_oracle(a)
    base = a.values(range(1, N + 1))
    for s in range(1, S + 1):
        step = 1 + s * p * c
        shifted = a.values(range(step, N * step + 1, step))
        for n, (x, y) in enumerate(zip(base, shifted), start=1):
            if x is not y:
                return ToeplitzResult(False, n, s)
    return ToeplitzResult(True)


@dataclass(frozen=True)
class DensityReport:
    rows: tuple  # (j, 10**j, count, density)
    decreasing: bool

    @property
    def flagged(self) -> bool:
        return not self.decreasing

    def to_json(self):
        return {"rows": [{"decade": j, "N": n, "count": c, "density": str(d)} for j, n, c, d in self.rows],
                "strictly_decreasing": self.decreasing, "flag": self.flagged}


def support_density(a, N: int) -> DensityReport:
    """|support in [1, 10^j]| / 10^j for each decade 10^j <= N."""
    a = as_oracle(a)
    rows = []
    count = 0
    lo = 1
    j = 1
    while 10**j <= N:
        hi = 10**j
        counts = a.value_counts(lo, hi + 1)
        count += sum(k for v, k in counts.items() if v)
        rows.append((j, hi, count, Fraction(count, hi)))
        lo = hi + 1
        j += 1
    dens = [r[3] for r in rows]
    return DensityReport(tuple(rows), all(x > y for x, y in zip(dens, dens[1:])))


@dataclass(frozen=True)
class FactorGap:
    factor: tuple
    occurrences: int
    first_half_max_gap: int
    max_gap: int


@dataclass(frozen=True)
class ComplexityReport:
    counts: dict
    N: int
    L: int
    gaps: tuple = field(default=())
    flagged: tuple = field(default=())

    @property
    def bounded_gaps(self) -> bool:
        return not self.flagged

    def to_json(self):
        return {"N": self.N, "L": self.L, "counts": {str(k): v for k, v in self.counts.items()},
                "bounded_gaps": self.bounded_gaps,
                "flagged": [{"factor": [str(x) for x in g.factor], "occurrences": g.occurrences,
                             "first_half_max_gap": g.first_half_max_gap, "max_gap": g.max_gap}
                            for g in self.flagged]}


def word_complexity(a, L: int, N: int) -> ComplexityReport:
    """Distinct factors of a(1..N) for lengths 1..L, plus recurrence gaps at length L.

    A factor is flagged when it occurs at least 4 times in the first half but its
    largest gap over the whole prefix (trailing gap included) is more than twice
    the largest gap seen in the first half.
    """
    a = as_oracle(a)
    vals = a.values(range(1, N + 1))
    index: dict = {}
    codes = np.array([index.setdefault(v, len(index)) for v in vals], dtype=np.int64)
    alphabet = list(index)
    k = max(len(index), 2)
    counts = {}
    key = np.zeros(N, dtype=object if k**L >= 2**62 else np.int64)
    for ell in range(1, L + 1):
        m = N - ell + 1
        key = key[:m] * k + codes[ell - 1:ell - 1 + m]
        counts[ell] = int(len(np.unique(key)))
    # positions of each length-L factor
    order = np.argsort(key, kind="stable")
    sorted_keys = key[order]
    bounds = np.flatnonzero(np.r_[True, sorted_keys[1:] != sorted_keys[:-1], True])
    m = N - L + 1
    half = m // 2
    gaps, flagged = [], []
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        pos = order[lo:hi]
        full = np.diff(np.r_[-1, pos, m])
        first = pos[pos < half]
        if len(first) < 4:
            continue
        first_gap = int(np.diff(np.r_[-1, first]).max())
        g = FactorGap(_decode(int(sorted_keys[lo]), k, L, alphabet), len(pos), first_gap,
                      int(full.max()))
        gaps.append(g)
        if g.max_gap > 2 * g.first_half_max_gap:
            flagged.append(g)
    return ComplexityReport(counts, N, L, tuple(gaps), tuple(flagged))


def _decode(key: int, k: int, L: int, alphabet: list) -> tuple:
    out = []
    for _ in range(L):
        key, c = divmod(key, k)
        out.append(alphabet[c])
    return tuple(reversed(out))


# ---------------------------------------------------------------------------
# CSV


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def density_csv(report: DensityReport) -> str:
    return _csv(["decade", "N", "count", "density"],
                [(j, n, c, f"{float(d):.12g}") for j, n, c, d in report.rows])


def complexity_csv(report: ComplexityReport) -> str:
    return _csv(["length", "factors"], sorted(report.counts.items()))


def mean_csv(trace: list[MeanReport]) -> str:
    return _csv(["N", "real", "imag", "abs_error"], [r.row() for r in trace])


def decade_bounds(N: int) -> list[int]:
    return [10**j for j in range(1, int(math.log10(N) + 1e-9) + 1)]
