"""Reference computations written independently of the package internals."""

import cmath
import math
from fractions import Fraction


def nu_direct(p, n):
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


def pd_direct(n):
    """(-1)^nu_2(n) from the lowest set bit."""
    return -1 if ((n & -n).bit_length() - 1) % 2 else 1


def factor_direct(n):
    out = {}
    q = 2
    while q * q <= n:
        while n % q == 0:
            out[q] = out.get(q, 0) + 1
            n //= q
        q += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def as_complex(v):
    """A package Value as a Python complex, read only from its scale and phase."""
    return float(v.scale) * cmath.exp(2j * math.pi * float(v.phase))


def theorem_value(spec, n):
    """a(n) = f1(nu_p(n)) f2(n / p^nu_p(n)) using the raw spec fields."""
    if n == 0:
        return 0j
    p = spec.p
    k = nu_direct(p, n)
    m = n // p**k
    pre, per = spec.f1.preperiod, spec.f1.period
    f1 = pre[k] if k < len(pre) else per[(k - len(pre)) % len(per)]
    f2 = spec.f2
    if hasattr(f2, "prime_powers"):
        table = dict(f2.prime_powers)
        g = 1
        for q, e in factor_direct(m).items():
            g *= as_complex(table[(q, e)]) if (q, e) in table else 0
    else:
        g = as_complex(f2.values[m % f2.period])
    return as_complex(f1) * g


def close(x, y, tol=1e-9):
    return abs(complex(x) - complex(y)) <= tol


def phi_direct(k):
    return sum(1 for r in range(1, k + 1) if math.gcd(r, k) == 1)


def exact_mean_direct(values, N):
    """Exact rational mean of a(1..N) when every value is real rational."""
    return Fraction(sum(values), N)
