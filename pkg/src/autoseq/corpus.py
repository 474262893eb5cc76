"""Seeded families of specs and automata used by tests and the CLI."""

from __future__ import annotations

import random
from fractions import Fraction

from .arithmetic import characters_mod
from .automata import Dfao
from .constructors import (EventuallyPeriodicSeq, FiniteSupport, PeriodicMult,
                           TheoremFormSpec)
from .values import I, MINUS_ONE, ONE, ZERO, Value, root_of_unity

VALUE_POOL = (ZERO, ONE, MINUS_ONE, I, I.conjugate(), root_of_unity(Fraction(1, 3)),
              Value(2), Value(Fraction(1, 2)))
PRIMES = (2, 3, 5)
SUPPORT_PRIMES = (2, 3, 5, 7)


def random_f1(rng: random.Random) -> EventuallyPeriodicSeq:
    pre = [rng.choice(VALUE_POOL) for _ in range(rng.randint(0, 3))]
    per = [rng.choice(VALUE_POOL) for _ in range(rng.randint(1, 4))]
    (pre if pre else per)[0] = ONE
    return EventuallyPeriodicSeq(tuple(pre), tuple(per))


def random_f2(rng: random.Random, p: int):
    if rng.random() < 0.5:
        d = rng.randint(1, 12)
        chi = rng.choice(characters_mod(d))
        return PeriodicMult.from_character(chi).zero_extend(p)
    primes = [q for q in SUPPORT_PRIMES if q != p]
    items = {}
    for _ in range(rng.randint(0, 4)):
        items[(rng.choice(primes), rng.randint(1, 3))] = rng.choice(VALUE_POOL[1:])
    return FiniteSupport(tuple(items.items()))


def random_spec(rng: random.Random) -> TheoremFormSpec:
    p = rng.choice(PRIMES)
    return TheoremFormSpec(p, random_f1(rng), random_f2(rng, p))


def spec_corpus(count: int = 100, seed: int = 2024) -> list[TheoremFormSpec]:
    rng = random.Random(seed)
    return [random_spec(rng) for _ in range(count)]


def random_dfao(rng: random.Random, base: int, n_states: int, alphabet=VALUE_POOL) -> Dfao:
    """Random automaton made zero-stable by sharing outputs along 0-edges."""
    delta = [[rng.randrange(n_states) for _ in range(base)] for _ in range(n_states)]
    parent = list(range(n_states))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for s in range(n_states):
        parent[find(s)] = find(delta[s][0])
    label = {}
    outputs = [label.setdefault(find(s), rng.choice(alphabet)) for s in range(n_states)]
    return Dfao(base, delta, outputs, 0).canonical()


def _spec(p, pre, per, f2) -> TheoremFormSpec:
    return TheoremFormSpec(p, EventuallyPeriodicSeq(tuple(pre), tuple(per)), f2)


def period_doubling() -> TheoremFormSpec:
    """a(n) = (-1)^nu_2(n)."""
    return _spec(2, [], [1, -1], PeriodicMult.from_character(characters_mod(2)[0]))


def even_power_indicator() -> TheoremFormSpec:
    """1 at 2^m for even m, 0 elsewhere."""
    return _spec(2, [], [1, 0], FiniteSupport(()))


def zero_mean_example() -> TheoremFormSpec:
    """f1 = 1, -1, -1, ... with p = 2: mean zero."""
    return _spec(2, [1], [-1], PeriodicMult.from_character(characters_mod(2)[0]))


NAMED = {
    "period-doubling": period_doubling,
    "even-power-indicator": even_power_indicator,
    "zero-mean": zero_mean_example,
}
