"""Term sources ``n -> Value`` for ``n >= 0``."""

from __future__ import annotations

from collections import Counter
from math import isqrt
from typing import Callable, Iterable

import numpy as np

from .values import ONE, ZERO, Value

INT64_SAFE = 1 << 62


def int64_indices(indices) -> np.ndarray | None:
    """Indices as an int64 array, or None when they would overflow."""
    if isinstance(indices, range):
        if len(indices) == 0:
            return np.zeros(0, dtype=np.int64)
        lo, hi = min(indices[0], indices[-1]), max(indices[0], indices[-1])
        if lo < 0 or hi >= INT64_SAFE:
            return None
        return np.arange(indices.start, indices.stop, indices.step, dtype=np.int64)
    arr = list(indices)
    if arr and (min(arr) < 0 or max(arr) >= INT64_SAFE):
        return None
    return np.asarray(arr, dtype=np.int64)


class SequenceOracle:
    """Deterministic term source; subclasses override ``values`` for bulk speed."""

    def __init__(self, fn: Callable[[int], Value] | None = None, name: str = "",
                 support_bound: int | None = None):
        self._fn = fn
        self.name = name
        self.support_bound = support_bound

    def __call__(self, n: int) -> Value:
        return self._fn(n)

    def values(self, indices: Iterable[int]) -> list[Value]:
        fn = self.__call__
        return [fn(n) for n in indices]

    def prefix(self, stop: int, start: int = 0) -> list[Value]:
        return self.values(range(start, stop))

    def value_counts(self, start: int, stop: int, chunk: int = 1 << 20) -> Counter:
        counts: Counter = Counter()
        for lo in range(start, stop, chunk):
            counts.update(self.values(range(lo, min(stop, lo + chunk))))
        return counts

    def __repr__(self):
        return f"{type(self).__name__}({self.name!r})"


def as_oracle(f) -> SequenceOracle:
    if isinstance(f, SequenceOracle):
        return f
    if callable(f):
        return SequenceOracle(lambda n: Value.of(f(n)), name=getattr(f, "__name__", ""))
    raise TypeError("expected a SequenceOracle or a callable")


def constant(value) -> SequenceOracle:
    v = Value.of(value)
    return SequenceOracle(lambda n: v, name=f"constant {v}")


class _SquareIndicator(SequenceOracle):
    def __call__(self, n):
        return ONE if isqrt(n) ** 2 == n else ZERO

    def values(self, indices):
        arr = int64_indices(indices)
        if arr is None or (arr.size and arr.max() >= 1 << 52):
            return super().values(indices)
        root = np.floor(np.sqrt(arr.astype(np.float64))).astype(np.int64)
        root += (root + 1) ** 2 <= arr
        root -= root**2 > arr
        return [ONE if s else ZERO for s in (root * root == arr).tolist()]


def perfect_square_indicator() -> SequenceOracle:
    return _SquareIndicator(name="perfect squares")
