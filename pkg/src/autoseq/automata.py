"""Deterministic finite automata with output, read least significant digit first.

A ``Dfao`` in base ``b`` computes ``f(n)`` by feeding the base-``b`` digits of
``n`` (lowest first) through ``delta`` and reporting the output of the state it
ends in.  Every automaton is required to be *zero-stable*: reading an extra
``0`` never changes the output, so padding with high-order zeros is harmless.
This is what makes the bulk evaluator below valid.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .arithmetic import is_prime
from .errors import BudgetExceeded, NoRepetition, ZeroInstability
from .sequences import SequenceOracle, as_oracle, int64_indices
from .values import Value

DEFAULT_HORIZON = 2048
DEFAULT_MAX_STATES = 512


def digits(n: int, base: int) -> list[int]:
    """Base-``base`` digits of ``n``, least significant first (empty for 0)."""
    if n < 0:
        raise ValueError("digits of a negative number")
    # peel off word-sized chunks first so huge n costs few big-int divisions
    width = max(1, 60 // base.bit_length())
    chunk = base**width
    out = []
    while n >= chunk:
        n, low = divmod(n, chunk)
        for _ in range(width):
            low, r = divmod(low, base)
            out.append(r)
    while n:
        n, r = divmod(n, base)
        out.append(r)
    return out


@dataclass(frozen=True)
class Dfao:
    base: int
    delta: tuple
    outputs: tuple
    initial: int = 0

    def __post_init__(self):
        delta = tuple(tuple(int(t) for t in row) for row in self.delta)
        outputs = tuple(Value.of(v) for v in self.outputs)
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "outputs", outputs)
        if self.base < 2:
            raise ValueError("base must be at least 2")
        if len(delta) != len(outputs) or not delta:
            raise ValueError("delta and outputs must describe the same non-empty state set")
        n = len(delta)
        for row in delta:
            if len(row) != self.base or any(not 0 <= t < n for t in row):
                raise ValueError("delta must be total over digits 0..base-1")
        if not 0 <= self.initial < n:
            raise ValueError("initial state out of range")
        for s in self.reachable():
            if outputs[delta[s][0]] is not outputs[s]:
                raise ZeroInstability(
                    f"state {s} changes output on digit 0", witness=s)

    @property
    def num_states(self) -> int:
        return len(self.delta)

    def reachable(self) -> list[int]:
        """Reachable states in breadth-first order (digits ascending)."""
        seen = {self.initial}
        order = [self.initial]
        queue = deque(order)
        while queue:
            s = queue.popleft()
            for t in self.delta[s]:
                if t not in seen:
                    seen.add(t)
                    order.append(t)
                    queue.append(t)
        return order

    def canonical(self) -> "Dfao":
        """Drop unreachable states and renumber in breadth-first order."""
        order = self.reachable()
        if order == list(range(self.num_states)):
            return self
        new = {s: i for i, s in enumerate(order)}
        return Dfao(
            self.base,
            [[new[t] for t in self.delta[s]] for s in order],
            [self.outputs[s] for s in order],
            0,
        )

    def run(self, n: int, state: int | None = None) -> int:
        s = self.initial if state is None else state
        delta = self.delta
        for r in digits(n, self.base):
            s = delta[s][r]
        return s

    def __call__(self, n: int) -> Value:
        if n < 0:
            raise ValueError("automatic sequences are indexed by n >= 0")
        return self.outputs[self.run(n)]

    def states_many(self, indices) -> np.ndarray | None:
        arr = int64_indices(indices)
        if arr is None:
            return None
        table = np.asarray(self.delta, dtype=np.int64)
        state = np.full(arr.shape, self.initial, dtype=np.int64)
        m = arr.copy()
        while m.size and m.max() > 0:
            state = table[state, m % self.base]
            m //= self.base
        return state

    def eval_many(self, indices) -> list[Value]:
        states = self.states_many(indices)
        if states is None:
            return [self(n) for n in indices]
        outs = self.outputs
        return [outs[s] for s in states.tolist()]

    def output_alphabet(self) -> set:
        return {self.outputs[s] for s in self.reachable()}

    def oracle(self) -> "DfaoOracle":
        return DfaoOracle(self)

    # -- documents -------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "base": self.base,
            "initial": self.initial,
            "states": [
                {"id": i, "output": self.outputs[i].to_json(), "delta": list(self.delta[i])}
                for i in range(self.num_states)
            ],
        }

    @classmethod
    def from_json(cls, doc) -> "Dfao":
        if isinstance(doc, str):
            doc = json.loads(doc)
        unknown = set(doc) - {"base", "initial", "states"}
        if unknown:
            raise ValueError(f"unknown DFAO fields: {sorted(unknown)}")
        ids = {st["id"]: i for i, st in enumerate(doc["states"])}
        delta = [[ids[t] for t in st["delta"]] for st in doc["states"]]
        outputs = [Value.of(st["output"]) for st in doc["states"]]
        return cls(int(doc["base"]), delta, outputs, ids[doc["initial"]])

    def to_dot(self, name: str = "dfao") -> str:
        lines = [f"digraph {name} {{", "  rankdir=LR;", '  start [shape=point];']
        for s in range(self.num_states):
            lines.append(f'  q{s} [shape=circle, label="{s} / {self.outputs[s]}"];')
        lines.append(f"  start -> q{self.initial};")
        for s, row in enumerate(self.delta):
            by_target: dict[int, list[int]] = {}
            for digit, t in enumerate(row):
                by_target.setdefault(t, []).append(digit)
            for t, ds in by_target.items():
                lines.append(f'  q{s} -> q{t} [label="{",".join(map(str, ds))}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


class DfaoOracle(SequenceOracle):
    def __init__(self, dfao: Dfao, name: str = "dfao"):
        super().__init__(dfao, name=name)
        self.dfao = dfao

    def __call__(self, n):
        return self.dfao(n)

    def values(self, indices):
        return self.dfao.eval_many(indices)


def evaluate(d: Dfao, n: int) -> Value:
    return d(n)


def constant_dfao(value, base: int) -> Dfao:
    return Dfao(base, [[0] * base], [Value.of(value)])


# ---------------------------------------------------------------------------
# kernels


@dataclass(frozen=True)
class KernelTable:
    """Truncated base-``base`` kernel: class ``i`` stands for n -> f(n*base**k + r)."""

    base: int
    representatives: tuple
    edges: tuple
    outputs: tuple
    horizon: int
    max_states: int

    def __len__(self):
        return len(self.representatives)

    def class_of(self, k: int, r: int) -> int:
        c = 0
        for _ in range(k):
            r, digit = divmod(r, self.base)
            c = self.edges[c][digit]
        return c


def kernel_closure(f, base: int, T: int = DEFAULT_HORIZON,
                   max_states: int = DEFAULT_MAX_STATES) -> KernelTable:
    """Breadth-first closure of the ``base``-kernel of ``f`` under truncation ``T``.

    Two subsequences are identified when they agree on their first ``T`` terms.
    Raises BudgetExceeded as soon as more than ``max_states`` classes appear.
    """
    if base < 2 or T < 1:
        raise ValueError("need base >= 2 and T >= 1")
    f = as_oracle(f)
    first = tuple(f.values(range(T)))
    index = {first: 0}
    reps = [(0, 0)]
    outputs = [first[0]]
    edges = []
    i = 0
    while i < len(reps):
        k, r = reps[i]
        place = base**k
        step = place * base
        row = []
        for digit in range(base):
            r2 = digit * place + r
            sig = tuple(f.values(range(r2, r2 + step * T, step)))
            cid = index.get(sig)
            if cid is None:
                cid = len(reps)
                if cid >= max_states:
                    raise BudgetExceeded(
                        f"more than {max_states} kernel classes in base {base} (T={T})",
                        witness=(k + 1, r2))
                index[sig] = cid
                reps.append((k + 1, r2))
                outputs.append(sig[0])
            row.append(cid)
        edges.append(tuple(row))
        i += 1
    return KernelTable(base, tuple(reps), tuple(edges), tuple(outputs), T, max_states)


def dfao_from_kernel(kt: KernelTable) -> Dfao:
    try:
        return Dfao(kt.base, kt.edges, kt.outputs, 0)
    except ZeroInstability as exc:
        raise ZeroInstability(f"kernel table is not zero-stable; raise T ({exc})",
                              witness=exc.witness) from None


def automaton_for(f, base: int, T: int = DEFAULT_HORIZON, max_states: int = DEFAULT_MAX_STATES,
                  verify_to: int = 10**5, T_cap: int = 1 << 15) -> Dfao:
    """Kernel automaton for ``f`` certified by eval comparison on ``[0, verify_to]``.

    A failed comparison means the truncation merged distinct kernel elements,
    so ``T`` is doubled until it passes or exceeds ``T_cap``.
    """
    f = as_oracle(f)
    expected = f.values(range(verify_to + 1))
    while True:
        d = minimize(dfao_from_kernel(kernel_closure(f, base, T, max_states)))
        got = d.eval_many(range(verify_to + 1))
        bad = next((n for n, (x, y) in enumerate(zip(got, expected)) if x is not y), None)
        if bad is None:
            return d
        if T * 2 > T_cap:
            raise BudgetExceeded(f"kernel automaton disagrees with oracle at n={bad} "
                                 f"even with T={T}", witness=bad)
        T *= 2


# ---------------------------------------------------------------------------
# constructions


def minimize(d: Dfao) -> Dfao:
    """Moore partition refinement; result is pruned and in canonical order."""
    d = d.canonical()
    n = d.num_states
    ids: dict = {}
    block = [ids.setdefault(d.outputs[s], len(ids)) for s in range(n)]
    count = len(ids)
    while True:
        ids = {}
        new = [ids.setdefault((block[s],) + tuple(block[t] for t in d.delta[s]), len(ids))
               for s in range(n)]
        if len(ids) == count:
            break
        block, count = new, len(ids)
    rep = {}
    for s in range(n):
        rep.setdefault(block[s], s)
    delta = [[block[t] for t in d.delta[rep[b]]] for b in range(count)]
    outputs = [d.outputs[rep[b]] for b in range(count)]
    return Dfao(d.base, delta, outputs, block[d.initial]).canonical()


def map_values(d: Dfao, pi: Mapping | Callable) -> Dfao:
    """Apply ``pi`` to every output."""
    fn = pi.__getitem__ if isinstance(pi, Mapping) else pi
    return Dfao(d.base, d.delta, [Value.of(fn(v)) for v in d.outputs], d.initial)


def product(d1: Dfao, d2: Dfao) -> Dfao:
    """Pointwise product via the reachable pair automaton."""
    if d1.base != d2.base:
        raise ValueError("product needs equal bases")
    start = (d1.initial, d2.initial)
    index = {start: 0}
    order = [start]
    delta = []
    i = 0
    while i < len(order):
        s1, s2 = order[i]
        row = []
        for digit in range(d1.base):
            t = (d1.delta[s1][digit], d2.delta[s2][digit])
            if t not in index:
                index[t] = len(order)
                order.append(t)
            row.append(index[t])
        delta.append(row)
        i += 1
    outputs = [d1.outputs[a] * d2.outputs[b] for a, b in order]
    return Dfao(d1.base, delta, outputs, 0)


def _int_root(n: int, k: int) -> int:
    r = round(n ** (1.0 / k))
    for c in (r - 1, r, r + 1):
        if c >= 2 and c**k == n:
            return c
    raise ValueError(f"{n} is not a perfect {k}-th power")


def base_power(d: Dfao, k: int, direction: str = "up",
               max_states: int = DEFAULT_MAX_STATES) -> Dfao:
    """Re-express ``d`` in base ``base**k`` (up) or base ``base**(1/k)`` (down)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if k == 1:
        return d
    if direction == "up":
        big = d.base**k
        delta = []
        for s in range(d.num_states):
            row = []
            for digit in range(big):
                t = s
                for _ in range(k):
                    digit, r = divmod(digit, d.base)
                    t = d.delta[t][r]
                row.append(t)
            delta.append(row)
        return Dfao(big, delta, d.outputs, d.initial).canonical()
    if direction != "down":
        raise ValueError("direction must be 'up' or 'down'")
    mu = _int_root(d.base, k)
    # state (q, j, s): j low digits of the current big digit read so far, worth s
    start = (d.initial, 0, 0)
    index = {start: 0}
    order = [start]
    delta = []
    i = 0
    while i < len(order):
        q, j, s = order[i]
        row = []
        for x in range(mu):
            s2 = s + x * mu**j
            t = (d.delta[q][s2], 0, 0) if j + 1 == k else (q, j + 1, s2)
            if t not in index:
                index[t] = len(order)
                order.append(t)
            row.append(index[t])
        delta.append(row)
        i += 1
    outputs = [d.outputs[q] if j == 0 else d.outputs[d.delta[q][s]] for q, j, s in order]
    result = minimize(Dfao(mu, delta, outputs, 0))
    if result.num_states > max_states:
        raise BudgetExceeded(f"base-{mu} automaton needs {result.num_states} states",
                             witness=result.num_states)
    return result


def restrict_progression(d: Dfao, a: int, b: int) -> Dfao:
    """Automaton for ``n -> f(a*n + b)`` using a carry-augmented product."""
    if a < 1 or b < 0:
        raise ValueError("need a >= 1 and b >= 0")
    base = d.base
    start = (b, d.initial)
    index = {start: 0}
    order = [start]
    delta = []
    i = 0
    while i < len(order):
        c, q = order[i]
        row = []
        for x in range(base):
            t = a * x + c
            nxt = (t // base, d.delta[q][t % base])
            if nxt not in index:
                index[nxt] = len(order)
                order.append(nxt)
            row.append(index[nxt])
        delta.append(row)
        i += 1
    # leftover carry c is written out as the high digits of a*n + b
    outputs = [d.outputs[d.run(c, q)] for c, q in order]
    return Dfao(base, delta, outputs, 0)


@dataclass(frozen=True)
class PumpWitness:
    """``n = x*b**(l1+l2) + y*b**l1 + z``; the ``y`` block may be repeated."""

    base: int
    x: int
    y: int
    z: int
    l1: int
    l2: int
    l3: int

    @property
    def n(self) -> int:
        return self.pumped(1)

    def pumped(self, k: int) -> int:
        b, l1, l2 = self.base, self.l1, self.l2
        rep = (b ** (k * l2) - 1) // (b**l2 - 1)
        return self.x * b ** (l1 + k * l2) + self.y * b**l1 * rep + self.z

    def validate(self, f, ks=range(9)) -> int | None:
        """First ``k`` whose pumped value differs from ``f(n)``, or None."""
        target = f(self.n)
        for k in ks:
            if f(self.pumped(k)) != target:
                return k
        return None


def pump_witness(d: Dfao, n: int) -> PumpWitness:
    """Split ``n`` at the first repeated state of its digit run."""
    base = d.base
    if n < base**d.num_states:
        raise NoRepetition(f"n={n} is below base**|Q| = {base ** d.num_states}", witness=n)
    ds = digits(n, base)
    seen = {d.initial: 0}
    s = d.initial
    for j, digit in enumerate(ds, start=1):
        s = d.delta[s][digit]
        if s in seen:
            i = seen[s]
            break
        seen[s] = j
    else:  # pragma: no cover - excluded by the pigeonhole bound above
        raise NoRepetition("no repeated state", witness=n)
    l1, l2 = i, j - i
    return PumpWitness(
        base=base,
        x=n // base**j,
        y=(n // base**l1) % base**l2,
        z=n % base**l1,
        l1=l1,
        l2=l2,
        l3=len(ds) - j,
    )


def eventual_period_detect(f, H: int, start: int = 0) -> tuple[int, int] | None:
    """Smallest preperiod ``n0`` (then smallest ``d``) with ``f(n + d) == f(n)``
    for ``n0 <= n <= H - d``.

    Only terms ``start..H`` are inspected (``f`` may also be that list of
    terms), and the periodic tail has to show at least three full periods.
    Returns None when nothing qualifies.
    """
    if H < 4:
        raise ValueError("H must be at least 4")
    seq = list(f) if isinstance(f, (list, tuple)) else as_oracle(f).values(range(start, H + 1))
    codes: dict = {}
    rev = [codes.setdefault(v, len(codes)) for v in reversed(seq)]
    m = len(rev)
    # prefix function of the reversed sequence gives periods of every suffix
    pi = [0] * m
    for i in range(1, m):
        j = pi[i - 1]
        while j and rev[i] != rev[j]:
            j = pi[j - 1]
        if rev[i] == rev[j]:
            j += 1
        pi[i] = j
    # longest suffix showing three full periods of its own minimal period
    for length in range(m, 0, -1):
        per = length - pi[length - 1]
        if length >= 3 * per:
            return start + m - length, per
    return None


def remove_p_powers(d: Dfao) -> Dfao:
    """Automaton for ``n -> f(n / p**nu_p(n))``: a fresh start state loops on 0."""
    if not is_prime(d.base):
        raise ValueError("remove_p_powers needs a prime base")
    n = d.num_states
    row = list(d.delta[d.initial])
    row[0] = n
    return Dfao(d.base, list(d.delta) + [row], list(d.outputs) + [d.outputs[d.initial]], n).canonical()
