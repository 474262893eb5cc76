import json
import math

import pytest

from autoseq.arithmetic import characters_mod, principal
from autoseq.automata import minimize, product
from autoseq.constructors import (Certified, Counterexample, EventuallyPeriodicSeq,
                                  FinitelySupported, FiniteSupport, Periodic, PeriodicMult,
                                  TheoremFormSpec, dfao_for_f1_part, dfao_for_f2_part,
                                  dichotomy_f2, is_completely_multiplicative,
                                  is_multiplicative, mult_spec_from_json, theorem_form)
from autoseq.corpus import (even_power_indicator, period_doubling, spec_corpus,
                            zero_mean_example)
from autoseq.errors import NotMultiplicative, SpecInvalid
from autoseq.sequences import constant
from autoseq.values import I, MINUS_ONE, ONE, ZERO, Value, root_of_unity

from helpers import close, nu_direct, pd_direct, theorem_value


@pytest.fixture(scope="module")
def corpus():
    return spec_corpus()


def test_eventually_periodic_canonical_form():
    s = EventuallyPeriodicSeq((1, -1, 1), (-1, 1, -1, 1))
    assert s.preperiod == ()
    assert s.period == (ONE, MINUS_ONE)
    s = EventuallyPeriodicSeq((1, 5, 1, -1), (1, -1, 1, -1))
    assert s.preperiod == (ONE, Value(5))
    assert s.period == (ONE, MINUS_ONE)
    assert s.values(6) == [ONE, Value(5), ONE, MINUS_ONE, ONE, MINUS_ONE]
    assert EventuallyPeriodicSeq((), (2, 2, 2)).period == (Value(2),)
    with pytest.raises(ValueError):
        EventuallyPeriodicSeq((1,), ())


def test_periodic_mult_certificate():
    chi = characters_mod(12)[2]
    f = PeriodicMult.from_character(chi)
    assert f.period == 12
    assert f.character() == (12, 2)
    with pytest.raises(NotMultiplicative):
        PeriodicMult(5, (0, 1, -1, 1, 1))
    assert PeriodicMult(4, (0, 1, 0, 1)).period == 2


def test_finite_support_enumeration():
    f = FiniteSupport({(2, 1): 3, (3, 2): -1, (2, 3): I})
    assert f.support == {1: ONE, 2: Value(3), 8: I, 9: MINUS_ONE, 18: Value.of(-3),
                         72: I.conjugate()}
    assert f(4) is ZERO
    assert f.bound == 72


def test_theorem_form_examples():
    a = theorem_form(period_doubling())
    assert all(a(n) is Value.of(pd_direct(n)) for n in range(1, 5000))
    ones = TheoremFormSpec(2, EventuallyPeriodicSeq((), (1,)),
                           PeriodicMult.from_character(principal(2)))
    b = theorem_form(TheoremFormSpec(2, EventuallyPeriodicSeq((), (1,)),
                                     PeriodicMult(1, (1,)).zero_extend(2)))
    assert all(theorem_form(ones)(n) is ONE for n in range(1, 1000))
    assert all(b(n) is ONE for n in range(1, 1000))
    c = theorem_form(even_power_indicator())
    support = [n for n in range(1, 5000) if c(n)]
    assert support == [4**m for m in range(7)]
    assert all(c(n) is ONE for n in support)


def test_theorem_form_matches_direct_formula(corpus):
    for spec in corpus:
        a = theorem_form(spec)
        got = a.values(range(1, 3000))
        for n, v in enumerate(got, start=1):
            assert close(complex(v), theorem_value(spec, n))


def test_spec_validation():
    f1 = EventuallyPeriodicSeq((), (1, -1))
    with pytest.raises(SpecInvalid):
        TheoremFormSpec(2, EventuallyPeriodicSeq((), (-1, 1)), FiniteSupport(()))
    with pytest.raises(SpecInvalid):
        TheoremFormSpec(2, f1, PeriodicMult.from_character(principal(3)))
    with pytest.raises(SpecInvalid):
        TheoremFormSpec(3, f1, FiniteSupport({(3, 1): 2}))
    with pytest.raises(SpecInvalid):
        TheoremFormSpec(4, f1, FiniteSupport(()))


def test_spec_json_round_trip(corpus):
    for spec in corpus:
        doc = json.loads(json.dumps(spec.to_json()))
        assert TheoremFormSpec.from_json(doc) == spec
    with pytest.raises(SpecInvalid):
        TheoremFormSpec.from_json({"p": 2, "f1": {"period": [1]}, "f2": {"kind": "finite",
                                   "prime_powers": {}}, "colour": "red"})


def test_character_specs_are_zero_extended():
    f2 = mult_spec_from_json({"kind": "periodic", "modulus": 3, "character_index": 1}, p=2)
    assert f2.period == 6
    assert all(f2(n) is ZERO for n in range(0, 12, 2))
    assert f2(5) is characters_mod(3)[1](5)


def test_dfao_for_f1_part_examples():
    d = dfao_for_f1_part(2, EventuallyPeriodicSeq((), (1, -1)))
    assert all(d(n) is Value.of(pd_direct(n)) for n in range(1, 10**5))
    assert minimize(dfao_for_f1_part(3, EventuallyPeriodicSeq((), (1,)))).num_states <= 2
    d = dfao_for_f1_part(5, EventuallyPeriodicSeq((1,), (0,)))
    assert all(d(n) is (ZERO if n % 5 == 0 else ONE) for n in range(1, 10**4))


def test_dfao_for_f1_part_state_bound(corpus):
    for spec in corpus:
        f1 = spec.f1
        d = dfao_for_f1_part(spec.p, f1)
        bound = len(f1.preperiod) + len(f1.period) + len(set(f1.alphabet)) + 1
        assert d.num_states <= bound
        for n in range(1, 3000):
            assert d(n) is f1(nu_direct(spec.p, n))


def test_dfao_for_f2_part_examples():
    d = dfao_for_f2_part(2, PeriodicMult.from_character(principal(2)))
    assert all(d(n) is ONE for n in range(1, 10**4))
    chi4 = PeriodicMult.from_character(characters_mod(4)[1])
    d = dfao_for_f2_part(2, chi4)
    for n in range(1, 10**5, 7):
        m = n >> nu_direct(2, n)
        assert d(n) is chi4(m)
    d = dfao_for_f2_part(2, FiniteSupport(()))
    assert [n for n in range(1, 5000) if d(n)] == [2**k for k in range(13)]


def test_product_closure(corpus):
    for spec in corpus:
        d = minimize(product(dfao_for_f1_part(spec.p, spec.f1),
                             dfao_for_f2_part(spec.p, spec.f2)))
        assert d.eval_many(range(1, 10**5 + 1)) == theorem_form(spec).values(range(1, 10**5 + 1))


def test_is_multiplicative_examples():
    assert is_multiplicative(theorem_form(period_doubling()), 4096) == Certified(4096)
    phases = lambda n: root_of_unity(n % 3 / 3) if n else ZERO
    verdict = is_multiplicative(phases, 100)
    assert isinstance(verdict, Counterexample)
    assert verdict.m * verdict.n <= 10
    m, n = verdict.m, verdict.n
    assert math.gcd(m, n) == 1 and phases(m * n) is not phases(m) * phases(n)
    assert is_multiplicative(constant(ONE), 100)


def test_is_completely_multiplicative_examples():
    chi = theorem_form(TheoremFormSpec(2, EventuallyPeriodicSeq((1,), (0,)),
                                       PeriodicMult.from_character(principal(2))))
    assert is_completely_multiplicative(chi, 1000)
    assert is_completely_multiplicative(theorem_form(period_doubling()), 4096)
    a = theorem_form(TheoremFormSpec(2, EventuallyPeriodicSeq((), (1, -1, 1)),
                                     PeriodicMult.from_character(principal(2))))
    verdict = is_completely_multiplicative(a, 1000)
    assert isinstance(verdict, Counterexample)
    # a(2) = -1, a(4) = 1 = a(2)^2, a(8) = 1 but a(2) a(4) = -1
    assert (verdict.m, verdict.n) == (2, 4)
    assert a(8) is not a(2) * a(4)


def test_every_corpus_sequence_is_multiplicative(corpus):
    for spec in corpus:
        assert is_multiplicative(theorem_form(spec), 4096) == Certified(4096)


def test_toeplitz_identity_for_f1(corpus):
    for spec in corpus[:20]:
        p = spec.p
        for n in range(1, 501):
            for s in range(1, 201):
                assert spec.f1(nu_direct(p, n + s * p * n)) is spec.f1(nu_direct(p, n))


def test_dichotomy_examples():
    assert dichotomy_f2(PeriodicMult.from_character(principal(3)), 100) == Periodic(3)
    fs = FiniteSupport({(2, 2): -1})
    assert dichotomy_f2(fs, 100) == FinitelySupported(4)
    assert dichotomy_f2(PeriodicMult.from_character(characters_mod(4)[1]), 100) == Periodic(4)


def test_dichotomy_recovers_corpus_f2(corpus):
    checked = 0
    for spec in corpus:
        if isinstance(spec.f2, PeriodicMult):
            assert dichotomy_f2(spec.f2, 2000) == Periodic(spec.f2.period)
        elif spec.f2.bound <= 10**5:
            # the horizon has to reach past the last nonzero term
            assert dichotomy_f2(spec.f2, spec.f2.bound + 10) == FinitelySupported(spec.f2.bound)
            checked += 1
    assert checked >= 30


def test_named_examples_are_valid():
    for spec in (period_doubling(), even_power_indicator(), zero_mean_example()):
        assert is_multiplicative(theorem_form(spec), 1024)
