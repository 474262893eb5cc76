"""Multiplicative automatic sequences: automata, decomposition and classification."""

from .analysis import (empirical_mean, mean_formula, mean_formula_exact, support_density,
                       toeplitz_check, word_complexity)
from .arithmetic import (DenseData, DirichletCharacter, characters_mod, crt_split, induce, nu,
                         pbar)
from .automata import (Dfao, KernelTable, PumpWitness, base_power, dfao_from_kernel,
                       eventual_period_detect, evaluate, kernel_closure, map_values, minimize,
                       product, pump_witness, remove_p_powers, restrict_progression)
from .classifier import (Classification, Decomposition, classify_sparse_dense,
                         completely_multiplicative_form, decompose, dense_product_form_check,
                         find_base_prime, periodic_factor_check, sparse_support_analysis)
from .constructors import (EventuallyPeriodicSeq, FiniteSupport, PeriodicMult, TheoremFormSpec,
                           dfao_for_f1_part, dfao_for_f2_part, dichotomy_f2,
                           is_completely_multiplicative, is_multiplicative, theorem_form)
from .errors import AutoseqError
from .sequences import SequenceOracle
from .values import ONE, ZERO, CyclotomicNumber, Value

__all__ = [
    "empirical_mean", "mean_formula", "mean_formula_exact", "support_density", "toeplitz_check",
    "word_complexity", "DenseData", "DirichletCharacter", "characters_mod", "crt_split", "induce",
    "nu", "pbar", "Dfao", "KernelTable", "PumpWitness", "base_power", "dfao_from_kernel",
    "eventual_period_detect", "evaluate", "kernel_closure", "map_values", "minimize", "product",
    "pump_witness", "remove_p_powers", "restrict_progression", "Classification", "Decomposition",
    "classify_sparse_dense", "completely_multiplicative_form", "decompose",
    "dense_product_form_check", "find_base_prime", "periodic_factor_check",
    "sparse_support_analysis", "EventuallyPeriodicSeq", "FiniteSupport", "PeriodicMult",
    "TheoremFormSpec", "dfao_for_f1_part", "dfao_for_f2_part", "dichotomy_f2",
    "is_completely_multiplicative", "is_multiplicative", "theorem_form", "AutoseqError",
    "SequenceOracle", "ONE", "ZERO", "CyclotomicNumber", "Value",
]
