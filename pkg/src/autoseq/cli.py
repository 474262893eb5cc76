"""Command-line front end.

Exit status: 0 for success or passing verdicts, 1 for failing verdicts
(the report carries the witness), 2 for usage and input errors.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields

from . import analysis, classifier
from .automata import Dfao, DfaoOracle, kernel_closure, minimize, pump_witness
from .constructors import (Counterexample, TheoremFormSpec, dfao_for_spec,
                           is_completely_multiplicative, is_multiplicative, theorem_form)
from .corpus import NAMED, random_spec
from .errors import AutoseqError, BudgetExceeded, NoRepetition, SpecInvalid
from .sequences import perfect_square_indicator
from .values import value_doc

COMMANDS = ("gen", "check-mult", "decompose", "classify", "mean", "kernel", "minimize",
            "pump", "toeplitz", "density", "complexity", "export-dot")
FORMATS = ("json", "csv", "dot", "plain")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    spec: str | None = None
    dfao: str | None = None
    spec_from_dfao: str | None = None
    named: str | None = None
    random: bool = False
    seed: int = 0
    format: str = "json"
    H: int | None = None
    N: int | None = None
    T: int = 2048
    max_states: int = 512
    B: int = 256
    threads: int = 1
    count: int = 16
    start: int = 1
    p: int | None = None
    base: int | None = None
    L: int = 8
    S: int = 200
    n: int | None = None
    complete: bool = False
    Ns: tuple = (10**3, 10**4, 10**5, 10**6)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.format not in FORMATS:
            raise UsageError(f"unknown format {self.format!r}")
        for name in ("H", "N", "T", "max_states", "B", "threads", "count", "L", "S"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise UsageError(f"{name} must be positive")
        if self.start < 0:
            raise UsageError("start must be >= 0")
        if any(x < 1 for x in self.Ns):
            raise UsageError("every N must be positive")

    @classmethod
    def from_dict(cls, doc: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise UsageError(f"unknown config fields: {sorted(unknown)}")
        return cls(**doc)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("AUTOSEQ_THREADS", "1")))
    except ValueError:
        raise UsageError("AUTOSEQ_THREADS must be an integer") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="autoseq", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def source(p, dfao_ok=True, fmt="json"):
        g = p.add_mutually_exclusive_group()
        g.add_argument("--spec", help="sequence spec JSON file")
        if dfao_ok:
            g.add_argument("--dfao", help="DFAO JSON file")
        g.add_argument("--named", choices=sorted(NAMED) + (["squares"] if dfao_ok else []))
        g.add_argument("--random", action="store_true", help="seeded random spec")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--format", choices=FORMATS, default=fmt)

    p = sub.add_parser("gen", help="print terms")
    source(p)
    p.add_argument("--count", type=int, default=16)
    p.add_argument("--start", type=int, default=1)

    p = sub.add_parser("check-mult", help="scan for multiplicativity counterexamples")
    source(p)
    p.add_argument("--N", type=int, default=4096)
    p.add_argument("--complete", action="store_true", help="check all pairs, not only coprime ones")

    p = sub.add_parser("decompose", help="recover (p, f1, f2)")
    source(p)
    p.add_argument("--spec-from-dfao", dest="spec_from_dfao", help="DFAO JSON to decompose")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--H", type=int, default=10**5)

    p = sub.add_parser("classify", help="sparse or dense fit")
    source(p)
    p.add_argument("--B", type=int, default=256)
    p.add_argument("--H", type=int, default=10**4)
    p.add_argument("--base", type=int)

    p = sub.add_parser("mean", help="closed-form mean against partial sums")
    source(p, dfao_ok=False)
    p.add_argument("--N", type=int, action="append", dest="Ns")

    p = sub.add_parser("kernel", help="kernel closure size")
    source(p)
    p.add_argument("--base", type=int)
    p.add_argument("--T", type=int, default=2048)
    p.add_argument("--max-states", dest="max_states", type=int, default=512)

    source(sub.add_parser("minimize", help="minimal DFAO"))
    source(sub.add_parser("export-dot", help="Graphviz rendering"), fmt="dot")

    p = sub.add_parser("pump", help="pumping witness")
    source(p)
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("toeplitz", help="check a(n + s*p*n*c) = a(n)")
    source(p, dfao_ok=False)
    p.add_argument("--N", type=int, default=500)
    p.add_argument("--S", type=int, default=200)

    p = sub.add_parser("density", help="support density per decade")
    source(p)
    p.add_argument("--N", type=int, default=10**6)

    p = sub.add_parser("complexity", help="factor counts and gap statistics")
    source(p)
    p.add_argument("--L", type=int, default=8)
    p.add_argument("--N", type=int, default=10**5)
    return parser


# ---------------------------------------------------------------------------
# inputs


def _load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


def load_spec(cfg: RunConfig) -> TheoremFormSpec | None:
    if cfg.spec:
        return TheoremFormSpec.from_json(_load_json(cfg.spec))
    if cfg.named and cfg.named in NAMED:
        return NAMED[cfg.named]()
    if cfg.random:
        return random_spec(random.Random(cfg.seed))
    return None


def load_dfao(cfg: RunConfig) -> Dfao | None:
    path = cfg.dfao or cfg.spec_from_dfao
    if not path:
        return None
    try:
        return Dfao.from_json(_load_json(path))
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"malformed DFAO document: {exc}") from None


def load_sequence(cfg: RunConfig):
    d = load_dfao(cfg)
    if d is not None:
        return DfaoOracle(d), d.base, None
    if cfg.named == "squares":
        return perfect_square_indicator(), 2, None
    spec = load_spec(cfg)
    if spec is None:
        raise UsageError("no input given (use --spec, --dfao, --named or --random)")
    return theorem_form(spec), spec.p, spec


def require_dfao(cfg: RunConfig) -> Dfao:
    d = load_dfao(cfg)
    if d is not None:
        return d
    spec = load_spec(cfg)
    if spec is None:
        raise UsageError("this command needs an automaton or a spec")
    return dfao_for_spec(spec)


# ---------------------------------------------------------------------------
# commands; each returns (document, text for plain/csv/dot, exit code)


def cmd_gen(cfg):
    a, _, _ = load_sequence(cfg)
    terms = a.values(range(cfg.start, cfg.start + cfg.count))
    doc = {"start": cfg.start, "terms": [value_doc(v) for v in terms]}
    text = {"plain": ",".join(str(v) for v in terms) + "\n",
            "csv": analysis._csv(["n", "value"], [(cfg.start + i, str(v)) for i, v in enumerate(terms)])}
    return doc, text, 0


def _verdict_text(doc: dict) -> str:
    return " ".join(f"{k}={v}" for k, v in doc.items()) + "\n"


def cmd_check_mult(cfg):
    a, _, _ = load_sequence(cfg)
    check = is_completely_multiplicative if cfg.complete else is_multiplicative
    verdict = check(a, cfg.N)
    doc = verdict.to_json()
    doc["complete"] = cfg.complete
    return doc, {"plain": _verdict_text(doc)}, 1 if isinstance(verdict, Counterexample) else 0


def cmd_decompose(cfg):
    a, _, _ = load_sequence(cfg)
    try:
        dec = classifier.decompose(a, cfg.p, cfg.H)
    except AutoseqError as exc:
        doc = {"verdict": type(exc).__name__, "detail": str(exc), "witness": _jsonable(exc.witness)}
        return doc, {"plain": _verdict_text(doc)}, 1
    doc = dec.to_json()
    return doc, {"plain": json.dumps(doc["spec"], sort_keys=True) + "\n"}, 0


def cmd_classify(cfg):
    a, base, _ = load_sequence(cfg)
    try:
        cls = classifier.classify_sparse_dense(a, cfg.B, cfg.H, cfg.base or base)
    except AutoseqError as exc:
        doc = {"verdict": type(exc).__name__, "detail": str(exc), "witness": _jsonable(exc.witness)}
        return doc, {"plain": _verdict_text(doc)}, 1
    doc = cls.to_json()
    return doc, {"plain": f"{cls.verdict} modulus={cls.modulus}\n"}, 0


def cmd_mean(cfg):
    spec = load_spec(cfg)
    if spec is None:
        raise UsageError("mean needs a spec")
    a = theorem_form(spec)
    exact = analysis.mean_formula_exact(spec)
    formula = exact.to_complex()
    with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
        empiricals = list(pool.map(lambda N: analysis.empirical_mean(a, N), cfg.Ns))
    trace = [analysis.MeanReport(formula, e, N) for N, e in zip(cfg.Ns, empiricals)]
    rational = exact.as_rational()
    doc = {"formula": {"real": _num(formula.real), "imag": _num(formula.imag),
                       "exact": None if rational is None else str(rational)},
           "trace": [dict(zip(["N", "real", "imag", "abs_error"], r.row())) for r in trace]}
    plain = f"formula {_num(formula.real)} {_num(formula.imag)}\n" + "".join(
        " ".join(map(str, r.row())) + "\n" for r in trace)
    return doc, {"csv": analysis.mean_csv(trace), "plain": plain}, 0


def cmd_kernel(cfg):
    a, base, _ = load_sequence(cfg)
    base = cfg.base or base
    try:
        kt = kernel_closure(a, base, cfg.T, cfg.max_states)
    except BudgetExceeded as exc:
        doc = {"verdict": "BudgetExceeded", "base": base, "T": cfg.T, "max_states": cfg.max_states,
               "detail": str(exc), "witness": _jsonable(exc.witness)}
        return doc, {"plain": _verdict_text(doc)}, 1
    doc = {"verdict": "Closed", "base": base, "T": cfg.T, "classes": len(kt),
           "representatives": [list(r) for r in kt.representatives],
           "outputs": [value_doc(v) for v in kt.outputs]}
    return doc, {"plain": f"classes={len(kt)}\n"}, 0


def cmd_minimize(cfg):
    d = minimize(require_dfao(cfg))
    return d.to_json(), {"dot": d.to_dot(), "plain": f"states={d.num_states}\n"}, 0


def cmd_export_dot(cfg):
    d = require_dfao(cfg)
    return d.to_json(), {"dot": d.to_dot(), "plain": d.to_dot()}, 0


def cmd_pump(cfg):
    d = require_dfao(cfg)
    try:
        w = pump_witness(d, cfg.n)
    except NoRepetition as exc:
        raise UsageError(str(exc)) from None
    failed = w.validate(d)
    doc = {"n": cfg.n, "base": w.base, "x": w.x, "y": w.y, "z": w.z,
           "l1": w.l1, "l2": w.l2, "l3": w.l3, "checked_k": list(range(9)),
           "verdict": "Pass" if failed is None else "Fail", "failed_k": failed}
    return doc, {"plain": _verdict_text(doc)}, 0 if failed is None else 1


def cmd_toeplitz(cfg):
    spec = load_spec(cfg)
    if spec is None:
        raise UsageError("toeplitz needs a spec")
    c = analysis.toeplitz_period_factor(spec)
    res = analysis.toeplitz_check(theorem_form(spec), cfg.N, cfg.S, spec.p, c)
    doc = res.to_json()
    doc.update({"N": cfg.N, "S": cfg.S, "p": spec.p, "c": c})
    return doc, {"plain": _verdict_text(doc)}, 0 if res else 1


def cmd_density(cfg):
    a, _, _ = load_sequence(cfg)
    rep = analysis.support_density(a, cfg.N)
    return rep.to_json(), {"csv": analysis.density_csv(rep), "plain": analysis.density_csv(rep)}, 0


def cmd_complexity(cfg):
    a, _, _ = load_sequence(cfg)
    rep = analysis.word_complexity(a, cfg.L, cfg.N)
    return rep.to_json(), {"csv": analysis.complexity_csv(rep),
                           "plain": analysis.complexity_csv(rep)}, 0


HANDLERS = {
    "gen": cmd_gen, "check-mult": cmd_check_mult, "decompose": cmd_decompose,
    "classify": cmd_classify, "mean": cmd_mean, "kernel": cmd_kernel, "minimize": cmd_minimize,
    "pump": cmd_pump, "toeplitz": cmd_toeplitz, "density": cmd_density,
    "complexity": cmd_complexity, "export-dot": cmd_export_dot,
}


def _num(x) -> str:
    import mpmath

    return mpmath.nstr(x, 30)


def _jsonable(x):
    if isinstance(x, (int, str, float)) or x is None:
        return x
    if isinstance(x, (tuple, list)):
        return [_jsonable(y) for y in x]
    return str(x)


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    opts = {k: v for k, v in vars(ns).items() if v is not None}
    if "Ns" in opts:
        opts["Ns"] = tuple(opts["Ns"])
    try:
        opts["threads"] = _threads()
        cfg = RunConfig.from_dict(opts)
        doc, texts, code = HANDLERS[cfg.command](cfg)
    except (UsageError, SpecInvalid) as exc:
        print(f"autoseq: error: {exc}", file=sys.stderr)
        return 2
    if cfg.format == "json":
        out.write(json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n")
    elif cfg.format in texts:
        out.write(texts[cfg.format])
    else:
        print(f"autoseq: error: {cfg.command} has no {cfg.format} output", file=sys.stderr)
        return 2
    return code


def main(argv=None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
