"""Command line interface.

One binary, nine subcommands.  Generation subcommands print the family
text format by default (``--json`` for the JSON form); analysis
subcommands print a JSON report envelope {command, inputs, results,
timings, seed} with stable key order.

Exit codes: 0 success or found; 3 proven absent; 4 budget or trials
exhausted; 5 input error.  The environment variable SUNFLOWER_BUDGET
overrides the default search budgets.

Families lying on a split are interpreted against the contiguous split of
their universe (strips are consecutive blocks); generate inputs with
``gen-random --on-split`` or ``gen-extremal`` to match.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction

from . import basesets as bs
from .errors import (BudgetExceededError, ContractViolationError,
                     GammaPreconditionError, TrialsExhaustedError)
from .extremal import build_extremal
from .families import (SetFamily, Split, family_from_json_obj,
                       family_from_text, family_to_text, pad_universe)
from .gamma import check_gamma
from .harness import generate_random_family, verify_bound_experiment
from .splits import find_good_split, transversal_count_brute, transversal_formula
from .sunflowers import (SunflowerCertificate, extract_disjoint_via_gamma,
                         find_sunflower_exact, verify_certificate)

EXIT_OK = 0
EXIT_ABSENT = 3
EXIT_BUDGET = 4
EXIT_INPUT = 5


def _read_family(path: str) -> SetFamily:
    text = sys.stdin.read() if path == "-" else open(path).read()
    if text.lstrip().startswith("{"):
        return family_from_json_obj(json.loads(text))
    return family_from_text(text)


def _read_constants(path: str) -> bs.Constants:
    with open(path) as fh:
        return bs.constants_from_dict(json.load(fh))


def _emit(command: str, inputs: dict, results: dict, seed: int | None,
          t0: float) -> None:
    report = {"command": command, "inputs": inputs, "results": results,
              "timings": {"totalSeconds": time.perf_counter() - t0},
              "seed": seed}
    print(json.dumps(report, sort_keys=True, indent=2))


def _emit_family(family: SetFamily, as_json: bool) -> None:
    if as_json:
        print(json.dumps(family.to_json_obj(), sort_keys=True, indent=2))
    else:
        sys.stdout.write(family.to_text())


def _parse_labels(text: str) -> list[int]:
    text = text.strip()
    if not text:
        return []
    return [int(tok) for tok in text.split(",")]


def _contiguous_split(family: SetFamily, m: int) -> Split:
    return Split.contiguous(family.universe.n, m)


def _budget_default(default: int) -> int:
    env = os.environ.get("SUNFLOWER_BUDGET")
    return int(env) if env else default


def _cmd_gen_extremal(args) -> int:
    ef = build_extremal(args.k, args.m)
    _emit_family(ef.family, args.json)
    return EXIT_OK


def _cmd_gen_random(args) -> int:
    split = Split.contiguous(args.n, args.m) if args.on_split else None
    family = generate_random_family(args.n, args.m, args.size, args.seed,
                                    on_split=split)
    _emit_family(family, args.json)
    return EXIT_OK


def _cmd_find_sunflower(args) -> int:
    t0 = time.perf_counter()
    family = _read_family(args.family)
    inputs = {"k": args.k, "mode": "gamma" if args.gamma else "exact",
              "familySize": len(family), "n": family.universe.n}
    budget = _budget_default(1 << 22)
    if args.gamma is None:
        cert = find_sunflower_exact(family, args.k, node_budget=budget)
        found = cert is not None
        results = {"found": found, "provenAbsent": not found,
                   "certificate": cert.to_json_obj() if cert else None}
        if found:
            results["verified"] = verify_certificate(cert)
        _emit("find-sunflower", inputs, results, None, t0)
        return EXIT_OK if found else EXIT_ABSENT
    b = Fraction(args.gamma)
    core_labels = _parse_labels(args.core) if args.core else []
    inputs["b"] = str(b)
    inputs["core"] = core_labels
    work = family
    core = family.universe.set_of(core_labels)
    if core_labels:
        # quotient by the core: keep supersets, strip the core, extract
        # disjoint petals there, then put the core back
        restricted = family.restrict(core)
        if len(restricted) == 0:
            _emit("find-sunflower", inputs,
                  {"found": False, "provenAbsent": False,
                   "note": "no member contains the requested core"}, None, t0)
            return EXIT_ABSENT
        work = SetFamily.from_masks(
            family.universe, (u & ~core.bits for u in restricted.masks()),
            m=max(0, family.m - core.cardinality))
    cert = extract_disjoint_via_gamma(work, args.k, b)
    if cert is None:
        _emit("find-sunflower", inputs,
              {"found": False, "provenAbsent": False,
               "note": "greedy extraction stalled outside the guaranteed "
                       "regime"}, None, t0)
        return EXIT_BUDGET
    if core_labels:
        cert = SunflowerCertificate(
            tuple(family.universe.from_bits(p.bits | core.bits)
                  for p in cert.petals), core)
    results = {"found": True, "provenAbsent": False,
               "certificate": cert.to_json_obj(),
               "verified": verify_certificate(cert)}
    _emit("find-sunflower", inputs, results, None, t0)
    return EXIT_OK


def _cmd_check_gamma(args) -> int:
    t0 = time.perf_counter()
    family = _read_family(args.family)
    b = Fraction(args.b)
    report = check_gamma(family, b, budget=_budget_default(1 << 22))
    _emit("check-gamma",
          {"b": str(b), "familySize": len(family), "n": family.universe.n},
          report.to_json_obj(), None, t0)
    return EXIT_OK


def _cmd_split(args) -> int:
    t0 = time.perf_counter()
    family = _read_family(args.family)
    if args.pad_to:
        family = pad_universe(family, args.pad_to)
    inputs = {"mode": args.mode, "trials": args.trials,
              "familySize": len(family), "n": family.universe.n}
    try:
        result = find_good_split(family, mode=args.mode, trials=args.trials,
                                 seed=args.seed,
                                 enum_budget=_budget_default(1 << 20))
    except TrialsExhaustedError as exc:
        best = exc.best
        results = {"met": False,
                   "bestRetained": len(best.retained) if best else 0}
        _emit("split", inputs, results, args.seed, t0)
        return EXIT_BUDGET
    results = {
        "met": True,
        "split": [list(s.labels()) for s in result.split.strips],
        "retained": result.retained.to_json_obj(),
        "retainedSize": len(result.retained),
        "bound": [result.bound.numerator, result.bound.denominator],
        "stirlingFloor": result.stirling,
    }
    _emit("split", inputs, results, args.seed, t0)
    if args.emit_family:
        with open(args.emit_family, "w") as fh:
            fh.write(family_to_text(result.retained))
    return EXIT_OK


def _cmd_transversal_check(args) -> int:
    t0 = time.perf_counter()
    family = _read_family(args.family)
    brute = transversal_count_brute(family, args.j,
                                    budget=_budget_default(1 << 22))
    formula = transversal_formula(family, args.j)
    equal = Fraction(brute) == formula
    _emit("transversal-check",
          {"j": args.j, "familySize": len(family), "n": family.universe.n},
          {"brute": brute,
           "formula": [formula.numerator, formula.denominator],
           "equal": equal}, None, t0)
    return EXIT_OK if equal else 1


def _part_obj(part: bs.ElementaryPart) -> dict:
    return {"B": list(part.B.labels()), "Xprime": list(part.key),
            "size": len(part.T), "variant": part.variant}


def _write_trace(path: str, rows) -> None:
    with open(path, "w") as fh:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True) + "\n")


def _cmd_basesets(args) -> int:
    t0 = time.perf_counter()
    family = _read_family(args.family)
    cfg = _read_constants(args.constants)
    if cfg.fam_size is None:
        cfg = cfg.with_fam_size(len(family))
    split = _contiguous_split(family, cfg.m)
    if args.g_family:
        bases = _read_family(args.g_family)
        collection, skipped = bs.ComponentCollection.derive(
            family, split, args.mprime, bases)
        if len(skipped):
            print(f"warning: {len(skipped)} members match no anchor "
                  "and were dropped", file=sys.stderr)
    elif args.mprime == cfg.m:
        bases = family
        collection = bs.ComponentCollection.initial(family, split)
    else:
        raise ValueError("--g-family is required when --mprime is below m")
    inputs = {"mprime": args.mprime, "constants": cfg.to_json_obj(),
              "familySize": len(family)}
    try:
        out = bs.base_sets(args.mprime, bases, collection, cfg)
    except ContractViolationError as exc:
        if args.trace:
            _write_trace(args.trace, exc.trace)
        print(f"error: {exc}", file=sys.stderr)
        return 1
    results = {"r": out.r, "baseSets": out.base_sets.to_json_obj(),
               "family": out.family.to_json_obj(),
               "parts": [_part_obj(p) for p in out.parts],
               "extractions": len(out.trace)}
    _emit("basesets", inputs, results, None, t0)
    if args.trace:
        _write_trace(args.trace, out.trace)
    return EXIT_OK


def _cmd_process_r(args) -> int:
    t0 = time.perf_counter()
    family = _read_family(args.family)
    cfg = _read_constants(args.constants)
    if cfg.fam_size is None:
        cfg = cfg.with_fam_size(len(family))
    split = _contiguous_split(family, cfg.m)
    inputs = {"constants": cfg.to_json_obj(), "familySize": len(family)}
    try:
        result = bs.process_r(family, split, cfg)
    except ContractViolationError as exc:
        if args.trace:
            _write_trace(args.trace, exc.trace)
        print(f"error: {exc}", file=sys.stderr)
        return 1
    audit = bs.audit_terminal_bases(result, family, cfg)
    results = {
        "pHat": result.p_hat,
        "rHat": result.r_hat,
        "basesHat": result.bases_hat.to_json_obj(),
        "familyHat": result.family_hat.to_json_obj(),
        "steps": [{"p": s.p, "rIn": s.r_in, "rOut": s.output.r,
                   "extracted": len(s.output.family)} for s in result.steps],
        "audit": audit,
    }
    _emit("process-r", inputs, results, None, t0)
    if args.trace:
        _write_trace(args.trace, result.trace)
    return EXIT_OK


def _parse_range(text: str) -> list[int]:
    lo, _, hi = text.partition(":")
    if not _:
        return [int(lo)]
    return list(range(int(lo), int(hi) + 1))


def _cmd_verify_bound(args) -> int:
    report = verify_bound_experiment(
        _parse_range(args.k_range), _parse_range(args.m_range),
        args.trials, args.seed, node_budget=_budget_default(1 << 22))
    print(json.dumps(report.to_json_obj(), sort_keys=True, indent=2))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sunflower",
        description="Desk-scale sunflower combinatorics toolkit")
    parser.add_argument("--threads", type=int, default=1,
                        help="advisory thread cap, recorded in reports "
                             "(execution is single-threaded)")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("gen-extremal",
                       help="product construction of (k-1)^m sets")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_gen_extremal)

    p = sub.add_parser("gen-random", help="uniform random family")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--on-split", action="store_true",
                   help="one element per strip of the contiguous split")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_gen_random)

    p = sub.add_parser("find-sunflower",
                       help="exact search or spreadness-based extraction")
    p.add_argument("family", help="family file, or - for stdin")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--exact", action="store_true",
                   help="complete search (default)")
    p.add_argument("--gamma", metavar="B",
                   help="greedy disjoint extraction under b-spreadness")
    p.add_argument("--core", metavar="LABELS",
                   help="comma-separated core to quotient by (gamma mode)")
    p.set_defaults(func=_cmd_find_sunflower)

    p = sub.add_parser("check-gamma", help="exact spreadness verdict")
    p.add_argument("family")
    p.add_argument("--b", required=True,
                   help="spreadness base (integer, decimal, or p/q)")
    p.set_defaults(func=_cmd_check_gamma)

    p = sub.add_parser("split", help="find a split retaining many members")
    p.add_argument("family")
    p.add_argument("--mode", choices=["exhaustive", "random"],
                   default="exhaustive")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--pad-to", type=int, default=0,
                   help="re-embed into a universe of this size first")
    p.add_argument("--emit-family", metavar="PATH",
                   help="also write the retained family text here")
    p.set_defaults(func=_cmd_split)

    p = sub.add_parser("transversal-check",
                       help="brute count vs closed form")
    p.add_argument("family")
    p.add_argument("--j", type=int, required=True)
    p.set_defaults(func=_cmd_transversal_check)

    p = sub.add_parser("basesets", help="one extraction-engine call")
    p.add_argument("family")
    p.add_argument("--mprime", type=int, required=True)
    p.add_argument("--constants", required=True, metavar="FILE")
    p.add_argument("--g-family", metavar="PATH",
                   help="anchor family (defaults to the family itself "
                        "when --mprime equals m)")
    p.add_argument("--trace", metavar="PATH", help="JSONL extraction trace")
    p.set_defaults(func=_cmd_basesets)

    p = sub.add_parser("process-r", help="iterate the engine to a fixpoint")
    p.add_argument("family")
    p.add_argument("--constants", required=True, metavar="FILE")
    p.add_argument("--trace", metavar="PATH", help="JSONL extraction trace")
    p.set_defaults(func=_cmd_process_r)

    p = sub.add_parser("verify-bound",
                       help="empirical sunflower-appearance thresholds")
    p.add_argument("--k-range", required=True, metavar="LO:HI")
    p.add_argument("--m-range", required=True, metavar="LO:HI")
    p.add_argument("--trials", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_verify_bound)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except GammaPreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (BudgetExceededError, TrialsExhaustedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
