"""Command-line front end.

Exit codes: 0 all expectations met, 1 mismatch or failing claim,
2 inconclusive (a bounded search ran out of budget on a decisive claim),
64 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from .amalgam import AXIOM_IDS, axiom_suite
from .literal import parse_structure
from .structures import BudgetExceeded
from .theories import builtin, builtin_names, complete_in_class
from .typespace import acl, acl_cross_check, same_type
from .indep import Divides, NoWitnessFound, divides, forks_witness, parse_formula
from .indep.engine import M_indep, a_indep, d_indep, da_indep, m_indep
from .indep.formulas import ExFormula
from .scenarios import catalog, run_scenario, sop3_witness_check

USAGE_ERROR = 64


def _default_seed() -> int:
    try:
        return int(os.environ.get("FININDEP_SEED", "0"))
    except ValueError:
        return 0


def _emit(args, payload: dict, text: str) -> None:
    if args.format == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(text)


def _load_config(args):
    t = builtin(args.theory)
    with open(args.config, encoding="utf-8") as fh:
        s, names = parse_structure(fh.read(), t.signature)
    # dividing verdicts read absent cyclic atoms as decided, so densely
    # completable diagrams are completed up front
    if "dense_completion" in t.flags:
        s = complete_in_class(t, s)
    return t, s, names


def _resolve(names: dict, spec: str) -> tuple:
    if not spec:
        return ()
    out = []
    for tok in spec.split(","):
        tok = tok.strip()
        if tok not in names:
            raise KeyError(f"unknown element name {tok!r}")
        out.append(names[tok])
    return tuple(out)


def _cmd_list(args) -> int:
    payload = {"scenarios": list(catalog()), "theories": list(builtin_names())}
    text = "scenarios:\n" + "\n".join(f"  {n}" for n in catalog())
    text += "\ntheories:\n" + "\n".join(f"  {n}" for n in builtin_names())
    _emit(args, payload, text)
    return 0


def _cmd_run(args) -> int:
    if args.all:
        names = list(catalog())
    else:
        if args.scenario is None:
            print("run: give a scenario name or --all", file=sys.stderr)
            return USAGE_ERROR
        if args.scenario not in catalog():
            print(f"run: unknown scenario {args.scenario!r}", file=sys.stderr)
            return USAGE_ERROR
        names = [args.scenario]
    reports = [run_scenario(n, seed=args.seed, pattern_budget=args.pattern_budget)
               for n in names]
    payload = {
        "version": __version__,
        "command": "run",
        "seed": args.seed,
        "reports": [r.to_dict() for r in reports],
        "ok": all(r.ok for r in reports),
    }
    lines = []
    for r in reports:
        lines.append(f"{r.scenario} [{r.theory}]: {'ok' if r.ok else 'MISMATCH'}")
        for c in r.results:
            mark = "pass" if c.ok else "FAIL"
            lines.append(f"  [{mark}] {c.id}: expected={c.expected!r} actual={c.actual!r}")
            lines.append(f"         {c.detail}")
    _emit(args, payload, "\n".join(lines))
    return 0 if payload["ok"] else 1


_RELATIONS = ("d", "da", "a", "M", "m", "forks-witness")


def _cmd_check(args) -> int:
    try:
        t, s, names = _load_config(args)
        base = _resolve(names, args.base)
        if args.relation == "forks-witness":
            if not args.formula or not args.disjunct:
                print("forks-witness needs --formula and --disjunct", file=sys.stderr)
                return USAGE_ERROR
            matrix = parse_formula(args.formula, t.signature, names)
            wits = tuple(w.strip() for w in (args.witnesses or "").split(",") if w.strip())
            phi = ExFormula(matrix, tuple(sorted(wits)))
            djs = tuple(parse_formula(d, t.signature, names) for d in args.disjunct)
            rep = forks_witness(t, s, phi, djs, base, k_max=args.k_max,
                                pattern_budget=args.pattern_budget)
            verdicts = [type(v).__name__ + (f"(k={v.k})" if isinstance(v, Divides) else "")
                        for v in rep.disjunct_verdicts]
            payload = {"relation": "forks-witness", "forks": rep.forks,
                       "entailment_ok": rep.entailment_ok,
                       "disjunct_verdicts": verdicts}
            _emit(args, payload,
                  f"forks-witness: {rep.forks} (entailment {rep.entailment_ok}, "
                  f"disjuncts {', '.join(verdicts)})")
            if any(isinstance(v, NoWitnessFound) for v in rep.disjunct_verdicts):
                return 2
            return 0 if rep.forks else 1
        left = _resolve(names, args.left)
        right = _resolve(names, args.right)
        if args.relation in ("d", "da"):
            fn = d_indep if args.relation == "d" else da_indep
            v = fn(t, s, left, right, base, rows=args.rows,
                   pattern_budget=args.pattern_budget)
        else:
            fn = {"a": a_indep, "M": M_indep, "m": m_indep}[args.relation]
            v = fn(t, s, left, right, base)
    except BudgetExceeded as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return 2
    except (KeyError, ValueError, OSError) as exc:
        print(f"check: {exc}", file=sys.stderr)
        return USAGE_ERROR
    payload = {"relation": v.name, "independent": v.independent, "detail": v.detail}
    _emit(args, payload, f"{v.name}-independent: {v.independent}\n  {v.detail}")
    return 0 if v.independent else 1


def _cmd_suite(args) -> int:
    try:
        t = builtin(args.theory)
        if args.drop_condition:
            t = t.drop_condition(args.drop_condition)
        axioms = tuple(a.strip() for a in args.axiom.split(",")) if args.axiom else ("all",)
        rep = axiom_suite(t, axioms=axioms, trials=args.trials,
                          size_bound=args.size, seed=args.seed)
    except (KeyError, ValueError) as exc:
        print(f"suite: {exc}", file=sys.stderr)
        return USAGE_ERROR
    payload = {
        "theory": rep.theory,
        "seed": rep.seed,
        "trials": rep.trials,
        "checked": rep.checked,
        "failures": [{"axiom": f.axiom, "trial": f.trial, "detail": f.detail}
                     for f in rep.failures],
        "ok": rep.ok,
    }
    lines = [f"axiom suite for {rep.theory}: {'ok' if rep.ok else 'FAILURES'}"]
    for a, n in sorted(rep.checked.items()):
        lines.append(f"  {a}: {n} instances")
    for f in rep.failures:
        lines.append(f"  FAIL {f.axiom} (trial {f.trial}): {f.detail}")
    _emit(args, payload, "\n".join(lines))
    return 0 if rep.ok else 1


def _cmd_acl(args) -> int:
    try:
        t, s, names = _load_config(args)
        xs = _resolve(names, args.of)
        res = acl(t, s, set(xs))
        mism = acl_cross_check(t, s, set(xs), bound=args.oracle_bound) \
            if args.oracle_bound else []
    except (KeyError, ValueError, OSError) as exc:
        print(f"acl: {exc}", file=sys.stderr)
        return USAGE_ERROR
    rev = {v: k for k, v in names.items()}
    members = sorted(rev.get(e, f"#{e}") for e in res.closure)
    payload = {"closure": members,
               "reasons": {rev.get(e, f"#{e}"): r for e, r in res.reasons.items()},
               "oracle_mismatches": [list(map(str, m)) for m in mism]}
    text = "closure: " + ", ".join(members)
    if mism:
        text += f"\noracle mismatches: {mism}"
    _emit(args, payload, text)
    return 0 if not mism else 1


def _cmd_same_type(args) -> int:
    try:
        t, s, names = _load_config(args)
        left = _resolve(names, args.left)
        right = _resolve(names, args.right)
        base = _resolve(names, args.base)
        ok, wit = same_type(t, s, left, right, base)
    except (KeyError, ValueError, OSError) as exc:
        print(f"same-type: {exc}", file=sys.stderr)
        return USAGE_ERROR
    payload = {"same_type": ok}
    _emit(args, payload, f"same type over base: {ok}")
    return 0


def _cmd_sop3(args) -> int:
    try:
        val = sop3_witness_check(args.n, corrupt=args.corrupt)
    except ValueError as exc:
        print(f"sop3: {exc}", file=sys.stderr)
        return USAGE_ERROR
    _emit(args, {"n": args.n, "corrupt": args.corrupt, "witness": val},
          f"strict-order ladder with n={args.n}: {val}")
    return 0 if val else 1


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="finindep",
                                description="dividing and independence checks "
                                            "over finite diagrams")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--seed", type=int, default=_default_seed())
    sub = p.add_subparsers(dest="command")

    sub.add_parser("list", help="catalog of scenarios and theories")

    pr = sub.add_parser("run", help="run scenario claim tables")
    pr.add_argument("scenario", nargs="?")
    pr.add_argument("--all", action="store_true")
    pr.add_argument("--pattern-budget", type=int, default=10000)

    pc = sub.add_parser("check", help="evaluate one independence relation")
    pc.add_argument("relation", choices=_RELATIONS)
    pc.add_argument("--theory", required=True)
    pc.add_argument("--config", required=True, help="structure-literal file")
    pc.add_argument("--left", default="", help="comma-separated element names")
    pc.add_argument("--right", default="")
    pc.add_argument("--base", default="")
    pc.add_argument("--formula", default="", help="matrix for forks-witness")
    pc.add_argument("--witnesses", default="", help="witness variables, comma-separated")
    pc.add_argument("--disjunct", action="append", default=[],
                    help="dividing disjunct formula (repeatable)")
    pc.add_argument("--rows", type=int, default=4)
    pc.add_argument("--k-max", type=int, default=4)
    pc.add_argument("--pattern-budget", type=int, default=10000)

    ps = sub.add_parser("suite", help="randomized axiom audits")
    ps.add_argument("what", choices=("axioms",))
    ps.add_argument("theory")
    ps.add_argument("--axiom", default="all",
                    help="comma-separated subset of: " + ", ".join(AXIOM_IDS))
    ps.add_argument("--trials", type=int, default=100)
    ps.add_argument("--size", type=int, default=5)
    ps.add_argument("--drop-condition", default="",
                    help="remove a class condition first (self-test control)")

    pa = sub.add_parser("acl", help="algebraic closure of named elements")
    pa.add_argument("--theory", required=True)
    pa.add_argument("--config", required=True)
    pa.add_argument("--of", required=True)
    pa.add_argument("--oracle-bound", type=int, default=0)

    pt = sub.add_parser("same-type", help="bounded type equality of two tuples")
    pt.add_argument("--theory", required=True)
    pt.add_argument("--config", required=True)
    pt.add_argument("--left", required=True)
    pt.add_argument("--right", required=True)
    pt.add_argument("--base", default="")

    p3 = sub.add_parser("sop3", help="strict-order ladder witness check")
    p3.add_argument("--n", type=int, required=True)
    p3.add_argument("--corrupt", action="store_true")
    return p


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code not in (0, None) else 0
    if args.command is None:
        parser.print_usage(sys.stderr)
        return USAGE_ERROR
    handlers = {
        "list": _cmd_list,
        "run": _cmd_run,
        "check": _cmd_check,
        "suite": _cmd_suite,
        "acl": _cmd_acl,
        "same-type": _cmd_same_type,
        "sop3": _cmd_sop3,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
