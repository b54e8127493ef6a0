"""
Command-line front end.

Exit codes: 0 success or property holds, 1 property fails, 2 input error,
3 enumeration budget exceeded.

    fairmatroid solve --preset thm4
    fairmatroid audit --preset thm4 --mechanism pe --json
    fairmatroid fuzz --mechanism pe --trials 1000 --seed 0
    fairmatroid repro-impossibility --mechanism dictator:1,0
"""
from __future__ import annotations

import argparse
import json
import logging
import random
import sys

from fairmatroid.audits import (
    MisreportSpace,
    check_gradual,
    check_index_oblivious,
    fuzz_coalitions,
    run_impossibility_executor,
)
from fairmatroid.errors import CapabilityError, InputError, PreconditionError
from fairmatroid.exchange import build_exchange_graph
from fairmatroid.fairness import (
    classify_welfare,
    is_ef1,
    is_locally_efficient,
    is_mms,
    is_pareto_optimal_fast,
    is_pareto_optimal_oracle,
    mms_profile,
)
from fairmatroid.instances import DEFAULT_BUDGET, Allocation, Instance, is_non_wasteful, nsw, values
from fairmatroid.matroid import is_matroid_kind
from fairmatroid.mechanisms import get_mechanism
from fairmatroid.presets import preset, random_instance

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3
PROPERTIES = ("ef1", "mms", "po", "le", "welfare")


def _read_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON ({exc.msg} at line {exc.lineno})") from exc


def load_instance(args) -> Instance:
    if args.instance and args.preset:
        raise InputError("give either --instance or --preset, not both")
    if args.preset:
        return preset(args.preset)
    if args.instance:
        return Instance.from_json(_read_json(args.instance))
    raise InputError("an instance is required (--instance PATH or --preset NAME)")


def _allocation(args, inst: Instance) -> tuple[Allocation, str]:
    if getattr(args, "allocation", None):
        a = Allocation.from_json(_read_json(args.allocation))
        a.check(inst)
        return a, "file"
    f = get_mechanism(args.mechanism)
    return f(inst), f.name


def _emit(args, payload: dict, lines: list[str]) -> None:
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        print("\n".join(lines))


def _fmt_bundles(a: Allocation) -> str:
    return " | ".join("{" + ",".join(str(g) for g in sorted(b)) + "}" for b in a.bundles)


def cmd_solve(args) -> int:
    inst = load_instance(args)
    f = get_mechanism(args.mechanism)
    a = f(inst)
    vec = values(inst, a)
    payload = {"mechanism": f.name, "allocation": a.to_json(), "values": list(vec), "nsw": nsw(vec)}
    _emit(args, payload, [
        f"mechanism: {f.name}",
        f"allocation: {_fmt_bundles(a)}",
        f"values: {tuple(vec)}",
        f"nsw: {nsw(vec):.7f}",
    ])
    return EXIT_OK


def cmd_audit(args) -> int:
    inst = load_instance(args)
    a, source = _allocation(args, inst)
    wanted = [p.strip() for p in args.properties.split(",") if p.strip()]
    unknown = set(wanted) - set(PROPERTIES)
    if unknown:
        raise InputError(f"unknown properties {sorted(unknown)}; choose from {', '.join(PROPERTIES)}")
    verdicts = []
    for p in wanted:
        if p == "ef1":
            verdicts.append(is_ef1(inst, a).to_json())
        elif p == "mms":
            verdicts.append(is_mms(inst, a, budget=args.budget).to_json())
        elif p == "po":
            if all(is_matroid_kind(v) for v in inst.valuations):
                verdicts.append(is_pareto_optimal_fast(inst, a).to_json())
            else:
                verdicts.append(is_pareto_optimal_oracle(inst, a, budget=args.budget).to_json())
        elif p == "le":
            verdicts.append(is_locally_efficient(inst, a).to_json())
        elif p == "welfare":
            wc = classify_welfare(inst, a, budget=args.budget)
            holds = wc.is_nash_optimal and wc.is_leximin and wc.is_lorenz_dominating
            verdicts.append({"property": "welfare", "holds": holds, "witness": None if holds else wc.to_json()})
    ok = all(v["holds"] for v in verdicts)
    payload = {"source": source, "allocation": a.to_json(), "values": list(values(inst, a)), "verdicts": verdicts}
    lines = [f"allocation ({source}): {_fmt_bundles(a)}", f"values: {values(inst, a)}"]
    for v in verdicts:
        mark = "holds" if v["holds"] else "FAILS"
        extra = "" if v["holds"] else f"  witness={json.dumps(v['witness'])}"
        lines.append(f"{v['property']}: {mark}{extra}")
    _emit(args, payload, lines)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_mms(args) -> int:
    inst = load_instance(args)
    shares = mms_profile(inst, budget=args.budget)
    _emit(args, {"shares": list(shares)}, [f"maximin shares: {tuple(shares)}"])
    return EXIT_OK


def cmd_gradual(args) -> int:
    inst = load_instance(args)
    f = get_mechanism(args.mechanism)
    verdict = check_gradual(f, inst, seed=args.seed)
    lines = [f"gradual ({f.name}): {'holds' if verdict.holds else 'FAILS'}"]
    if not verdict.holds:
        lines.append(f"witness: {json.dumps(verdict.witness)}")
    lines += [f"note: {n}" for n in verdict.notes]
    _emit(args, verdict.to_json(), lines)
    return EXIT_OK if verdict.holds else EXIT_FAIL


def cmd_fuzz(args) -> int:
    f = get_mechanism(args.mechanism)
    wit = fuzz_coalitions(
        f, trials=args.trials, seed=args.seed, max_coalition=args.coalition,
        space=MisreportSpace(seed=args.seed),
    )
    payload: dict = {"mechanism": f.name, "trials": args.trials, "seed": args.seed}
    if wit is not None:
        payload["deviation"] = wit.to_json()
        _emit(args, payload, [
            f"deviation found for {f.name}: coalition {list(wit.coalition)} gains {list(wit.gains)}",
            json.dumps(wit.to_json()),
        ])
        return EXIT_FAIL
    # a lighter pass of the structural checks on a handful of seeded instances
    rng = random.Random(f"{args.seed}:fuzz-structure")
    for k in range(min(args.trials, 20)):
        inst = random_instance(rng, rng.randint(1, 5), rng.randint(1, 3))
        for verdict in (check_index_oblivious(f, inst, trials=5, seed=args.seed),
                        check_gradual(f, inst, samples=4, seed=args.seed)):
            if not verdict.holds:
                payload["violation"] = {"instance": inst.to_json(), **verdict.to_json()}
                _emit(args, payload, [
                    f"{verdict.property} fails for {f.name} on generated instance {k}",
                    json.dumps(verdict.witness),
                ])
                return EXIT_FAIL
    payload["deviation"] = None
    _emit(args, payload, [f"no deviation in {args.trials} trials (seed {args.seed})"])
    return EXIT_OK


def cmd_repro(args) -> int:
    f = get_mechanism(args.mechanism)
    report = run_impossibility_executor(f)
    lines = [f"mechanism: {f.name}"]
    for k, step in enumerate(report.steps, 1):
        lines.append(f"step {k}: {step.name}")
        lines.append(f"  allocation: {_fmt_bundles(step.allocation)}  values: {values(step.profile, step.allocation)}")
        for c in step.checks:
            lines.append(f"  check: {json.dumps(c)}")
    lines += [f"note: {n}" for n in report.notes]
    lines.append(f"violated: {report.violated}")
    lines.append(f"witness: {json.dumps(report.witness)}")
    _emit(args, report.to_json(), lines)
    return EXIT_OK if report.violated else EXIT_FAIL


def cmd_graph(args) -> int:
    inst = load_instance(args)
    a, _ = _allocation(args, inst)
    if not is_non_wasteful(inst, a):
        print("error: allocation is wasteful; exchange graphs need independent bundles", file=sys.stderr)
        return EXIT_FAIL
    sys.stdout.write(build_exchange_graph(inst, a).to_dot())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fairmatroid", description=__doc__.split("\n\n")[0].strip())
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, instance=True, mechanism=True):
        if instance:
            p.add_argument("--instance", metavar="PATH", help="instance JSON file")
            p.add_argument("--preset", metavar="NAME", help="embedded instance (thm4, thm4-star, triangle, ...)")
        if mechanism:
            p.add_argument("--mechanism", default="pe", help="pe, oracle, empty, dictator:0,1, ... (default pe)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="enumeration budget (default 10^7)")
        p.add_argument("--json", action="store_true", help="machine-readable output")

    p = sub.add_parser("solve", help="run a mechanism")
    common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("audit", help="fairness and efficiency verdicts")
    common(p)
    p.add_argument("--allocation", metavar="PATH", help="audit this allocation instead of the mechanism's")
    p.add_argument("--properties", default=",".join(PROPERTIES), help="comma list from " + ",".join(PROPERTIES))
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("fuzz", help="seeded deviation, coalition, index and gradual checks")
    common(p, instance=False)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--coalition", type=int, default=3)
    p.set_defaults(func=cmd_fuzz)

    p = sub.add_parser("gradual", help="check conditions C1, C2 and C1* on one instance")
    common(p)
    p.set_defaults(func=cmd_gradual)

    p = sub.add_parser("repro-impossibility", help="replay the MMS impossibility chain against a mechanism")
    common(p, instance=False)
    p.set_defaults(func=cmd_repro)

    p = sub.add_parser("mms", help="maximin shares")
    common(p, mechanism=False)
    p.set_defaults(func=cmd_mms)

    p = sub.add_parser("graph", help="exchange graph in DOT")
    common(p)
    p.add_argument("--allocation", metavar="PATH", help="allocation JSON (default: mechanism output)")
    p.set_defaults(func=cmd_graph)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr)
    for name in ("trials", "coalition", "budget", "seed"):
        if getattr(args, name, 0) < 0:
            print(f"error: --{name} must be nonnegative", file=sys.stderr)
            return EXIT_INPUT
    try:
        return args.func(args)
    except CapabilityError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (InputError, PreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
