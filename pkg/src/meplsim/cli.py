"""Command line entry point: ``meplsim run|sweep|verify|oracle``."""

from __future__ import annotations

import argparse
import json
import sys

from .experiments import Scenario, ScenarioError, build_instance, cluster_ratio_sweep, run_scenario, write_ratio_curve
from .oracle import OracleLimitError, approximation_ratio, brute_force_mepl, local_minima
from .suites import SUITES, verify_all


def _dump(obj) -> None:
    json.dump(obj, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


def cmd_run(args) -> int:
    s = Scenario.load(args.scenario)
    summary = run_scenario(s, out_dir=args.out)
    _dump({"aggregate": summary["aggregate"], "trials": len(summary["trials"]),
           "output": args.out or s.output})
    return 0


def cmd_sweep(args) -> int:
    counts = [int(c) for c in args.clusters.split(",") if c.strip()]
    pts = cluster_ratio_sweep(args.topology, args.n, counts, args.reps, args.seed,
                              inactive=args.inactive)
    write_ratio_curve(pts, args.out)
    _dump([{"cluster_count": p.cluster_count, "mean_ratio": p.mean_ratio, "std_ratio": p.std_ratio,
            "mean_initial_epl": p.mean_initial_epl, "mean_final_epl": p.mean_final_epl,
            "repetitions": p.repetitions} for p in pts])
    return 0


def cmd_verify(args) -> int:
    names = sorted(SUITES) if args.suite == "all" else [args.suite]
    reports = [verify_all(n) for n in names]
    out = [r.to_dict() for r in reports]
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(out, fh, indent=2)
            fh.write("\n")
    _dump(out if len(out) > 1 else out[0])
    for r in reports:
        print(f"{r.suite}: {'PASS' if r.passed else 'FAIL'}", file=sys.stderr)
    return 0 if all(r.passed for r in reports) else 1


def cmd_oracle(args) -> int:
    s = Scenario.load(args.scenario)
    inst = build_instance(s.topology, s.distribution)
    rule = s.dynamics.get("rule", "M")
    move_set = s.dynamics.get("move_set", "adjacent")
    opt = brute_force_mepl(inst.topology, inst.dist, limit=args.limit)
    lm = local_minima(inst.topology, inst.dist, rule, move_set, limit=args.limit)
    _dump({
        "mepl": opt.mepl_value,
        "argmin": opt.optimal_placement.forward.tolist(),
        "local_minima_count": lm.count,
        "worst_local_epl": lm.worst_epl,
        "ratio": approximation_ratio(lm.worst_epl, opt.mepl_value),
    })
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="meplsim", description="Self-adjusting process placement simulator")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a scenario file")
    p.add_argument("scenario")
    p.add_argument("--out", default=None, help="output directory (overrides the scenario)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="initial/final EPL ratio against cluster count")
    p.add_argument("--topology", choices=("ring", "torus"), required=True)
    p.add_argument("--n", type=int, required=True, help="host count (a square for the torus)")
    p.add_argument("--clusters", required=True, help="comma separated cluster counts")
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--inactive", type=int, default=0, help="number of inactive processes")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="run a fixed-seed property suite")
    p.add_argument("--suite", required=True, choices=sorted(SUITES) + ["all"])
    p.add_argument("--out", default=None, help="also write the JSON report here")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="brute-force MEPL and local minima for a small scenario")
    p.add_argument("scenario")
    p.add_argument("--limit", type=int, default=9, help="maximum number of active processes")
    p.set_defaults(func=cmd_oracle)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioError, OracleLimitError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
