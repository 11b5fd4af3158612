"""Benchmark command line: gen, run, verify, bench subcommands."""

from __future__ import annotations

import argparse
import json
import sys

from .bench import (
    ALGORITHMS,
    INTERSECTION_ALGS,
    WEIGHTED_ALGS,
    InstanceSpec,
    InvalidSpec,
    family_instance,
    plot_data_series,
    run_trial,
    summary_lines,
    sweep,
)


def _load_instance(path):
    with open(path) as fh:
        return InstanceSpec.from_json(fh.read())


def _cmd_gen(args):
    with open(args.spec) as fh:
        cfg = json.load(fh)
    if "family" in cfg:
        params = dict(cfg.get("params", {}))
        inst = family_instance(cfg["family"], **params)
    else:
        inst = InstanceSpec.from_dict(cfg)
    with open(args.out, "w") as fh:
        fh.write(inst.to_json() + "\n")
    print(f"wrote {inst.instance_id} to {args.out}")
    return 0


def _cmd_run(args):
    inst = _load_instance(args.instance)
    rec = run_trial(inst, args.alg, k=args.k, p=args.p)
    with open(args.out, "w") as fh:
        fh.write(rec.to_json() + "\n")
    status = "ok"
    if rec.error:
        status = rec.error
    elif rec.within_bound is False or rec.correct is False:
        status = "VIOLATION"
    print(f"{rec.instance_id} {rec.algorithm}: clean={rec.clean_queries} bound={rec.bound} [{status}]")
    return 0 if status == "ok" else 1


def _compatible_algorithms(inst):
    if inst.is_intersection:
        return sorted(INTERSECTION_ALGS)
    algs = [a for a in ALGORITHMS if a not in INTERSECTION_ALGS and a != "pairquery"]
    if inst.weights == "unit":
        return algs
    return ["greedy"] + sorted(WEIGHTED_ALGS)


def _cmd_verify(args):
    inst = _load_instance(args.instance)
    if not args.all:
        print("nothing to do (pass --all)", file=sys.stderr)
        return 2
    failures = 0
    for algo in _compatible_algorithms(inst):
        try:
            rec = run_trial(inst, algo, k=args.k, p=args.p)
        except InvalidSpec as exc:
            print(f"{algo}: skipped ({exc})")
            continue
        ok = not rec.error and rec.correct is not False and rec.within_bound is not False
        cert = f" cert={rec.certificate}" if rec.certificate != "n/a" else ""
        print(
            f"{'PASS' if ok else 'FAIL'} {algo}: clean={rec.clean_queries} "
            f"bound={rec.bound} correct={rec.correct}{cert}"
            + (f" error={rec.error}" if rec.error else "")
        )
        failures += 0 if ok else 1
    return 1 if failures else 0


def _cmd_bench(args):
    with open(args.config) as fh:
        config = json.load(fh)
    records, violations = sweep(config, out_path=args.out)
    for line in summary_lines(records):
        print(line)
    print(f"{len(records)} rows -> {args.out}; violations={len(violations)}")
    if args.plot_data:
        series = plot_data_series(records)
        with open(args.plot_data, "w") as fh:
            json.dump(series, fh, indent=1, sort_keys=True)
        print(f"plot series -> {args.plot_data}")
    return 1 if violations else 0


def main(argv=None):
    parser = argparse.ArgumentParser(prog="matoracle", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen", help="materialize an instance from a generator spec")
    p_gen.add_argument("--spec", required=True)
    p_gen.add_argument("--out", required=True)
    p_gen.set_defaults(func=_cmd_gen)

    p_run = sub.add_parser("run", help="run one algorithm on one instance")
    p_run.add_argument("--instance", required=True)
    p_run.add_argument("--alg", required=True, choices=[a for a in ALGORITHMS])
    p_run.add_argument("--k", type=int, default=None)
    p_run.add_argument("--p", type=int, default=None)
    p_run.add_argument("--out", required=True)
    p_run.set_defaults(func=_cmd_run)

    p_verify = sub.add_parser("verify", help="run every compatible algorithm plus checks")
    p_verify.add_argument("--instance", required=True)
    p_verify.add_argument("--all", action="store_true")
    p_verify.add_argument("--k", type=int, default=None)
    p_verify.add_argument("--p", type=int, default=None)
    p_verify.set_defaults(func=_cmd_verify)

    p_bench = sub.add_parser("bench", help="run a sweep config and write CSV results")
    p_bench.add_argument("--config", required=True)
    p_bench.add_argument("--out", required=True)
    p_bench.add_argument("--plot-data", default=None)
    p_bench.set_defaults(func=_cmd_bench)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
