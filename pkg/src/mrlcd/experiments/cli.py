"""Command-line entry point: ``mrlcd <subcommand> [--config file.json] [overrides]``.

Exit codes: 0 pass, 1 a check failed, 2 bad configuration, 3 capacity exceeded.
"""

import argparse
import json
import sys

from ..errors import CapacityError, CertificationError, MrlcdError, NumericError
from . import runners
from .config import load_config

EXIT_PASS, EXIT_VIOLATION, EXIT_CONFIG, EXIT_CAPACITY = 0, 1, 2, 3

# per-command defaults, overridden by the config file and then by flags
COMMANDS = {
    "sval-tail": (runners.run_sval_tail, {"n": 64, "trials": 10000, "eps_grid": [0.0, 0.01, 0.1, 0.5, 1.0, 2.0]}),
    "singularity-exact": (runners.run_singularity, {"n": 3, "trials": 1}),
    "decouple": (runners.run_decoupling_check, {"n": 8, "trials": 100, "eps_grid": [0.5 * k for k in range(20)]}),
    "replace": (runners.run_replacement_check, {"n": 12, "trials": 500, "p_values": [0.05, 0.1, 0.14]}),
    "tensorize": (runners.run_tensorization_check, {"n": 6, "trials": 50, "eps_grid": [0.05 * k for k in range(50)]}),
    "structure-scan": (runners.run_structure_scan, {
        "n": 256, "trials": 200, "law": "perturbed_rademacher", "L": 1.0, "lam": 0.125,
        "c0": 0.1, "c1": 0.1, "c_spread": 0.5}),
    "denominator": (runners.run_denominator_check, {"n": 64, "trials": 10000, "eps_grid": [0.1, 0.25, 0.5, 1.0]}),
    "quadratic": (runners.run_quadratic_smallball, {
        "n": 64, "trials": 2000, "law": "perturbed_rademacher", "eps_grid": [0.001, 0.01, 0.1, 1.0]}),
    "lcd": (runners.run_lcd, {"n": 8, "trials": 1}),
    "mrlcd": (runners.run_mrlcd, {"n": 64, "trials": 1, "c0": 0.1, "c1": 0.1, "c_spread": 0.75}),
    "threshold": (runners.run_threshold, {"n": 8, "trials": 1, "L": 2.0}),
    "round": (runners.run_round, {"n": 8, "trials": 1, "law": "signed_bernoulli:0.1"}),
}


def build_parser():
    parser = argparse.ArgumentParser(prog="mrlcd", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="JSON config file")
        sp.add_argument("--n", type=int)
        sp.add_argument("--trials", type=int)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--law", help="e.g. rademacher, gaussian:0:1, signed_bernoulli:0.1")
        sp.add_argument("--lambda", dest="lam", type=float)
        sp.add_argument("--L", type=float)
        sp.add_argument("--p", type=float)
        sp.add_argument("--K", type=float)
        sp.add_argument("--workers", type=int)
        sp.add_argument("--out", help="output stem; writes <out>.json and <out>.csv")
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_PASS
    fn, defaults = COMMANDS[args.command]
    try:
        cfg = load_config(
            args.config, dict(defaults, name=args.command),
            n=args.n, trials=args.trials, seed=args.seed, law=args.law, lam=args.lam,
            L=args.L, p=args.p, K=args.K, workers=args.workers, out=args.out,
        )
        if args.p is not None and "p_values" in cfg.extra:
            # an explicit --p replaces the list of p values
            cfg = cfg.with_overrides(extra=dict(cfg.extra, p_values=[args.p]))
        report = fn(cfg)
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except CertificationError as exc:
        print(f"certification failed: {exc}", file=sys.stderr)
        if exc.best is not None:
            print(json.dumps(exc.best.to_dict()["checks"], sort_keys=True))
        return EXIT_VIOLATION
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    except (MrlcdError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if cfg.out:
        path = report.write(cfg.out)
        print(f"wrote {path}", file=sys.stderr)
    summary = report.to_dict()["summary"]
    print(json.dumps({"name": report.name, "passed": report.passed, "violations": report.violations,
                      "summary": summary}, sort_keys=True, default=str)[:4000])
    return EXIT_PASS if report.passed else EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
