"""Command line entry point: ``chi2pulse {sweep,wigner,validate-config,selftest}``.

Exit codes: 0 success, 2 configuration error, 3 every sweep point flagged.
"""

import argparse
import logging
import sys

from .config import SweepConfig, parse_config, serialize_config
from .errors import ConfigError, ParameterError

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2
EXIT_DEGENERATE = 3

log = logging.getLogger("chi2pulse")


def _load(args):
    cfg = parse_config(args.config) if args.config else SweepConfig()
    changes = {}
    if getattr(args, "threads", None) is not None:
        changes["threads"] = args.threads
    if getattr(args, "out", None) is not None:
        changes["output_dir"] = args.out
    return cfg.replace(**changes) if changes else cfg


def cmd_sweep(args):
    from .sweep import run_sweep

    cfg = _load(args)
    path, results = run_sweep(cfg)
    flagged = sum(1 for r in results if r.flags)
    log.info("wrote %s (%d rows, %d flagged)", path, len(results), flagged)
    print(path)
    if results and flagged == len(results):
        return EXIT_DEGENERATE
    return EXIT_OK


def cmd_wigner(args):
    from .sweep import run_wigner

    cfg = _load(args)
    if not args.point:
        raise ConfigError(["--point: required, as omega_thz,alpha or omega_thz,theta=<value>"])
    paths, res = run_wigner(cfg, args.point, binary=args.binary)
    for p in paths:
        print(p)
    if res.flags:
        log.warning("flags: %s", ";".join(res.flags))
    return EXIT_OK


def cmd_validate(args):
    cfg = _load(args)
    sys.stdout.write(serialize_config(cfg))
    return EXIT_OK


def cmd_selftest(args):
    from .selftest import run_selftest

    return EXIT_OK if run_selftest(seed=args.seed) else EXIT_FAILED


def build_parser():
    ap = argparse.ArgumentParser(prog="chi2pulse", description="Phase-space propagation of pulsed quantum light through a chi(2) crystal.")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="verb", required=True)

    def common(p, out=True):
        p.add_argument("--config", help="YAML config file (defaults when omitted)")
        if out:
            p.add_argument("--out", help="output directory (overrides output_dir)")
            p.add_argument("--threads", type=int, help="worker threads (overrides threads)")

    p = sub.add_parser("sweep", help="tabulate the (omega_out, alpha) grid")
    common(p)
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("wigner", help="write Wigner fields for one point")
    common(p)
    p.add_argument("--point", help="omega_thz,alpha or omega_thz,theta=<value>")
    p.add_argument("--binary", action="store_true", help="also write the compact binary layout")
    p.set_defaults(fn=cmd_wigner)

    p = sub.add_parser("validate-config", help="check a config and print it fully resolved")
    common(p, out=False)
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("selftest", help="run the built-in property checks")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_selftest)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.fn(args)
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return EXIT_CONFIG
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
