"""Command line entry point: ``wellopt run|compare|list-algorithms|validate``."""
from __future__ import annotations

import argparse
import sys

from .errors import ConfigError, SchemaMismatch, WelloptError
from .experiment import algorithm_table, compare, load_config, run_experiment

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _parser():
    p = argparse.ArgumentParser(prog="wellopt", description="Derivative-free well placement and control experiments.")
    sub = p.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run an experiment config")
    run.add_argument("config")
    run.add_argument("--jobs", type=int, default=1, help="trials run concurrently (default 1)")
    run.add_argument("--out", default=None, help="output directory (overrides output_dir)")
    cmp_ = sub.add_parser("compare", help="merge summary.csv files of experiment directories")
    cmp_.add_argument("dirs", nargs="+")
    cmp_.add_argument("--out", default="comparison.csv")
    sub.add_parser("list-algorithms", help="print known algorithm ids")
    val = sub.add_parser("validate", help="check a config without running it")
    val.add_argument("config")
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "list-algorithms":
            for alg_id, kind, text in algorithm_table():
                print(f"{alg_id:8s} {kind:13s} {text}")
            return EXIT_OK
        if args.command == "validate":
            cfg = load_config(args.config)
            for note in cfg.notes:
                print(f"note: {note}", file=sys.stderr)
            print(f"ok: {cfg.scenario} with {cfg.algorithm_id}, budget {cfg.budget}, {cfg.trials} trial(s)")
            return EXIT_OK
        if args.command == "run":
            if args.jobs < 1:
                raise ConfigError("--jobs must be at least 1", "--jobs")
            cfg = load_config(args.config)
            for note in cfg.notes:
                print(f"note: {note}", file=sys.stderr)
            results = run_experiment(cfg, args.out, jobs=args.jobs)
            best = [r.best_value for r in results]
            print(f"{cfg.algorithm_id}: {len(results)} trial(s), finals {', '.join(f'{v:.6g}' for v in best)}")
            return EXIT_OK
        if args.command == "compare":
            rows = compare(args.dirs, args.out)
            print(f"wrote {len(rows)} row(s) to {args.out}")
            return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SchemaMismatch as exc:
        print(f"schema mismatch: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (WelloptError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_CONFIG  # pragma: no cover - argparse enforces a command


if __name__ == "__main__":
    sys.exit(main())
