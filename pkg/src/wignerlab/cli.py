"""``simulate --config <path> [--out <dir>] [--preset <name>]``

Exit status: 0 success, 1 configuration error, 2 runtime abort.
"""
from __future__ import annotations

import argparse
import logging
import sys

from .config import PRESETS, ConfigError, load_config
from .experiment import EXIT_CONFIG, EXIT_RUNTIME, run_experiment


def build_parser():
    ap = argparse.ArgumentParser(
        prog="simulate",
        description="Evolve a Wigner function under classical and/or quantum mechanics.")
    ap.add_argument("--config", help="experiment config file (INI sections)")
    ap.add_argument("--out", help="output directory (overrides [output] directory)")
    ap.add_argument("--preset", choices=PRESETS,
                    help="shipped preset; with --config the file's keys override it")
    ap.add_argument("-q", "--quiet", action="store_true", help="only log errors")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.ERROR if args.quiet else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    if not args.config and not args.preset:
        print("simulate: one of --config or --preset is required", file=sys.stderr)
        return EXIT_CONFIG
    try:
        config = load_config(args.config, args.preset)
    except ConfigError as exc:
        print(f"simulate: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"simulate: cannot read config {args.config}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        result = run_experiment(config, args.out)
    except OSError as exc:
        print(f"simulate: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    if result.error:
        print(f"simulate: {result.error}", file=sys.stderr)
    elif not args.quiet:
        print(f"wrote {len(result.files)} files to {result.out_dir}")
    return result.status


if __name__ == "__main__":
    sys.exit(main())
