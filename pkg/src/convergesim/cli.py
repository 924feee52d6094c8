"""``convergesim`` command line: run, validate, oracle."""

from __future__ import annotations

import argparse
import dataclasses
import logging
import os
import sys

from .config import ConfigError, load_config, render_config
from .metrics import SCHEMES
from .oracle import run_oracle_suite
from .output import write_csv, write_plot
from .runner import run_sweep

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME, EXIT_VIOLATION = 0, 1, 2, 3


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="convergesim", description="Converged HetNet association sweeps")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the full sweep and write CSV and SVG")
    run.add_argument("--config", required=True)
    run.add_argument("--seed", type=int)
    run.add_argument("--out-dir")
    run.add_argument("--schemes", help="comma-separated subset of " + ",".join(SCHEMES))
    run.add_argument("--quiet", action="store_true")

    val = sub.add_parser("validate", help="parse and validate a config")
    val.add_argument("--config", required=True)

    orc = sub.add_parser("oracle", help="brute-force sandwich check on small instances")
    orc.add_argument("--config", required=True)
    orc.add_argument("--instances", type=int, default=200)
    return ap


def _load(path, overrides=None):
    cfg = load_config(path)
    if overrides:
        cfg = dataclasses.replace(cfg, **overrides)
    return cfg


def _cmd_run(args) -> int:
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.out_dir:
        overrides["out_dir"] = args.out_dir
    if args.schemes:
        schemes = tuple(s.strip() for s in args.schemes.split(",") if s.strip())
        unknown = [s for s in schemes if s not in SCHEMES]
        if unknown or not schemes:
            raise ConfigError(f"--schemes: unknown scheme(s) {', '.join(unknown) or '(none)'}")
        overrides["schemes"] = schemes
    cfg = _load(args.config, overrides)

    total = len(cfg.alphas) * len(cfg.lambda_multiples) * cfg.drops
    done = [0]

    def progress():
        done[0] += 1
        if done[0] % max(1, total // 20) == 0 or done[0] == total:
            print(f"\r{done[0]}/{total} drops", end="", file=sys.stderr, flush=True)

    sweep = run_sweep(cfg, progress=None if args.quiet else progress)
    if not args.quiet:
        print(file=sys.stderr)
    os.makedirs(cfg.out_dir, exist_ok=True)
    write_csv(sweep.result, os.path.join(cfg.out_dir, "sweep.csv"))
    write_plot(sweep.result, "interference", os.path.join(cfg.out_dir, "interference.svg"))
    write_plot(sweep.result, "efficiency", os.path.join(cfg.out_dir, "efficiency.svg"))
    with open(os.path.join(cfg.out_dir, "config.cfg"), "w", encoding="utf-8") as fh:
        fh.write(render_config(cfg))
    if not args.quiet:
        print(f"wrote {cfg.out_dir}/sweep.csv ({len(sweep.result.points)} points, "
              f"{sweep.result.resamples} resampled drops)")
    if sweep.violations:
        print(f"error: {sweep.violations} optimizer guarantee violations", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def _cmd_validate(args) -> int:
    cfg = _load(args.config)
    print(f"ok: digest {cfg.digest()}, {len(cfg.alphas)} alpha x {len(cfg.lambda_multiples)} lambda "
          f"x {cfg.drops} drops")
    return EXIT_OK


def _cmd_oracle(args) -> int:
    cfg = _load(args.config)
    failures = []
    for alpha in cfg.alphas:
        failures += [f"alpha {alpha:g}: {m}"
                     for m in run_oracle_suite(cfg.scenario(alpha), args.instances, cfg.seed)]
    for msg in failures:
        print(msg, file=sys.stderr)
    print(f"oracle: {len(failures)} violations over {args.instances * len(cfg.alphas)} instances")
    return EXIT_VIOLATION if failures else EXIT_OK


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    handler = {"run": _cmd_run, "validate": _cmd_validate, "oracle": _cmd_oracle}[args.command]
    try:
        return handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        if isinstance(exc, FileNotFoundError) and getattr(exc, "filename", None) == args.config:
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except Exception as exc:  # noqa: BLE001
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
