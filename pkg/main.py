"""
Command-line entry point

Usage:
    python main.py density --spec cauchy --t 1 --d 1 --out output/
    python main.py check bounds --spec stable_a1_d1
    python main.py simulate --spec stable_a1_d1 --radius 1 --x0 0 --n 100000 --seed 7
    python main.py specs

Exit codes: 0 pass, 1 check failure, 2 usage, 3 precondition, 4 numeric budget
"""

import argparse
import sys
from datetime import datetime
from typing import List, Optional

import config
from config import logger
from errors import ToolkitError, UsageError
from models.samples import PathConfig
from modules import commands
from utils.validators import resolve_spec


def verbose_log(message):
    """Print a checkpoint line only if VERBOSE_LOGGING is enabled"""
    if config.VERBOSE_LOGGING:
        timestamp = datetime.now().strftime('%Y-%m-%d %H:%M:%S')
        print(f"[{timestamp}] {message}", file=sys.stderr, flush=True)


class _Parser(argparse.ArgumentParser):
    """argparse raising UsageError instead of exiting"""

    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog=config.TOOL_NAME, description="Isotropic unimodal Lévy process toolkit")
    parser.add_argument('--version', action='version', version=f"{config.TOOL_NAME} {config.TOOL_VERSION}")
    sub = parser.add_subparsers(dest='command', parser_class=_Parser)

    density = sub.add_parser('density', help="tabulate p_t to CSV")
    density.add_argument('--spec', required=True, help="spec file path or shipped spec id")
    density.add_argument('--t', type=float, default=1.0)
    density.add_argument('--d', type=int, default=None)
    density.add_argument('--walk', action='store_true', help="write the dimension-walked profile")
    density.add_argument('--out', default=config.OUTPUT_DIR)

    check = sub.add_parser('check', help="run a check suite")
    check.add_argument('suite', help=f"one of: {', '.join(commands.SUITES)}")
    check.add_argument('--spec', default=None)
    check.add_argument('--tol', type=float, default=None)
    check.add_argument('--out', default=config.OUTPUT_DIR)
    _add_path_flags(check, n_default=20000)

    simulate = sub.add_parser('simulate', help="exit samples from a ball")
    simulate.add_argument('--spec', required=True)
    simulate.add_argument('--radius', type=float, default=1.0)
    simulate.add_argument('--x0', type=float, nargs='+', default=None)
    simulate.add_argument('--samples-csv', action='store_true', help="write every exit event")
    simulate.add_argument('--out', default=config.OUTPUT_DIR)
    _add_path_flags(simulate, n_default=config.DEFAULT_N_PATHS)

    specs = sub.add_parser('specs', help="list shipped specs")
    specs.add_argument('--dir', default=config.SPECS_DIR)
    return parser


def _add_path_flags(parser: argparse.ArgumentParser, n_default: int) -> None:
    parser.add_argument('--seed', type=int, default=config.DEFAULT_SEED)
    parser.add_argument('--n', type=int, default=n_default)
    parser.add_argument('--dt', type=float, default=config.DEFAULT_DT)
    parser.add_argument('--max-time', type=float, default=config.DEFAULT_MAX_TIME)
    parser.add_argument('--workers', type=int, default=config.MAX_WORKERS)


def _path_config(args) -> PathConfig:
    if args.n < 1:
        raise UsageError(f"--n must be >= 1, got {args.n}")
    if args.workers < 1:
        raise UsageError(f"--workers must be >= 1, got {args.workers}")
    try:
        return PathConfig(dt=args.dt, max_time=args.max_time, seed=args.seed, n_paths=args.n,
                          workers=args.workers)
    except ValueError as e:
        raise UsageError(str(e)) from e


def run(argv: Optional[List[str]] = None) -> int:
    """Parse arguments and dispatch; returns the exit code"""
    args = build_parser().parse_args(argv)
    if args.command is None:
        raise UsageError("a command is required: density, check, simulate or specs")

    logger.info("=" * 60)
    logger.info(f"{config.TOOL_NAME} {config.TOOL_VERSION}: {args.command}")
    logger.info("=" * 60)
    verbose_log(f"✅ CHECKPOINT: arguments parsed ({args.command})")

    if args.command == 'density':
        for path in commands.cmd_density(resolve_spec(args.spec), args.t, args.d, args.out, args.walk):
            print(path)
        return 0
    if args.command == 'check':
        if args.suite not in commands.SUITES:
            raise UsageError(f"unknown suite '{args.suite}', choose from {', '.join(commands.SUITES)}")
        spec = resolve_spec(args.spec) if args.spec else None
        verbose_log(f"✅ CHECKPOINT: suite {args.suite} on {spec.label if spec else 'default spec'}")
        code = commands.cmd_check(args.suite, spec, args.out, _path_config(args), args.tol)
        print(f"check {args.suite}: {'PASS' if code == 0 else 'FAIL'}")
        return code
    if args.command == 'simulate':
        cfg = _path_config(args)
        summary = commands.cmd_simulate(resolve_spec(args.spec), args.radius, args.x0, cfg, args.out,
                                        args.samples_csv)
        for key, value in summary.items():
            print(f"{key}: {value}")
        return 0
    print(commands.cmd_specs(args.dir), end='')
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    try:
        code = run(argv)
    except ToolkitError as e:
        logger.error(f"{type(e).__name__}: {e.message}")
        print(f"❌ {type(e).__name__}: {e}", file=sys.stderr)
        code = e.exit_code
    logger.info("=" * 60)
    return code


if __name__ == "__main__":
    sys.exit(main())
