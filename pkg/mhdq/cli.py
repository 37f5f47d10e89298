"""Command-line entry point: python -m mhdq <subcommand> ..."""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from .config import ScenarioConfig, help_lines, parse_config
from .errors import ConfigError, DatumError, MHDQError, SnapshotError
from .presets import make_admissible_datum

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

TRACE_LIMIT = 1e-12
PARITY_LIMIT = 1e-13
PARALLEL_LIMIT = 1e-13


def _mark(ok: bool) -> str:
    return "✅" if ok else "❌"


def _configure_logging(verbosity: int):
    level = logging.WARNING if verbosity == 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")


def _config_epilog() -> str:
    rows = help_lines()
    width = max(len(k) for k, _, _ in rows)
    lines = ["config keys (key = value, '#' comments):"]
    for key, default, text in rows:
        lines.append(f"  {key:<{width}}  {default:<14} {text}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mhdq",
        description="Ideal MHD quarter-space simulator and verification harness",
        epilog=_config_epilog(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="log progress to stderr (-vv for debug)")
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify-structure", help="sampled checks of the matrix structure")
    verify.add_argument("--samples", type=int, default=1000, help="random states per closure")
    verify.add_argument("--seed", type=int, default=0, help="random seed")

    compat = sub.add_parser("check-compat", help="admissibility report for a scenario's datum")
    compat.add_argument("config", type=Path)

    ext = sub.add_parser("extend", help="odd/even extension of a quarter-box snapshot")
    ext.add_argument("snapshot_in", type=Path)
    ext.add_argument("snapshot_out", type=Path)

    run = sub.add_parser("run", help="integrate a scenario, writing snapshots and diagnostics")
    run.add_argument("config", type=Path)

    compare = sub.add_parser("compare-reflection",
                             help="quarter run against the restricted half run")
    compare.add_argument("config", type=Path)
    return parser


def cmd_verify_structure(args) -> int:
    from .structure_verify import run_structure_suite

    if args.samples < 2:
        print("❌ --samples must be at least 2", file=sys.stderr)
        return EXIT_USAGE
    results = run_structure_suite(args.samples, args.seed)
    print(f"{'check':<32} {'eos':<12} {'samples':>7} {'worst':>12} {'tol':>10}  result")
    print("=" * 86)
    for r in results:
        line = (f"{r.name:<32} {r.eos:<12} {r.samples:>7} {r.worst:>12.3e} {r.tolerance:>10.1e}  "
                f"{_mark(r.passed)}")
        if r.detail:
            line += f"  {r.detail}"
        print(line)
    failed = [r for r in results if not r.passed]
    print("=" * 86)
    print(f"{_mark(not failed)} {len(results) - len(failed)}/{len(results)} structure checks passed "
          f"(seed {args.seed})")
    return EXIT_OK if not failed else EXIT_FAILED


def cmd_check_compat(args) -> int:
    from .compat import check_all

    config = parse_config(args.config)
    config.require_check_size()
    eos = config.equation_of_state()
    datum = make_admissible_datum(config.recipe(), config.grid(), eos)
    report = check_all(eos, datum, config.tolerances())
    out = Path(config.output_dir)
    config.write_resolved(out)
    report.to_frame().to_csv(out / "compat_report.csv", index=False, float_format="%.17g")
    print(report.to_text())
    print(f"{_mark(report.passed)} {len(report.records) - len(report.failures())}/"
          f"{len(report.records)} conditions passed for '{config.datum}' on {datum.grid.describe()}")
    return EXIT_OK if report.passed else EXIT_FAILED


def cmd_extend(args) -> int:
    from .reflection import extend
    from .snapshot import read_snapshot, write_snapshot

    field, t = read_snapshot(args.snapshot_in)
    if field.grid.kind != "quarter":
        print(f"❌ {args.snapshot_in} holds a {field.grid.kind} field; extend needs a quarter box",
              file=sys.stderr)
        return EXIT_USAGE
    write_snapshot(args.snapshot_out, extend(field), t)
    print(f"✅ extended {args.snapshot_in} -> {args.snapshot_out} (t={t!r})")
    return EXIT_OK


def persistence_checks(config: ScenarioConfig, history) -> List[tuple]:
    """(name, value, limit, ok) for the H^3 persistence and div H growth knobs"""
    first, rest = history[0], history[1:] or history
    h_max = max(config.grid().spacing)
    checks = []
    if first.H3 > 0:
        ratio_hi = max(r.H3 for r in rest) / first.H3
        ratio_lo = min(r.H3 for r in rest) / first.H3
        factor = config.persistence_factor
        checks.append(("H3 growth", ratio_hi, factor, ratio_hi <= factor))
        checks.append(("H3 decay", 1.0 / ratio_lo if ratio_lo > 0 else float("inf"), factor,
                       ratio_lo > 0 and 1.0 / ratio_lo <= factor))
    growth = max(r.divH_max for r in rest) - first.divH_max
    limit = config.divh_growth_factor * h_max ** 2
    checks.append(("divH growth", growth, limit, growth <= limit))
    return checks


def cmd_run(args) -> int:
    from .solver import integrate

    config = parse_config(args.config)
    config.require_run_size()
    eos = config.equation_of_state()
    out = Path(config.output_dir)
    config.write_resolved(out)
    rs = integrate(eos, config, output_dir=out)
    print(f"{'step':>6} {'t':>12} {'divH_max':>12} {'energy':>14} {'H3':>12}")
    print("-" * 62)
    for r in rs.history:
        print(f"{r.step:>6} {r.t:>12.6f} {r.divH_max:>12.3e} {r.energy:>14.8e} {r.H3:>12.6e}")
    checks = persistence_checks(config, rs.history)
    for name, value, limit, ok in checks:
        print(f"{_mark(ok)} {name:<12} {value:.3e} (limit {limit:.3e})")
    ok = all(c[3] for c in checks)
    print(f"{_mark(ok)} {rs.steps} steps to t={rs.t:.6g}; outputs in {out}")
    return EXIT_OK if ok else EXIT_FAILED


def cmd_compare_reflection(args) -> int:
    from .solver import compare_reflection

    config = parse_config(args.config)
    config.require_run_size()
    eos = config.equation_of_state()
    out = Path(config.output_dir)
    config.write_resolved(out)
    result = compare_reflection(eos, config, output_dir=out)

    scale = result.amplitude if result.amplitude > 0 else 1.0
    trace = result.trace_max()
    parity = result.parity_max()
    equal_ok = result.bitwise_equal or (not config.serial_reductions
                                        and result.relative_discrepancy <= PARALLEL_LIMIT)
    checks = [
        ("bitwise equal", str(result.bitwise_equal).lower(), equal_ok),
        ("max discrepancy", f"{result.max_discrepancy:.6e}", equal_ok),
        ("relative discrepancy", f"{result.relative_discrepancy:.6e}", equal_ok),
        ("half x3=0 trace u3/H3", f"{trace:.6e}", trace <= TRACE_LIMIT * scale),
        ("half-box parity defect", f"{parity:.6e}", parity <= PARITY_LIMIT * scale),
    ]
    print(f"steps {result.steps}")
    for name, value, ok in checks:
        print(f"{_mark(ok)} {name:<24} {value}")
    # one-sided read of the quarter wall, truncation level
    print(f"📊 {'quarter x3=0 trace':<24} {result.quarter_trace_max():.6e}")
    ok = all(c[2] for c in checks)
    print(f"{_mark(ok)} reflection comparison {'passed' if ok else 'failed'}")
    return EXIT_OK if ok else EXIT_FAILED


COMMANDS = {
    "verify-structure": cmd_verify_structure,
    "check-compat": cmd_check_compat,
    "extend": cmd_extend,
    "run": cmd_run,
    "compare-reflection": cmd_compare_reflection,
}


def run_subcommand(argv: Optional[List[str]] = None) -> int:
    """Parse argv, dispatch, and map failures to exit codes (0 pass, 1 failed check, 2 usage)"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    _configure_logging(args.verbose)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, SnapshotError) as exc:
        print(f"❌ {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DatumError as exc:
        print(f"❌ {exc}", file=sys.stderr)
        if exc.report is not None:
            print(exc.report.to_text(), file=sys.stderr)
        return EXIT_FAILED
    except MHDQError as exc:
        print(f"❌ {exc}", file=sys.stderr)
        return EXIT_FAILED


def main() -> int:
    return run_subcommand(sys.argv[1:])
