"""
Command-line entry point: `subbary <command> ...`

Exit codes: 0 success, 1 property violation found, 2 input/parse error,
3 domain error. Results go to stdout as JSON (or CSV with --emit csv),
logs go to stderr.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import __version__
from .models.errors import DomainError, InputError, ParseError
from .models.geometry import SIDES, Direction, SliceSpec
from .models.suite import SUITES, SuiteConfig
from .services.convex_body import ConvexBodyKernel
from .services.eckardt import EckardtExample
from .services.invariants import InvariantCalculator
from .services.profile_engine import ProfileEngine
from .services.verifier import PropertyVerifier
from .utils.config import Settings
from .utils.database import ResultStore
from .utils.exact import to_fraction
from .utils.numeric import format_number
from .utils.serialization import (
    FORMATS,
    load_body,
    load_discrete_candidates,
    load_profile,
    load_valuations,
    render_json,
    render_table,
)

logger = logging.getLogger(__name__)

REPORT_COLUMNS = [
    "tau", "n", "delta_tau", "delta_tilde_tau", "threshold", "weak_threshold",
    "verdict", "weak_verdict", "argmin", "delta_lower_bound", "skipped",
]
DISCRETE_COLUMNS = ["m", "n", "discrete_delta_tilde", "argmin", "skipped"]
PROFILE_COLUMNS = ["t", "n", "p", "lhs", "rhs", "slack", "dual_slack"]


def _int_list(text: str) -> List[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _require_positive(args, *names: str):
    """Count flags are checked before any computation starts"""
    for name in names:
        value = getattr(args, name, None)
        if value is not None and value < 1:
            raise ParseError(f"{name.replace('_', '-')} must be at least 1, got {value}", name)


def parse_taus(text: str) -> List[float]:
    """'0.5', '0,0.5,1' or 'grid:N' (N equally spaced values on [0, 1])"""
    text = text.strip()
    if text.startswith("grid:"):
        try:
            count = int(text[len("grid:"):])
        except ValueError:
            raise ParseError(f"not a grid size: {text!r}", "tau")
        if count < 2:
            raise ParseError(f"grid needs at least 2 points, got {count}", "tau")
        return [float(x) for x in np.linspace(0.0, 1.0, count)]
    return [float(to_fraction(x, "tau")) for x in text.split(",")]


def _format_row(data: Dict) -> Dict:
    row = {}
    for key, value in data.items():
        if isinstance(value, float):
            row[key] = format_number(value)
        elif isinstance(value, (tuple, list)):
            row[key] = ";".join(map(str, value))
        else:
            row[key] = value
    return row


def _emit(text: str, out: Optional[str] = None):
    if out:
        Path(out).write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")
        logger.info(f"Wrote {out}")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


# ----------------------------------------------------------------------
# commands
# ----------------------------------------------------------------------

def cmd_slice(args, settings: Settings) -> int:
    kernel = ConvexBodyKernel()
    body = load_body(args.body, kernel)
    direction = Direction.parse(args.direction, body.dim)
    spec = SliceSpec(direction=direction, t=to_fraction(args.t, "t"), side=args.side)
    _emit(render_json(kernel.slice_report(body, spec, exact=args.exact)))
    return 0


def cmd_invariants(args, settings: Settings) -> int:
    calculator = InvariantCalculator()
    if args.discrete:
        candidates = load_discrete_candidates(args.discrete)
        if args.n is None:
            raise ParseError("--n is required with --discrete", "n")
        rows = []
        for m in args.m:
            best = calculator.discrete_delta_tilde(candidates, m, args.n)
            rows.append(_format_row({
                "m": m, "n": args.n, "discrete_delta_tilde": best.value,
                "argmin": best.argmin, "skipped": best.skipped,
            }))
        _emit(render_table(rows, DISCRETE_COLUMNS, args.emit))
        return 0

    if not args.valuations:
        raise ParseError("a valuations file (or --discrete) is required", "valuations")
    candidates = load_valuations(args.valuations, calculator.kernel, args.allow_nonpositive_A)
    n = args.n if args.n is not None else candidates[0].n
    rows = []
    for tau in parse_taus(args.tau):
        report = calculator.stability_report(candidates, tau, n)
        rows.append(_format_row(report.to_dict()))
    logger.info(f"Computed {len(rows)} stability report(s) over {len(candidates)} candidate(s)")
    _emit(render_table(rows, REPORT_COLUMNS, args.emit))
    return 0


def cmd_profile_check(args, settings: Settings) -> int:
    _require_positive(args, "t_grid", "pieces")
    engine = ProfileEngine()
    if args.random:
        seed = args.seed if args.seed is not None else settings.seed
        profile = PropertyVerifier(engine.kernel).gen_profile(np.random.default_rng(seed), args.pieces)
    elif args.profile:
        profile = load_profile(args.profile)
    else:
        raise ParseError("a profile file or --random is required", "profile")

    rows, worst = [], 0.0
    for t in np.linspace(0.0, profile.T, args.t_grid):
        check = engine.check_weighted_nh(profile, args.n, args.p, float(t))
        dual = engine.check_dual_nh(profile, args.n, float(t))
        worst = min(worst, check.slack, dual.slack)
        rows.append(_format_row({**check.to_dict(), "dual_slack": dual.slack}))
    _emit(render_table(rows, PROFILE_COLUMNS, args.emit))
    if worst < -settings.tolerance:
        logger.warning(f"Profile check failed: minimum slack {worst}")
        return 1
    return 0


def _suite_config(args, settings: Settings) -> SuiteConfig:
    _require_positive(args, "bodies", "t_grid", "profiles", "okounkov_bodies",
                      "tau_grid", "mc_bodies", "mc_samples", "workers")
    overrides = {
        "bodies": args.bodies,
        "dims": args.dims,
        "t_grid": args.t_grid,
        "profiles": args.profiles,
        "okounkov_bodies": args.okounkov_bodies,
        "tau_grid": args.tau_grid,
        "mc_bodies": args.mc_bodies,
        "mc_samples": args.mc_samples,
    }
    return SuiteConfig(
        seed=args.seed if args.seed is not None else settings.seed,
        tolerance=settings.tolerance,
        workers=args.workers if args.workers is not None else settings.workers,
        **{key: value for key, value in overrides.items() if value is not None},
    )


def cmd_verify(args, settings: Settings) -> int:
    config = _suite_config(args, settings)
    result = PropertyVerifier().run_suite(config, args.suite)
    report = result.to_dict(include_meta=not args.no_meta)

    db_path = args.db or settings.db_path
    if db_path:
        run_id = ResultStore(db_path).save_suite_result(config, result)
        if not args.no_meta:
            report["run_id"] = run_id

    text = render_json(report)
    if args.report:
        _emit(text, args.report)
    _emit(text)
    return 0 if result.passed else 1


def cmd_eckardt(args, settings: Settings) -> int:
    example = EckardtExample()
    if args.summary:
        _emit(render_json(example.eck_summary(args.grid)), args.out)
    else:
        _emit(example.eck_emit_curve(args.samples, args.emit), args.out)
    return 0


# ----------------------------------------------------------------------
# parser
# ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="subbary",
        description="Sub-barycenter inequalities for convex bodies and the stability thresholds built on them",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--verbose", "-v", action="store_true", help="Log progress at INFO level")
    parser.add_argument("--no-meta", action="store_true", help="Omit runtimes and run ids from reports")
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("slice", help="Volume and sub-barycenter of a half-space slice")
    p.add_argument("body", help="Body JSON file ({dim, vertices})")
    p.add_argument("--direction", default="1", help="Axis index (1-based) or comma-separated vector")
    p.add_argument("--t", required=True, help="Threshold (decimal or p/q)")
    p.add_argument("--side", choices=SIDES, default="ge")
    p.add_argument("--exact", action="store_true", help="Write rationals as p/q")
    p.set_defaults(handler=cmd_slice)

    p = commands.add_parser("invariants", help="Stability reports over candidate valuations")
    p.add_argument("valuations", nargs="?", help="Valuations JSON file")
    p.add_argument("--tau", default="grid:11", help="Value, comma list or grid:N")
    p.add_argument("--n", type=int, help="Dimension (defaults to the Okounkov body dimension)")
    p.add_argument("--emit", choices=FORMATS, default="json")
    p.add_argument("--allow-nonpositive-A", dest="allow_nonpositive_A", action="store_true")
    p.add_argument("--discrete", help="Candidates with jumping numbers instead of bodies")
    p.add_argument("--m", type=_int_list, default=[1], help="Comma-separated m values for --discrete")
    p.set_defaults(handler=cmd_invariants)

    p = commands.add_parser("verify", help="Randomized verification suites")
    p.add_argument("--suite", choices=SUITES + ("all",), default="all")
    p.add_argument("--seed", type=int)
    p.add_argument("--bodies", type=int)
    p.add_argument("--dims", type=_int_list)
    p.add_argument("--t-grid", dest="t_grid", type=int)
    p.add_argument("--profiles", type=int)
    p.add_argument("--okounkov-bodies", dest="okounkov_bodies", type=int)
    p.add_argument("--tau-grid", dest="tau_grid", type=int)
    p.add_argument("--mc-bodies", dest="mc_bodies", type=int)
    p.add_argument("--mc-samples", dest="mc_samples", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--report", help="Also write the JSON report to this file")
    p.add_argument("--db", help="sqlite file in which to store the run")
    p.set_defaults(handler=cmd_verify)

    p = commands.add_parser("eckardt", help="The cubic surface example: ratio curve and golden values")
    p.add_argument("--samples", type=int, default=101)
    p.add_argument("--emit", choices=FORMATS, default="csv")
    p.add_argument("--out", help="Write to this file instead of stdout")
    p.add_argument("--summary", action="store_true", help="Golden values and cross-checks instead of the curve")
    p.add_argument("--grid", type=int, default=1000, help="Grid size for --summary checks")
    p.set_defaults(handler=cmd_eckardt)

    p = commands.add_parser("profile-check", help="Functional inequality slacks for a concave profile")
    p.add_argument("profile", nargs="?", help="Profile JSON file ({T, breakpoints, values})")
    p.add_argument("--random", action="store_true", help="Draw a random concave profile instead")
    p.add_argument("--pieces", type=int, default=4)
    p.add_argument("--seed", type=int)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--t-grid", dest="t_grid", type=int, default=64)
    p.add_argument("--emit", choices=FORMATS, default="json")
    p.set_defaults(handler=cmd_profile_check)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        settings = Settings.from_env()
        level = logging.INFO if args.verbose else getattr(logging, settings.log_level)
        logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
        return args.handler(args, settings)
    except InputError as e:
        print(f"subbary: error: {e}", file=sys.stderr)
        return 2
    except DomainError as e:
        print(f"subbary: error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
