"""Command line entry point.

Exit codes: 0 success, 1 internal failure or failed rows, 2 usage error.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import runner
from .config import ConfigError, RunConfig, parse_angle, parse_grid
from .fitting import RankDeficientError
from .geometry import SectorConfig
from .sweep import CapacityError

log = logging.getLogger("cornerlaw")


def _angle(text):
    try:
        return parse_angle(text)
    except ConfigError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _grid(text):
    try:
        return parse_grid(text)
    except ConfigError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _pair(text):
    try:
        u, v = (float(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'u,v', got {text!r}") from None
    return u, v


def _radii(text):
    try:
        return tuple(float(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated radii, got {text!r}") from None


def _positive_int(text):
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {n}")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML file with run configuration keys")
    common.add_argument("--output-dir", help="root directory for artifacts "
                        "(env CORNERLAW_OUTPUT_DIR)")
    common.add_argument("--force", action="store_true", help="ignore cached outputs")
    common.add_argument("-v", "--verbose", action="store_true")

    grids = argparse.ArgumentParser(add_help=False)
    grids.add_argument("--r-list", type=_radii, help="comma-separated radii, e.g. 4,8,16,32")
    grids.add_argument("--theta-grid", type=_grid, metavar="START:STOP:COUNT",
                       help="theta grid, e.g. 0.02pi:0.99pi:60")
    grids.add_argument("--phi-steps", type=_positive_int)
    grids.add_argument("--apex-steps", type=_positive_int)
    grids.add_argument("--fit-theta-min", type=_angle)
    grids.add_argument("--fit-theta-max", type=_angle)
    grids.add_argument("--quad-tol", type=float)
    grids.add_argument("--workers", type=_positive_int, default=1,
                       help="processes for the sweep (results do not depend on it)")

    parser = argparse.ArgumentParser(prog="cornerlaw", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    count = sub.add_parser("count", parents=[common], help="exact counts for one wedge")
    count.add_argument("--theta", type=_angle, required=True)
    count.add_argument("--phi", type=_angle, default=0.0)
    count.add_argument("--apex", type=_pair, default=(0.5, 0.5))
    count.add_argument("--r", type=float, required=True)

    for name, text in (("sweep", "orientation/apex-averaged counts"),
                       ("fit", "fit averaged counts to the corner model"),
                       ("analytic", "closed forms vs quadrature vs grid frequencies"),
                       ("plot", "SVG figures of counts, fits and the analytic comparison")):
        sub.add_parser(name, parents=[common, grids], help=text)

    peps = sub.add_parser("pepscheck", parents=[common], help="Schmidt rank vs bond-dimension bound")
    peps.add_argument("--instances", type=_positive_int, default=200)
    peps.add_argument("--bipartitions", type=_positive_int, default=5)
    peps.add_argument("--seed", type=int)
    peps.add_argument("--rank-tol", type=float)
    return parser


def resolve_config(args) -> RunConfig:
    overrides = {"output_dir": args.output_dir}
    grid = getattr(args, "theta_grid", None)
    if grid is not None:
        overrides.update(theta_min=grid[0], theta_max=grid[1], theta_steps=grid[2])
    for key in ("r_list", "phi_steps", "apex_steps", "fit_theta_min", "fit_theta_max",
                "quad_tol", "seed", "rank_tol"):
        overrides[key] = getattr(args, key, None)
    return RunConfig.load(args.config, **overrides)


def _report(outcome) -> None:
    state = "cache hit" if outcome.cached else "wrote"
    for f in outcome.files:
        print(f"{state}: {outcome.directory / f}")


def dispatch(args) -> int:
    cfg = resolve_config(args)
    workers = getattr(args, "workers", 1)

    if args.command == "count":
        sector = SectorConfig(apex_offset=args.apex, phi=args.phi, theta=args.theta,
                              radius=args.r)
        result, row, outcome = runner.cmd_count(cfg, sector, force=args.force)
        print(",".join(runner.COUNT_COLUMNS))
        print(",".join(runner.fmt(v) for v in row))
        log.info("cut bonds: %s", result.cut_bonds)
        _report(outcome)
        return 0

    if args.command == "sweep":
        _, outcome = runner.cmd_sweep(cfg, workers, args.force)
    elif args.command == "fit":
        trend, outcome = runner.cmd_fit(cfg, workers, args.force)
        print(f"relative spread of |beta|: legs {trend.relative_spread_legs:.3g}, "
              f"corners {trend.relative_spread_corners:.3g}")
    elif args.command == "analytic":
        _, outcome = runner.cmd_analytic(cfg, args.force)
    elif args.command == "pepscheck":
        outcome = runner.cmd_pepscheck(cfg, args.instances, args.bipartitions, args.force)
    else:
        outcome = runner.cmd_plot(cfg, workers, args.force)
    _report(outcome)
    if not outcome.ok:
        print(f"{outcome.failures} row(s) failed", file=sys.stderr)
        return 1
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return dispatch(args)
    except (ConfigError, ValueError, CapacityError, RankDeficientError) as exc:
        print(f"cornerlaw {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        log.exception("internal failure")
        print(f"cornerlaw {args.command}: internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
