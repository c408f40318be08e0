"""Command-line front end: `solve` runs the built-in experiments, `verify`
runs the kernel/quadrature property checks."""

import argparse
import sys

from .experiments import (PROBLEM_IDS, ExperimentSpec, format_report,
                          run_experiment)
from .validation import verify_green_properties, verify_quadrature_bound


def _parse_m_list(text):
    try:
        values = tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError("expected a comma-separated list of integers")
    if not values or any(v < 1 for v in values):
        raise argparse.ArgumentTypeError("subinterval counts must be positive")
    return values


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fourbvp",
        description="Fourth-order boundary value problems via second-kind "
                    "integral equations, boundary matching, and deferred "
                    "corrections.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("solve", help="run a built-in experiment")
    run.add_argument("--problem", required=True, choices=PROBLEM_IDS)
    run.add_argument("--m", required=True, type=_parse_m_list,
                     metavar="M1,M2,...", help="subinterval counts")
    run.add_argument("--n", type=int, default=0,
                     help="nodes per subinterval (default per problem)")
    run.add_argument("--max-iters", type=int, default=None)
    run.add_argument("--tol", type=float, default=None,
                     help="target relative residual")
    run.add_argument("--csv", default=None, metavar="DIR",
                     help="write CSV tables (and figures) to this directory")
    run.add_argument("--eval-grid", type=int, default=10000,
                     help="points in the error grid (default 10000)")
    run.add_argument("--no-figures", action="store_true",
                     help="skip rendering figures next to the CSV output")

    sub.add_parser("verify", help="check kernel and quadrature properties")
    return parser


def run_solve(args):
    spec = ExperimentSpec(args.problem, args.m, args.n)
    report = run_experiment(spec, output_dir=args.csv,
                            max_iterations=args.max_iters, target=args.tol,
                            eval_grid=args.eval_grid,
                            figures=not args.no_figures)
    print(format_report(report))
    if args.csv:
        print(f"\nCSV tables written to {args.csv}")
    return 1 if report.failed else 0


def run_verify():
    results = list(verify_green_properties())
    results += [verify_quadrature_bound(n) for n in (4, 8)]
    for result in results:
        print(result)
    return 0 if all(r.passed for r in results) else 1


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "solve":
        return run_solve(args)
    return run_verify()


if __name__ == "__main__":
    sys.exit(main())
