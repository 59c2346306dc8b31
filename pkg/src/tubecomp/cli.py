"""Command line interface.

Exit codes: 0 when every verdict is conclusive, 2 when any verdict is
INCONCLUSIVE, 1 on errors (bad arguments, unparseable scenarios, maps that
fail self-map validation, I/O problems).
"""

import argparse
import sys

from .report import render_csv, render_json, run_scenario, write_report
from .scenarios import BUILTIN_SCENARIOS, ScenarioError, resolve_scenario
from .selfmaps import ParseError


class _ArgumentParser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors, which collides with the
    # inconclusive exit code; remap to the error code 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, "%s: error: %s\n" % (self.prog, message))


def build_parser():
    parser = _ArgumentParser(
        prog="tubecomp",
        description="Boundedness and compactness evidence for differences of "
        "composition operators on weighted-sup spaces over products of half-planes.",
    )
    sub = parser.add_subparsers(dest="command", metavar="command", required=True)

    check = sub.add_parser(
        "check",
        help="analyze a scenario (builtin name or scenario file path)",
        description="Run the boundedness and compactness analyses for one scenario.",
    )
    check.add_argument("scenario", help="builtin scenario name or path to a scenario file")
    check.add_argument("--seed", type=int, default=None, help="search seed override")
    check.add_argument("--starts", type=int, default=None, help="number of multistart samples")
    check.add_argument("--refine-steps", type=int, default=None, help="local refinement steps")
    check.add_argument(
        "--threshold", type=float, default=None, help="divergence threshold for trace verdicts"
    )
    check.add_argument(
        "--epsilon-compact", type=float, default=None, help="compactness limsup tolerance"
    )
    check.add_argument("--out", default=None, help="write the report to this path")
    check.add_argument("--format", choices=("json", "csv"), default="json", help="report format")
    check.add_argument(
        "--no-plots", action="store_true", help="skip the diagnostic figures next to --out"
    )

    verify = sub.add_parser(
        "verify-lemmas",
        help="run the numerical verification suites against their calibrated caps",
        description="Sample-based checks of the geometric and growth inequalities.",
    )
    verify.add_argument("--seed", type=int, default=0, help="sampling seed")
    verify.add_argument("--samples", type=int, default=2000, help="samples per suite")

    sub.add_parser("scenarios-list", help="list the builtin scenarios")
    return parser


def _cmd_check(args):
    scenario = resolve_scenario(args.scenario)
    cfg = scenario.config(
        {
            "seed": args.seed,
            "starts": args.starts,
            "refine_steps": args.refine_steps,
            "unbounded_threshold": args.threshold,
            "compact_epsilon": args.epsilon_compact,
        }
    )
    report = run_scenario(scenario, cfg)
    if args.out:
        write_report(report, args.out, args.format)
        print("boundedness: %s (sup estimate %.6g)" % (
            report["boundedness"]["verdict"], report["boundedness"]["sup_estimate"]))
        print("compactness: %s (limsup phi %.6g, psi %.6g)" % (
            report["compactness"]["verdict"],
            report["compactness"]["limsup_phi"],
            report["compactness"]["limsup_psi"]))
        print("wrote %s" % args.out)
        if not args.no_plots:
            from .plots import render_figures

            for path in render_figures(report, args.out):
                print("wrote %s" % path)
    else:
        text = render_json(report) if args.format == "json" else render_csv(report)
        sys.stdout.write(text)
    return report["exit_code"]


def _cmd_verify(args):
    from .suites import run_all

    results = run_all(seed=args.seed, samples=args.samples)
    name_w = max(len(r.name) for r in results)
    failures = 0
    for r in results:
        status = "ok" if r.ok else "FAIL"
        failures += 0 if r.ok else 1
        print("%-*s  samples=%-6d worst=%-12.6g cap=%-12.6g %s" % (
            name_w, r.name, r.samples, r.worst, r.cap, status))
    if failures:
        print("%d suite(s) exceeded their caps" % failures, file=sys.stderr)
        return 1
    return 0


def _cmd_list(_args):
    for name in sorted(BUILTIN_SCENARIOS):
        sc = BUILTIN_SCENARIOS[name]
        expect = []
        if sc.expected_bounded is not None:
            expect.append("bounded=%s" % str(sc.expected_bounded).lower())
        if sc.expected_compact is not None:
            expect.append("compact=%s" % str(sc.expected_compact).lower())
        print("%-20s n=%d  phi = %s ; psi = %s  [%s]" % (
            name, sc.n, sc.phi_text, sc.psi_text, ", ".join(expect)))
    return 0


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    try:
        if args.command == "check":
            return _cmd_check(args)
        if args.command == "verify-lemmas":
            return _cmd_verify(args)
        return _cmd_list(args)
    except (ScenarioError, ParseError, ValueError, OSError) as exc:
        print("error: %s" % (exc,), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
