"""Command-line entry points: batch scenario runs and the live gateway."""

from __future__ import annotations

import argparse
import sys
from datetime import datetime

from .errors import ScenarioParseError, SimError
from .scenario import load_scenario, run_scenario

EXIT_OK = 0
EXIT_ASSERTION = 1
EXIT_USAGE = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="citysim",
        description="Deterministic smart-city simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a scenario file and check its assertions")
    run_p.add_argument("--scenario", required=True, help="scenario file (JSON lines)")
    run_p.add_argument("--out", required=True, help="directory for CSV/JSON/transcript exports")
    run_p.add_argument("--until-ms", type=int, default=None,
                       help="keep simulating until this virtual time")
    run_p.add_argument("--epoch", default=None,
                       help="ISO-8601 date-time mapped to virtual time 0")
    run_p.add_argument("--seed", type=int, default=None)

    serve_p = sub.add_parser("serve", help="serve the operator gateway for live control")
    serve_p.add_argument("--scenario", required=True,
                         help="scenario file seeding the initial world")
    serve_p.add_argument("--listen", default="127.0.0.1:8000",
                         help="host:port to bind")
    return parser


def _cmd_run(args) -> int:
    try:
        scenario = load_scenario(args.scenario)
    except OSError as exc:
        print(f"citysim: cannot read scenario: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ScenarioParseError as exc:
        print(f"citysim: {args.scenario}: {exc}", file=sys.stderr)
        return EXIT_USAGE

    epoch = None
    if args.epoch is not None:
        try:
            epoch = datetime.fromisoformat(args.epoch)
        except ValueError:
            print(f"citysim: --epoch {args.epoch!r} is not ISO-8601", file=sys.stderr)
            return EXIT_USAGE

    try:
        city, results = run_scenario(scenario, out_dir=args.out,
                                     until_ms=args.until_ms,
                                     epoch=epoch, seed=args.seed)
    except SimError as exc:
        print(f"citysim: simulation error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    failures = 0
    for r in results:
        status = "PASS" if r["ok"] else "FAIL"
        line = (f"{status} at_ms={r['at_ms']} {r['query']} "
                f"expected={r['expected']!r} actual={r['actual']!r}")
        print(line)
        if not r["ok"]:
            failures += 1
    print(f"{len(results)} assertions, {failures} failed; "
          f"final virtual time {city.kernel.now()} ms")
    return EXIT_ASSERTION if failures else EXIT_OK


def _cmd_serve(args) -> int:
    from .gateway import serve  # deferred: pulls in the web stack

    try:
        scenario = load_scenario(args.scenario)
    except OSError as exc:
        print(f"citysim: cannot read scenario: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ScenarioParseError as exc:
        print(f"citysim: {args.scenario}: {exc}", file=sys.stderr)
        return EXIT_USAGE

    host, _, port_text = args.listen.rpartition(":")
    if not host or not port_text.isdigit():
        print(f"citysim: --listen must be host:port, got {args.listen!r}",
              file=sys.stderr)
        return EXIT_USAGE
    serve(scenario, host=host, port=int(port_text))
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    return _cmd_serve(args)


if __name__ == "__main__":
    sys.exit(main())
