"""Run a selection of registered checks and print a timing table.

    python3 scripts/run_all_checks.py fast
    python3 scripts/run_all_checks.py all --json report.json
"""
import argparse
import json
import sys

from frobmult import verify_cli as vc


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("selector", nargs="?", default="fast")
    ap.add_argument("--optional", action="store_true")
    ap.add_argument("--json")
    args = ap.parse_args(argv)

    config = vc.RunConfig(optional=args.optional)
    reports, status = vc.run_suite(args.selector, config)
    width = max((len(r.check) for r in reports), default=10)
    for r in sorted(reports, key=lambda r: -r.seconds):
        print(f"{r.check:<{width}}  {r.status:<15} {r.seconds:8.2f}s  {r.computed}")
    print(f"total {sum(r.seconds for r in reports):.1f}s, exit status {status}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(vc.report_json(reports, config, args.selector), fh, indent=2)
    return status


if __name__ == "__main__":
    sys.exit(main())
