"""Command line front end.

    nonspecific analyze --input bakers.json --format human
    nonspecific partition --input bakers.json
    nonspecific oracle --input bakers.json

Exit codes: 0 success, 2 input error, 3 degenerate or total conflict,
4 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import pipeline
from .errors import NonspecificError
from .metaconflict import brute_force_minimize, minimize


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", required=True, metavar="PATH", help="evidence file (JSON)")
    p.add_argument("--restarts", type=int, default=32, metavar="N")
    p.add_argument("--seed", type=int, default=0, metavar="S")
    p.add_argument("--exact-threshold", type=int, default=8, metavar="N",
                   help="solve exactly when there are at most N pieces of evidence")
    p.add_argument("--format", choices=("structured", "human"), default="structured")
    p.add_argument("--queries", default=None, metavar="LIST",
                   help="comma separated propositions, e.g. 'B,BO,R@E2,E1'")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nonspecific",
        description="Partition and specify nonspecific evidence (Dempster-Shafer).")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (("partition", "minimize the metaconflict"),
                        ("specify", "partition, then specify every piece of evidence"),
                        ("analyze", "full pipeline"),
                        ("assign-events", "full refined pipeline, report event assignment"),
                        ("oracle", "compare the search against exhaustive enumeration")):
        p = sub.add_parser(name, help=help_)
        _add_common(p)
        if name == "analyze":
            p.add_argument("--mode", choices=(pipeline.REFINED, pipeline.OVERCONFIDENT),
                           default=pipeline.REFINED)
    return parser


def _config(args) -> pipeline.RunConfig:
    queries = tuple(args.queries.split(",")) if args.queries else None
    return pipeline.RunConfig(restarts=args.restarts, seed=args.seed,
                              exact_threshold=args.exact_threshold, queries=queries)


def _oracle(inputs: pipeline.Inputs, config: pipeline.RunConfig, fmt: str) -> tuple[bytes, bool]:
    bf_part, bf_prof = brute_force_minimize(inputs.evidences, inputs.prior, cap=config.cap)
    ls_part, ls_prof = minimize(inputs.evidences, inputs.prior, restarts=config.restarts,
                                seed=config.seed, exact_threshold=0, cap=config.cap)
    agree = abs(bf_prof.mcf - ls_prof.mcf) <= 1e-9
    doc = {
        "brute_force": {"partition": [list(b) for b in bf_part.blocks], "mcf": bf_prof.mcf},
        "search": {"partition": [list(b) for b in ls_part.blocks], "mcf": ls_prof.mcf},
        "agree": agree,
    }
    if fmt == "human":
        text = (f"brute force: {bf_part.blocks}  Mcf = {bf_prof.mcf:.4f}\n"
                f"search:      {ls_part.blocks}  Mcf = {ls_prof.mcf:.4f}\n"
                f"agree: {agree}\n")
        return text.encode(), agree
    return (json.dumps(doc, indent=2, sort_keys=True) + "\n").encode(), agree


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        inputs = pipeline.load_inputs(args.input)
        config = _config(args)
        if args.command == "oracle":
            data, agree = _oracle(inputs, config, args.format)
            sys.stdout.buffer.write(data)
            return 0 if agree else 1
        if args.command == "partition":
            report = pipeline.run_partition(inputs, config)
        elif args.command == "specify":
            report = pipeline.run_refined(inputs, config, assign=False)
            report.subsets = []
        elif args.command == "assign-events":
            report = pipeline.run_refined(inputs, config)
        else:
            report = pipeline.run(inputs, args.mode, config)
        sys.stdout.buffer.write(pipeline.emit_report(report, args.format, inputs))
    except NonspecificError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    sys.stdout.flush()
    return 0


if __name__ == "__main__":
    sys.exit(main())
