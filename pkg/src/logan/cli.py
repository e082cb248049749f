"""``logan`` command line: check, score, generate, probe, repro."""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import harness
from .builder import build
from .certificates import check, get_theory
from .ef import ProbeBudget, approx_round_resilience, exact_round_resilience, spoiler_witness
from .graphs import read_graph, write_graph
from .loss import LossWeights, logical_loss, make_bank


def _read(path):
    if path == "-":
        return read_graph(sys.stdin)
    with open(path) as fh:
        return read_graph(fh)


def _budget(args) -> ProbeBudget:
    return ProbeBudget(k=args.k, S=args.budget_s, b=args.budget_b, timeout_ms=args.timeout_ms)


def cmd_check(args):
    g = _read(args.graph)
    theory = get_theory(args.property)
    holds, witness = check(theory, g)
    line = f"{theory.name} {'PASS' if holds else 'FAIL'}"
    if witness is not None:
        line += f" witness: {witness.describe()}"
    print(line)
    return 0 if holds else 1


def cmd_score(args):
    g = _read(args.graph)
    theory = get_theory(args.property)
    bank = make_bank(theory, args.bank_size, g.n, args.seed)
    result = logical_loss(g, bank, LossWeights.default(theory), _budget(args))
    for line in result.lines():
        print(line)
    return 0


def cmd_generate(args):
    theory = get_theory(args.property)
    bank = make_bank(theory, args.bank_size, args.n, args.seed)
    g, trace = build(theory, args.n, bank, LossWeights.default(theory), _budget(args),
                     max_iters=args.iters, seed=args.seed)
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        with open(out, "w") as fh:
            write_graph(g, fh)
        with open(out.with_name(out.name + ".trace"), "w") as fh:
            fh.write("\n".join(trace.lines()) + "\n")
    else:
        write_graph(g, sys.stdout)
        print("\n".join(trace.lines()))
    return 0 if trace.satisfied else 1


def cmd_probe(args):
    g, h = _read(args.graph), _read(args.other)
    if args.exact:
        r = exact_round_resilience(g, h, args.k)
        print(f"exact_rounds={r}")
        w = spoiler_witness(g, h, args.k)
        if w is not None:
            print(f"witness_depth={w.depth}")
            print("\n".join(w.lines()))
        return 0
    res = approx_round_resilience(g, h, _budget(args))
    print(f"rounds={res.rounds}")
    print(f"timed_out={int(res.timed_out)}")
    print(f"positions={res.positions}")
    return 0


def cmd_repro(args):
    budget = _budget(args)
    if args.config:
        overrides = harness.load_config(args.config)
        exp = overrides.pop("experiment", "exp1")
        overrides.setdefault("out", args.out)
        overrides.setdefault("seed", args.seed)
        cfg = harness.ExperimentConfig.defaults(exp, **overrides)
        if args.quick:
            cfg = cfg.quick()
        runner = {"exp1": harness.run_exp1, "exp2": harness.run_exp2, "exp3": harness.run_exp3}[exp]
        bands = {"exp1": harness.exp1_bands, "exp2": harness.exp2_bands, "exp3": harness.exp3_bands}[exp]
        checks = bands(runner(cfg))
        for c in checks:
            print(c.line())
        return 0 if all(c.ok for c in checks) else 1
    summary = harness.run_all(out=args.out, seed=args.seed, quick=args.quick,
                              workers=args.workers, budget=budget)
    return 0 if summary.ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="logan", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--property", default="bipartite")
    common.add_argument("--k", type=int, default=3)
    common.add_argument("--budget-s", type=int, default=16)
    common.add_argument("--budget-b", type=int, default=4)
    common.add_argument("--timeout-ms", type=float, default=2000.0)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--bank-size", type=int, default=20)

    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("check", parents=[common], help="run a property checker on a graph file")
    p.add_argument("graph")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("score", parents=[common], help="logical loss with per-term breakdown")
    p.add_argument("graph")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("generate", parents=[common], help="certificate-guided generation")
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--iters", type=int, default=500)
    p.add_argument("--out")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("probe", parents=[common], help="EF round-resilience of two graphs")
    p.add_argument("graph")
    p.add_argument("other")
    p.add_argument("--exact", action="store_true", help="full minimax plus Spoiler witness")
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("repro", parents=[common], help="run the experiments and check bands")
    p.add_argument("--out", default="results")
    p.add_argument("--quick", action="store_true")
    p.add_argument("--config", help="YAML file of ExperimentConfig overrides for one experiment")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_repro)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
