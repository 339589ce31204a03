"""Command-line interface: build, run, sweep, verify.

Exit codes: 0 success, 1 property failure (a run failed to stabilise within
the bound, or a verify suite failed), 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys

from sscount.core import ConfigurationError
from sscount.counters import guard_band
from sscount import harness


def _add_construction_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", default=None, metavar="FILE",
                   help="load settings from a config file; flags override it")
    p.add_argument("-n", type=int, help="number of nodes")
    p.add_argument("-f", type=int, help="resilience")
    p.add_argument("-c", type=int, help="counter period")
    p.add_argument("--mode", default=None, choices=harness.MODES)
    p.add_argument("--kappa", type=int, default=None, help="silencing window")
    p.add_argument("--gamma", type=float, default=None, help="pulling slack")
    p.add_argument("-k", type=int, default=None, help="pulling error exponent")
    p.add_argument("--eta", type=int, default=None,
                   help="pulling system size (default: n)")
    p.add_argument("-K", type=int, default=None,
                   help="pulling sample count (default: derived)")
    p.add_argument("--master-seed", type=int, default=None,
                   help="frozen-topology master seed")


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--adversary", default=None)
    p.add_argument("--seeds", default=None,
                   help="either a count (e.g. 100) or a list (e.g. 1,2,7)")
    p.add_argument("--horizon", type=int, default=None,
                   help="rounds to simulate (default: bound + guard band)")
    p.add_argument("--allow-short-horizon", action="store_true")
    p.add_argument("--output", default=None, help="output directory")


def _parse_seeds(raw: str) -> tuple:
    parts = raw.replace(",", " ").split()
    if len(parts) == 1 and "," not in raw and int(parts[0]) > 0 and raw.strip().isdigit():
        return tuple(range(int(parts[0])))
    return tuple(int(s) for s in parts)


def _config_from_args(args) -> harness.ExperimentConfig:
    kwargs: dict = {}
    if args.config is not None:
        try:
            with open(args.config, encoding="utf-8") as fh:
                base = harness.parse_config(fh.read())
        except OSError as exc:
            raise ConfigurationError(f"cannot read {args.config}: {exc}")
        kwargs = base.as_dict()
        kwargs["seeds"] = tuple(kwargs["seeds"])
    overrides = {
        "n": args.n, "f": args.f, "c": args.c, "mode": args.mode,
        "kappa": args.kappa, "gamma": args.gamma, "k": args.k,
        "eta": args.eta, "K": args.K, "master_seed": args.master_seed,
        "adversary": getattr(args, "adversary", None),
        "horizon": getattr(args, "horizon", None),
        "out_dir": getattr(args, "output", None),
    }
    if getattr(args, "seeds", None) is not None:
        overrides["seeds"] = _parse_seeds(args.seeds)
    if getattr(args, "allow_short_horizon", False):
        overrides["allow_short_horizon"] = True
    kwargs.update({k: v for k, v in overrides.items() if v is not None})
    missing = {"n", "f", "c"} - set(kwargs)
    if missing:
        raise ConfigurationError(
            f"missing required settings {sorted(missing)}; pass flags "
            "or a config file")
    return harness.ExperimentConfig(**kwargs)


def cmd_build(args) -> int:
    cfg = _config_from_args(args)
    tree, alg = harness.build_experiment(cfg)
    print(tree.describe())
    print(f"analytic time bound : {tree.analytic_time_bound}")
    print(f"exact state bits    : {tree.exact_state_bits}")
    print(f"pulls per round     : {tree.pulls_per_round}")
    print(f"guard band          : {guard_band(tree)}")
    report = {
        "n": cfg.n, "f": cfg.f, "c": cfg.c, "mode": cfg.mode,
        "depth": tree.depth,
        "analytic_time_bound": tree.analytic_time_bound,
        "analytic_state_bits": tree.analytic_state_bits,
        "exact_state_bits": tree.exact_state_bits,
        "pulls_per_round": tree.pulls_per_round,
        "guard_band": guard_band(tree),
    }
    print(json.dumps(report, sort_keys=True))
    return 0


def cmd_run(args) -> int:
    cfg = _config_from_args(args)
    if args.print_config:
        print(harness.print_config(cfg), end="")
        return 0
    status = 0
    for seed in cfg.seeds:
        _, metrics = harness.run_one(cfg, seed)
        verdict = (f"stabilised at {metrics.stabilisation_round}"
                   if metrics.stabilised else "did NOT stabilise")
        print(f"seed {seed}: {verdict} "
              f"(bound {metrics.analytic_bound}, horizon {metrics.horizon}); "
              f"trace: {harness.trace_path(cfg, seed)}")
        if (not metrics.stabilised
                or metrics.stabilisation_round > metrics.analytic_bound):
            status = 1
    return status


def cmd_sweep(args) -> int:
    cfg = _config_from_args(args)
    if args.print_config:
        print(harness.print_config(cfg), end="")
        return 0
    rows = harness.sweep(cfg)
    bad = [m for m in rows
           if not m.stabilised or m.stabilisation_round > m.analytic_bound]
    print(f"{len(rows)} runs, {len(rows) - len(bad)} within the analytic "
          f"bound; metrics: {cfg.out_dir}/metrics.csv")
    for m in bad:
        print(f"  seed {m.seed}: "
              + ("did not stabilise" if not m.stabilised
                 else f"stabilised late at {m.stabilisation_round}"))
    return 1 if bad else 0


def cmd_verify(args) -> int:
    ok, lines = harness.verify(args.suite, rng_seed=args.seed)
    for line in lines:
        print(line)
    return 0 if ok else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="sscount",
        description="Self-stabilising Byzantine counter simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p_build = sub.add_parser("build", help="construct a counter and report it")
    _add_construction_flags(p_build)
    p_build.set_defaults(fn=cmd_build)

    for name, fn, help_text in (
            ("run", cmd_run, "run one configuration, one seed at a time"),
            ("sweep", cmd_sweep, "run many seeds and emit a metrics table")):
        p = sub.add_parser(name, help=help_text)
        _add_construction_flags(p)
        _add_run_flags(p)
        p.add_argument("--print-config", action="store_true",
                       help="print the effective configuration and exit")
        p.set_defaults(fn=fn)

    p_verify = sub.add_parser("verify", help="run a named invariant suite")
    p_verify.add_argument("suite", choices=harness.VERIFY_SUITES)
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.set_defaults(fn=cmd_verify)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
