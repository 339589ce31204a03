"""Experiment plumbing: configurations, runs, sweeps, metrics, verification.

Artifacts:
  * one JSON-lines trace per run (self-describing: a header record echoing
    the configuration, then one record per round with outputs, bits, pulls
    and happy flags);
  * one CSV metrics row per run (versioned schema, order-independent merge,
    rows sorted by seed);
  * every metric is re-derivable from the trace file alone
    (`metrics_from_trace`), which the test suite checks.
"""

from __future__ import annotations

import configparser
import csv
import io
import json
import math
import os
from dataclasses import dataclass, field, asdict
from typing import Optional, Sequence

from sscount import constants
from sscount.core import (
    ConfigurationError,
    CounterAlgorithm,
    Trace,
    detect_stabilization,
    most_frequent,
    counts_majority,
    strong_majority,
    run_execution,
)
from sscount.counters import (
    Boost,
    ConstructionTree,
    analytic_bounds,
    build_recursive,
    guard_band,
)
from sscount.silencing import (
    DecoderShim,
    SilencedCounter,
    encode_happy,
    measure_post_stabilisation_bits,
    silence_construction,
)
from sscount.pulling import (
    PullParams,
    build_recursive_probabilistic,
    freeze_topology,
)
from sscount.adversary import CATALOG, make_strategy

SCHEMA_VERSION = 1
WORKER_ENV = "SSCOUNT_WORKERS"

MODES = ("deterministic", "silenced", "pulled", "frozen")

CSV_FIELDS = [
    "schema", "n", "f", "c", "mode", "kappa", "gamma", "k", "K",
    "adversary", "seed", "horizon", "analytic_bound", "state_bits",
    "stabilisation_round", "stabilised", "total_bits", "max_round_bits",
    "max_pulls_per_node", "post_window_bits",
]


# ---------------------------------------------------------------------------
# Configuration


@dataclass
class ExperimentConfig:
    """One experiment: a construction, an adversary, seeds and a horizon.

    `horizon = 0` means "analytic time bound plus the guard band"; an
    explicit smaller horizon is refused unless `allow_short_horizon` is
    set, so a "stabilised" verdict is always backed by a persistence
    window."""

    n: int
    f: int
    c: int
    mode: str = "deterministic"
    kappa: int = 0                     # silenced
    gamma: float = 1.0                 # pulled / frozen
    k: int = 2
    eta: int = 0                       # 0 = use n
    K: int = 0                         # 0 = sample_size(eta, k, gamma)
    master_seed: int = 0               # frozen topology
    adversary: str = "random-bytes"
    seeds: tuple = (0,)
    horizon: int = 0
    allow_short_horizon: bool = False
    out_dir: str = "results"
    record_states: bool = False

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigurationError(
                f"unknown mode {self.mode!r}; choose from {MODES}")
        if self.mode == "silenced" and self.kappa < 2:
            raise ConfigurationError("silenced mode needs kappa >= 2")
        self.seeds = tuple(int(s) for s in self.seeds)
        if not self.seeds:
            raise ConfigurationError("need at least one seed")

    def pull_params(self) -> PullParams:
        return PullParams(gamma=self.gamma, k=self.k,
                          eta=self.eta or self.n,
                          K=self.K or None)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["seeds"] = list(self.seeds)
        return d


def build_experiment(cfg: ExperimentConfig) -> tuple[ConstructionTree, CounterAlgorithm]:
    """Construct the counter named by the configuration."""
    if cfg.mode == "deterministic":
        return build_recursive(cfg.n, cfg.f, cfg.c)
    if cfg.mode == "silenced":
        tree, alg = build_recursive(cfg.n, cfg.f, cfg.c)
        return silence_construction(tree, alg, cfg.kappa)
    tree, alg = build_recursive_probabilistic(cfg.n, cfg.f, cfg.c,
                                              cfg.pull_params(), mode="fresh")
    if cfg.mode == "frozen":
        alg = freeze_topology(alg, cfg.master_seed)
    return tree, alg


def auto_horizon(cfg: ExperimentConfig, tree: ConstructionTree) -> int:
    """The horizon actually used: configured value, or bound + guard band.

    A configured horizon below the guarded bound is refused unless
    explicitly overridden."""
    floor = tree.analytic_time_bound + guard_band(tree)
    if cfg.horizon == 0:
        return floor
    if cfg.horizon < floor and not cfg.allow_short_horizon:
        raise ConfigurationError(
            f"horizon {cfg.horizon} is below the guarded analytic bound "
            f"{floor}; pass allow_short_horizon to override")
    return cfg.horizon


# ---------------------------------------------------------------------------
# Metrics


@dataclass
class RunMetrics:
    """Exact per-run accounting; every field is re-derivable from the
    run's trace file."""

    seed: int
    adversary: str
    horizon: int
    analytic_bound: int
    state_bits: int
    stabilisation_round: Optional[int]
    total_bits: int
    max_round_bits: int
    max_pulls_per_node: int
    post_window_bits: Optional[int]

    @property
    def stabilised(self) -> bool:
        return self.stabilisation_round is not None

    def csv_row(self, cfg: ExperimentConfig) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "n": cfg.n, "f": cfg.f, "c": cfg.c, "mode": cfg.mode,
            "kappa": cfg.kappa or "",
            "gamma": cfg.gamma if cfg.mode in ("pulled", "frozen") else "",
            "k": cfg.k if cfg.mode in ("pulled", "frozen") else "",
            "K": (cfg.pull_params().K
                  if cfg.mode in ("pulled", "frozen") else ""),
            "adversary": self.adversary,
            "seed": self.seed,
            "horizon": self.horizon,
            "analytic_bound": self.analytic_bound,
            "state_bits": self.state_bits,
            "stabilisation_round": ("" if self.stabilisation_round is None
                                    else self.stabilisation_round),
            "stabilised": int(self.stabilised),
            "total_bits": self.total_bits,
            "max_round_bits": self.max_round_bits,
            "max_pulls_per_node": self.max_pulls_per_node,
            "post_window_bits": ("" if self.post_window_bits is None
                                 else self.post_window_bits),
        }


def metrics_of(trace: Trace, cfg: ExperimentConfig, seed: int,
               analytic_bound: int, state_bits: int) -> RunMetrics:
    correct = trace.correct_nodes()
    stab = detect_stabilization(trace, trace.c)
    total_bits = sum(sum(row[v] for v in correct) for row in trace.bits)
    max_round = max((max(row[v] for v in correct) for row in trace.bits),
                    default=0)
    max_pulls = max((max((row[v] for v in correct), default=0)
                     for row in trace.pulls), default=0)
    post = None
    if cfg.mode == "silenced" and stab is not None:
        cooldown = min(analytic_cooldown(cfg), cfg.kappa - 1)
        try:
            post = measure_post_stabilisation_bits(trace, cfg.kappa, cooldown)
        except ConfigurationError:
            post = None
    return RunMetrics(seed=seed, adversary=cfg.adversary, horizon=trace.horizon,
                      analytic_bound=analytic_bound, state_bits=state_bits,
                      stabilisation_round=stab, total_bits=total_bits,
                      max_round_bits=max_round, max_pulls_per_node=max_pulls,
                      post_window_bits=post)


def analytic_cooldown(cfg: ExperimentConfig) -> int:
    tree, _ = build_recursive(cfg.n, cfg.f, cfg.c)
    return max(1, min(tree.analytic_time_bound, cfg.kappa - 1))


# ---------------------------------------------------------------------------
# Trace files (JSON lines)


def trace_path(cfg: ExperimentConfig, seed: int) -> str:
    name = (f"trace_n{cfg.n}_f{cfg.f}_c{cfg.c}_{cfg.mode}"
            f"_{cfg.adversary}_s{seed}.jsonl")
    return os.path.join(cfg.out_dir, name)


def write_trace(path: str, cfg: ExperimentConfig, trace: Trace,
                analytic_bound: int, state_bits: int) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        header = {
            "schema": SCHEMA_VERSION,
            "kind": "trace",
            "config": cfg.as_dict(),
            "analytic_bound": analytic_bound,
            "state_bits": state_bits,
            "n": trace.n,
            "c": trace.c,
            "faulty": sorted(trace.faulty),
        }
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for r in range(trace.horizon):
            row = {
                "round": r,
                "outputs": trace.outputs[r],
                "bits": trace.bits[r],
            }
            if r < len(trace.pulls) and any(trace.pulls[r]):
                row["pulls"] = trace.pulls[r]
            extras = trace.extras[r]
            if extras and "h" in next(iter(extras.values())):
                row["happy"] = [extras.get(v, {}).get("h")
                                for v in range(trace.n)]
            fh.write(json.dumps(row, sort_keys=True) + "\n")


def read_trace(path: str) -> tuple[dict, Trace]:
    with open(path, encoding="utf-8") as fh:
        header = json.loads(fh.readline())
        if header.get("kind") != "trace":
            raise ConfigurationError(f"{path} is not a trace file")
        trace = Trace(n=header["n"], c=header["c"],
                      faulty=frozenset(header["faulty"]))
        for line in fh:
            row = json.loads(line)
            trace.outputs.append(row["outputs"])
            trace.bits.append(row["bits"])
            trace.pulls.append(row.get("pulls") or [0] * trace.n)
            extras = {}
            if "happy" in row:
                extras = {v: {"h": h} for v, h in enumerate(row["happy"])
                          if h is not None}
            trace.extras.append(extras)
    return header, trace


def metrics_from_trace(path: str) -> RunMetrics:
    """Recompute the CSV metrics row from the trace file alone."""
    header, trace = read_trace(path)
    cfg = ExperimentConfig(**{k: v for k, v in header["config"].items()})
    seed_candidates = [s for s in cfg.seeds
                       if trace_path(cfg, s) == path or len(cfg.seeds) == 1]
    seed = seed_candidates[0] if seed_candidates else cfg.seeds[0]
    # recover the seed from the file name when the config lists several
    stem = os.path.basename(path)
    if "_s" in stem:
        seed = int(stem.rsplit("_s", 1)[1].split(".")[0])
    return metrics_of(trace, cfg, seed, header["analytic_bound"],
                      header["state_bits"])


# ---------------------------------------------------------------------------
# Runs and sweeps


def run_one(cfg: ExperimentConfig, seed: int,
            write_files: bool = True) -> tuple[Trace, RunMetrics]:
    tree, alg = build_experiment(cfg)
    horizon = auto_horizon(cfg, tree)
    strategy = make_strategy(cfg.adversary)
    try:
        trace = run_execution(alg, strategy, horizon, seed,
                              record_states=cfg.record_states)
    except OSError as exc:
        raise ConfigurationError(
            f"run n={cfg.n} f={cfg.f} {cfg.mode} adversary={cfg.adversary} "
            f"seed={seed} failed: {exc}") from exc
    metrics = metrics_of(trace, cfg, seed, tree.analytic_time_bound,
                         tree.exact_state_bits)
    if write_files:
        path = trace_path(cfg, seed)
        try:
            write_trace(path, cfg, trace, tree.analytic_time_bound,
                        tree.exact_state_bits)
        except OSError as exc:
            raise ConfigurationError(
                f"writing trace for seed {seed} to {path} failed: {exc}"
            ) from exc
    return trace, metrics


def _sweep_worker(args) -> tuple[int, RunMetrics]:
    cfg_dict, seed, write_files = args
    cfg = ExperimentConfig(**cfg_dict)
    _, metrics = run_one(cfg, seed, write_files=write_files)
    return seed, metrics


def worker_count() -> int:
    raw = os.environ.get(WORKER_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigurationError(f"{WORKER_ENV} must be an integer, got {raw!r}")


def sweep(cfg: ExperimentConfig, write_files: bool = True) -> list[RunMetrics]:
    """Run every seed; results are merged in seed order regardless of the
    completion order, so worker fan-out cannot perturb the artifacts."""
    jobs = [(cfg.as_dict(), seed, write_files) for seed in cfg.seeds]
    workers = worker_count()
    if workers > 1 and len(jobs) > 1:
        import multiprocessing as mp
        with mp.Pool(workers) as pool:
            results = dict(pool.map(_sweep_worker, jobs))
    else:
        results = dict(_sweep_worker(job) for job in jobs)
    rows = [results[seed] for seed in sorted(results)]
    if write_files:
        write_metrics_csv(os.path.join(cfg.out_dir, "metrics.csv"), cfg, rows)
    return rows


def write_metrics_csv(path: str, cfg: ExperimentConfig,
                      rows: Sequence[RunMetrics]) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
        writer.writeheader()
        for m in sorted(rows, key=lambda m: m.seed):
            writer.writerow(m.csv_row(cfg))


# ---------------------------------------------------------------------------
# Config files: flat key-value text with sections


_SECTION_FIELDS = {
    "construction": ("n", "f", "c", "mode", "kappa", "gamma", "k", "eta",
                     "K", "master_seed"),
    "adversary": ("adversary",),
    "run": ("seeds", "horizon", "allow_short_horizon", "out_dir",
            "record_states"),
}

# Config files are case-insensitive, so the sample count K needs a key that
# cannot collide with the error exponent k.
_FILE_KEYS = {"adversary": "name", "K": "samples"}


def print_config(cfg: ExperimentConfig) -> str:
    """All settings, including defaults, in the config file format."""
    parser = configparser.ConfigParser()
    d = cfg.as_dict()
    for section, names in _SECTION_FIELDS.items():
        parser[section] = {}
        for name in names:
            key = _FILE_KEYS.get(name, name)
            value = d[name]
            if name == "seeds":
                value = " ".join(str(s) for s in value)
            parser[section][key] = str(value)
    out = io.StringIO()
    parser.write(out)
    return out.getvalue().rstrip() + "\n"


def parse_config(text: str) -> ExperimentConfig:
    parser = configparser.ConfigParser()
    parser.read_string(text)
    kwargs: dict = {}
    for section, names in _SECTION_FIELDS.items():
        if not parser.has_section(section):
            continue
        for name in names:
            key = _FILE_KEYS.get(name, name)
            if not parser.has_option(section, key):
                continue
            raw = parser.get(section, key)
            if name == "seeds":
                kwargs[name] = tuple(int(s) for s in raw.replace(",", " ").split())
            elif name in ("allow_short_horizon", "record_states"):
                kwargs[name] = parser.getboolean(section, key)
            elif name == "gamma":
                kwargs[name] = float(raw)
            elif name in ("mode", "out_dir", "adversary"):
                kwargs[name] = raw
            else:
                kwargs[name] = int(raw)
    missing = {"n", "f", "c"} - set(kwargs)
    if missing:
        raise ConfigurationError(f"config is missing {sorted(missing)}")
    return ExperimentConfig(**kwargs)


# ---------------------------------------------------------------------------
# Invariant checks shared by the verify suites and the test suite


def check_weak_counter_lemmas(trace: Trace, alg: CounterAlgorithm) -> list[str]:
    """Trace-level weak-counter invariants; returns violation descriptions.

    1. Pairwise consistency: from round 2*c1 on, whenever two correct nodes
       hold non-bottom d_i within 2*c1 rounds of each other, the values lie
       on one common counter advancing by 1 mod c_i per round.
    2. tau-window: some round within the analytic bound starts tau rounds of
       global agreement on d, advancing by 1 mod tau per round.
    """
    boost = _top_boost(alg)
    if boost is None:
        return ["construction has no boosting level to check"]
    tau, c1 = boost.params.tau, boost.params.c1
    c_i = {0: boost.params.c0, 1: boost.params.c1}
    problems: list[str] = []
    correct = trace.correct_nodes()
    horizon = trace.horizon

    for i in (0, 1):
        key = f"d{i}"
        last_round, last_phase = None, None
        for r in range(2 * c1, horizon):
            vals = {trace.extras[r][v][key] for v in correct
                    if v in trace.extras[r]
                    and trace.extras[r][v].get(key) is not None}
            if not vals:
                continue
            if len(vals) > 1:
                problems.append(
                    f"round {r}: correct nodes disagree on d{i}: {sorted(vals)}")
                continue
            phase = (vals.pop() - r) % c_i[i]
            if (last_round is not None and r - last_round < 2 * c1
                    and phase != last_phase):
                problems.append(
                    f"rounds {last_round}->{r}: d{i} jumped off its counter")
            last_round, last_phase = r, phase

    bound = trace.horizon
    run_len, start = 0, None
    for r in range(horizon):
        vals = {trace.extras[r][v].get("d") for v in correct
                if v in trace.extras[r]}
        if len(vals) == 1 and None not in vals:
            d = vals.pop()
            if run_len and (d - last_d) % tau == 1 % tau:
                run_len += 1
            else:
                run_len, start = 1, r
            last_d = d
            if run_len >= tau:
                break
        else:
            run_len, start = 0, None
    else:
        problems.append(
            f"no tau={tau} window of agreeing, incrementing d within {bound} rounds")
    return problems


def _top_boost(alg: CounterAlgorithm):
    seen = alg
    while seen is not None:
        if isinstance(seen, Boost):
            return seen
        seen = getattr(seen, "core", None) or getattr(seen, "inner", None)
    return None


# ---------------------------------------------------------------------------
# Verify suites


VERIFY_SUITES = ("majority", "weak-counter", "phase-king-exhaustive",
                 "persistence-fuzz", "silencing-roundtrip", "pulling-oracle",
                 "bounds")


def verify(suite: str, rng_seed: int = 0) -> tuple[bool, list[str]]:
    """Run one named invariant suite; (ok, report lines)."""
    if suite not in VERIFY_SUITES:
        raise ConfigurationError(
            f"unknown suite {suite!r}; choose from {VERIFY_SUITES}")
    return _SUITES[suite](rng_seed)


def _verify_majority(seed: int) -> tuple[bool, list[str]]:
    import random
    rng = random.Random(seed)
    lines, ok = [], True
    for trial in range(2000):
        n = rng.randrange(1, 12)
        f = rng.randrange(0, max(1, n // 3 + 1))
        votes = [rng.randrange(0, 4) if rng.random() < 0.8 else None
                 for _ in range(n)]
        present = [x for x in votes if x is not None]
        want = None
        for cand in set(present):
            if present.count(cand) >= n - f:
                want = cand
        got = strong_majority(votes, n, f).value
        if got != want:
            ok = False
            lines.append(f"strong_majority mismatch on {votes}: {got} != {want}")
        mf = most_frequent({x: present.count(x) for x in set(present)})
        if present:
            top = max(set(present), key=lambda x: (present.count(x), -x))
            if mf != top:
                ok = False
                lines.append(f"most_frequent mismatch on {votes}: {mf} != {top}")
        elif mf is not None:
            ok = False
            lines.append(f"most_frequent on empty votes returned {mf}")
    lines.append(f"majority: {'pass' if ok else 'FAIL'} (2000 randomised trials)")
    return ok, lines


def _verify_weak_counter(seed: int) -> tuple[bool, list[str]]:
    cfg = ExperimentConfig(n=7, f=2, c=32, adversary="equivocator",
                           seeds=(seed,), record_states=False)
    tree, alg = build_experiment(cfg)
    trace = run_execution(alg, make_strategy(cfg.adversary),
                          auto_horizon(cfg, tree), seed)
    problems = check_weak_counter_lemmas(trace, alg)
    lines = problems + [f"weak-counter: {'pass' if not problems else 'FAIL'}"]
    return not problems, lines


def _verify_phase_king(seed: int) -> tuple[bool, list[str]]:
    from sscount.adversary import exhaustive_adversary
    from sscount.counters import INF
    lines = []
    agree = exhaustive_adversary(
        c=2, n=4, f=1, instrs=(0, 1, 2), king=0,
        check=lambda cfg: (len({x for x, _ in cfg}) == 1
                           and all(x != INF for x, _ in cfg)))
    lines.append(f"agreement window: ok={agree.ok} "
                 f"(explored {agree.explored} configurations)")
    ok = agree.ok
    # persistence: any agreed start, any instruction, any king behaviour
    for instr in (0, 1, 2):
        for king in (0, None):
            for a in range(2):
                res = exhaustive_adversary(
                    c=2, n=4, f=1, instrs=(instr,), king=king,
                    initial=[tuple((a, 1) for _ in range(3))],
                    check=lambda st, a=a: all(x == (a + 1) % 2
                                              for x, _ in st))
                ok = ok and res.ok
                if not res.ok:
                    lines.append(f"persistence FAILED: instr={instr} "
                                 f"king={king} a={a}: {res.witness}")
    lines.append(f"phase-king-exhaustive: {'pass' if ok else 'FAIL'}")
    return ok, lines


def _verify_persistence_fuzz(seed: int) -> tuple[bool, list[str]]:
    import random
    from sscount.adversary import exhaustive_adversary
    rng = random.Random(seed)
    ok, lines = True, []
    for trial in range(40):
        c = rng.choice((2, 3))
        a = rng.randrange(c)
        instrs = tuple(tuple(rng.randrange(3) for _ in range(3))
                       for _ in range(rng.randrange(1, 3)))
        res = exhaustive_adversary(
            c=c, n=4, f=1, instrs=instrs, king=rng.choice((0, None)),
            initial=[tuple((a, 1) for _ in range(3))],
            check=lambda st, a=a, k=len(instrs), c=c: all(
                x == (a + k) % c for x, _ in st))
        if not res.ok:
            ok = False
            lines.append(f"fuzz FAILED: c={c} a={a} instrs={instrs}")
    lines.append(f"persistence-fuzz: {'pass' if ok else 'FAIL'} (40 windows)")
    return ok, lines


def _verify_silencing_roundtrip(seed: int) -> tuple[bool, list[str]]:
    kappa = 4
    ok, lines = True, []
    for c in (kappa, kappa ** 2, kappa ** 3):
        shim = DecoderShim(c, kappa)
        a0 = (seed * 17) % c
        a0 -= a0 % kappa  # start at a window boundary
        synced_at = None
        for step in range(3 * kappa):
            a = (a0 + step) % c
            dec = shim.observe(encode_happy(a, a % kappa, kappa, c))
            if dec is not None:
                if dec != a:
                    ok = False
                    lines.append(f"c={c}: decoded {dec}, sender at {a}")
                elif synced_at is None:
                    synced_at = step
        if synced_at is None or synced_at > 2 * kappa:
            ok = False
            lines.append(f"c={c}: decoder failed to sync within two windows")
        else:
            lines.append(f"c={c}: synced after {synced_at} rounds, exact since")
    lines.append(f"silencing-roundtrip: {'pass' if ok else 'FAIL'}")
    return ok, lines


def _verify_pulling_oracle(seed: int) -> tuple[bool, list[str]]:
    pull = PullParams(gamma=1.0, k=1, eta=2)
    _, sample_all = build_recursive_probabilistic(8, 2, 16, pull,
                                                  mode="sample-all")
    _, twin = build_recursive_probabilistic(8, 2, 16, pull,
                                            mode="deterministic")
    ok, lines = True, []
    for s in range(seed, seed + 3):
        for name in ("random-bytes", "equivocator"):
            ta = run_execution(sample_all, make_strategy(name), 200, s)
            tb = run_execution(twin, make_strategy(name), 200, s)
            if ta.outputs != tb.outputs:
                ok = False
                lines.append(f"divergence: adversary={name} seed={s}")
    lines.append(f"pulling-oracle: {'pass' if ok else 'FAIL'} "
                 "(sample-all vs deterministic twin, 6 runs)")
    return ok, lines


def _verify_bounds(seed: int) -> tuple[bool, list[str]]:
    ok, lines = True, []
    for n, f in ((4, 1), (7, 2)):
        cfg = ExperimentConfig(n=n, f=f, c=16, seeds=tuple(range(seed, seed + 5)))
        tree, _ = build_experiment(cfg)
        rows = sweep(cfg, write_files=False)
        worst = max((m.stabilisation_round if m.stabilised else 10 ** 9)
                    for m in rows)
        if worst > tree.analytic_time_bound:
            ok = False
            lines.append(f"n={n} f={f}: measured {worst} exceeds bound "
                         f"{tree.analytic_time_bound}")
        else:
            lines.append(f"n={n} f={f}: worst measured {worst} <= bound "
                         f"{tree.analytic_time_bound}")
    lines.append(f"bounds: {'pass' if ok else 'FAIL'}")
    return ok, lines


_SUITES = {
    "majority": _verify_majority,
    "weak-counter": _verify_weak_counter,
    "phase-king-exhaustive": _verify_phase_king,
    "persistence-fuzz": _verify_persistence_fuzz,
    "silencing-roundtrip": _verify_silencing_roundtrip,
    "pulling-oracle": _verify_pulling_oracle,
    "bounds": _verify_bounds,
}
