"""Command-line front end.

Subcommands: gen-seq, gen-schedule, verify, metrics, simulate, sweep.
The resolved configuration is echoed to stderr as a ``# config:`` JSON
line before anything runs; results go to stdout or ``--out``.

Exit codes: 0 success, 2 configuration error, 3 infeasible schedule.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

from .core import ADVERSARIAL, UNIFORM, dump_sequence, joint_period, parse_sequence_dump
from .interleave import FIXED, ALIAS_MODES, HybridProtocol, PaddingError
from .metrics import attr, evaluate_pair
from .protocols import PROTOCOLS, ProtocolDescriptor, shortest_period
from .pumodel import PuTrafficConfig
from .simulator import (PAPER_DUTY_CYCLES, PAPER_INTENSITIES, ExperimentConfig, run_cell,
                        sweep)
from .wakeup import InfeasibleScheduleError, WakeUpSchedule, generate_schedule, verify_discovery

EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE = 0, 2, 3


class ConfigError(ValueError):
    pass


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a fraction: {text!r}") from exc


def _schedule_args(p):
    g = p.add_argument_group("wake-up schedule")
    g.add_argument("--schedule", help="schedule bits, e.g. 11101000")
    g.add_argument("--schedule-file", type=Path, help="file holding one line of 0/1 characters")
    g.add_argument("--duty", type=_fraction, help="duty cycle a/b (with --period)")
    g.add_argument("--period", type=int, default=14, help="schedule period T (default 14)")


def _resolve_schedule(args):
    given = [args.schedule is not None, args.schedule_file is not None, args.duty is not None]
    if sum(given) > 1:
        raise ConfigError("use only one of --schedule, --schedule-file, --duty")
    if args.schedule is not None:
        return WakeUpSchedule.parse(args.schedule)
    if args.schedule_file is not None:
        return WakeUpSchedule.parse(args.schedule_file.read_text())
    if args.duty is not None:
        return generate_schedule(args.period, args.duty)
    return None


def _emit(args, text: str):
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _echo_config(cfg: dict):
    print("# config: " + json.dumps(cfg, sort_keys=True, default=str), file=sys.stderr)


def _node_sequence(args, node, seed, schedule):
    desc = ProtocolDescriptor(args.base, args.n)
    if schedule is None:
        return desc.build(node, seed=seed)
    h = HybridProtocol(desc, node, schedule, seed=seed, alias_mode=args.alias_mode)
    return h.sequence()


def cmd_gen_seq(args):
    schedule = _resolve_schedule(args)
    _echo_config({"command": "gen-seq", "base": args.base, "n": args.n, "id": args.id,
                  "slots": args.slots, "seed": args.seed,
                  "schedule": None if schedule is None else str(schedule)})
    seq = _node_sequence(args, args.id, (args.seed, args.id), schedule)
    _emit(args, dump_sequence(seq, args.slots))
    return EXIT_OK


def cmd_gen_schedule(args):
    _echo_config({"command": "gen-schedule", "period": args.period, "duty": str(args.duty)})
    x = generate_schedule(args.period, args.duty)
    _emit(args, f"{x}\n")
    return EXIT_OK


def cmd_verify(args):
    out = {}
    if args.seq_file:
        channels, declared, n = parse_sequence_dump(args.seq_file.read_text())
        if not channels:
            raise ConfigError(f"{args.seq_file} holds no slots")
        _echo_config({"command": "verify", "seq_file": str(args.seq_file)})
        tau = shortest_period(channels)
        # a period only counts when the dump shows it at least twice
        found = tau if 2 * tau <= len(channels) else None
        out["slots"] = len(channels)
        out["detected_period"] = found
        out["declared_period"] = declared
        out["ok"] = found is not None and (declared is None or declared % found == 0)
    else:
        schedule = _resolve_schedule(args)
        if schedule is None:
            raise ConfigError("verify needs a schedule or --seq-file")
        peer = WakeUpSchedule.parse(args.peer) if args.peer else schedule
        _echo_config({"command": "verify", "schedule": str(schedule), "peer": str(peer)})
        cert = verify_discovery(schedule, peer)
        out = {"schedule": str(schedule), "peer": str(peer),
               "duty_cycle": str(schedule.duty_cycle), "discovers": cert is not None}
        if cert is not None:
            out["witnesses"] = list(cert.witnesses)
            out["overlap_counts"] = list(cert.overlap_counts)
        out["ok"] = cert is not None
    _emit(args, json.dumps(out, sort_keys=True) + "\n")
    return EXIT_OK if out["ok"] else 1


def cmd_metrics(args):
    """MTTR and diversity are worst-case figures: exhaustive over one joint
    period with random slots never matching.  ATTR is exhaustive for a plain
    deterministic base and Monte Carlo (uniform random slots) otherwise,
    unless ``--adversarial`` asks for the worst-case average as well."""
    schedule = _resolve_schedule(args)
    policy = ADVERSARIAL if args.adversarial else UNIFORM
    _echo_config({"command": "metrics", "base": args.base, "n": args.n, "ids": args.ids,
                  "seed": args.seed, "policy": policy, "trials": args.trials,
                  "schedule": None if schedule is None else str(schedule)})
    i, j = args.ids
    a = _node_sequence(args, i, (args.seed, 0), schedule)
    b = _node_sequence(args, j, (args.seed, 1), schedule)
    L = joint_period(a, b)
    if L is not None:
        report = evaluate_pair(a, b, policy=ADVERSARIAL, n=args.n).to_dict()
    else:
        # no period, no guarantee: the worst realization never meets
        report = {"mttr": None, "mttr_infinite": True, "diversity_rate": "0",
                  "diversity_rate_float": 0.0, "per_drift": []}
    if a.randomized and policy == UNIFORM:
        horizon = args.horizon or (8 * L if L else 64 * args.n)
        est = attr(lambda s: _node_sequence(args, i, s, schedule),
                   lambda s: _node_sequence(args, j, s, schedule),
                   range(L or 1), args.trials, horizon, seed=args.seed)
        report.update(attr_ttr0=est.mean, attr_ttr1=est.mean_ttr1, ci95=est.ci95,
                      censored_fraction=est.censored_fraction, trials=est.trials,
                      observed_max_ttr0=est.max)
    _emit(args, json.dumps(report, sort_keys=True, default=str) + "\n")
    return EXIT_OK


def _pu_from_table(pu: dict, n: int) -> PuTrafficConfig:
    known = {"transmitters", "busy_slots", "idle_mean_slots", "intensity"}
    extra = set(pu) - known
    if extra:
        raise ConfigError(f"unknown pu keys: {sorted(extra)}")
    if "intensity" in pu and "idle_mean_slots" in pu:
        raise ConfigError("pu.intensity and pu.idle_mean_slots are mutually exclusive")
    X = int(pu.get("transmitters", n - 1))
    b = int(pu.get("busy_slots", 5))
    if "intensity" in pu:
        return PuTrafficConfig.from_intensity(pu["intensity"], X, b)
    return PuTrafficConfig(X, b, float(pu.get("idle_mean_slots", 15.0)))


EXPERIMENT_KEYS = {"n_channels", "n_pairs", "base", "trials_per_pair", "horizon", "seed",
                   "schedule_period", "duty_cycles", "intensities", "alias_mode", "slot_ms"}


def load_config(path: Path) -> tuple:
    """Parse a sweep config; returns (ExperimentConfig, duty cycles, intensities)."""
    try:
        import tomllib
    except ImportError:  # Python < 3.11
        import tomli as tomllib

    try:
        data = tomllib.loads(Path(path).read_text())
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    unknown = set(data) - {"experiment", "pu"}
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")
    exp = dict(data.get("experiment", {}))
    extra = set(exp) - EXPERIMENT_KEYS
    if extra:
        raise ConfigError(f"unknown experiment keys: {sorted(extra)}")
    duties = [Fraction(str(d)) for d in exp.pop("duty_cycles", PAPER_DUTY_CYCLES)]
    pu_table = data.get("pu", {})
    n = int(exp.get("n_channels", 11))
    pu = _pu_from_table(pu_table, n)
    if "intensity" in pu_table or "idle_mean_slots" in pu_table:
        # a single PU setting replaces the intensity list
        if "intensities" in exp:
            raise ConfigError("give experiment.intensities or one pu setting, not both")
        intensities = [pu.intensity]
    else:
        intensities = [float(q) for q in exp.pop("intensities", PAPER_INTENSITIES)]
    try:
        cfg = ExperimentConfig(pu=pu, **exp)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    return cfg, duties, intensities


def cmd_simulate(args):
    pu = (PuTrafficConfig.from_intensity(args.intensity, args.transmitters, args.busy_slots)
          if args.intensity else PuTrafficConfig(0, args.busy_slots, 1.0))
    schedule = None
    if args.schedule or args.schedule_file:
        schedule = _resolve_schedule(args)
    duty = args.duty if args.duty is not None else Fraction(1)
    cfg = ExperimentConfig(n_channels=args.n, n_pairs=args.pairs, base=args.base, duty=duty,
                           schedule_period=args.period, schedule=schedule, pu=pu,
                           trials_per_pair=args.trials, horizon=args.horizon, seed=args.seed,
                           alias_mode=args.alias_mode)
    _echo_config({"command": "simulate", **cfg.to_dict(), "intensity": args.intensity})
    summary = run_cell(cfg, args.intensity)
    if summary.skipped:
        print(f"cell skipped: {summary.skipped}", file=sys.stderr)
        return EXIT_INFEASIBLE
    row = summary.row()
    if args.format == "json":
        _emit(args, json.dumps(dict(row, per_pair=summary.per_pair), sort_keys=True) + "\n")
    else:
        _emit(args, ",".join(row) + "\n" + ",".join(str(v) for v in row.values()) + "\n")
    return EXIT_OK


def cmd_sweep(args):
    if args.config:
        cfg, duties, intensities = load_config(args.config)
    else:
        cfg = ExperimentConfig(pu=PuTrafficConfig(ExperimentConfig.n_channels - 1))
        duties, intensities = list(PAPER_DUTY_CYCLES), list(PAPER_INTENSITIES)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    _echo_config({"command": "sweep", **cfg.to_dict(),
                  "duty_cycles": [str(d) for d in duties], "intensities": intensities})
    result = sweep(cfg, duties, intensities)
    if args.out:
        csv_path, json_path = result.write(args.out)
        print(f"wrote {csv_path} and {json_path}", file=sys.stderr)
    elif args.format == "json":
        sys.stdout.write(result.to_json() + "\n")
    else:
        sys.stdout.write(result.to_csv())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hybridhop", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed_default=0):
        p.add_argument("--seed", type=int, default=seed_default)
        p.add_argument("--out", help="output file (directory for sweep)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    def protocol(p):
        p.add_argument("--base", choices=PROTOCOLS, default="jumpstay")
        p.add_argument("--n", type=int, default=11, help="channel count N")
        p.add_argument("--alias-mode", choices=ALIAS_MODES, default=FIXED)

    p = sub.add_parser("gen-seq", help="dump a node's CH sequence")
    protocol(p)
    p.add_argument("--id", type=int, default=1)
    p.add_argument("--slots", type=int, default=100)
    _schedule_args(p)
    common(p)
    p.set_defaults(func=cmd_gen_seq)

    p = sub.add_parser("gen-schedule", help="generate a self-discovering wake-up schedule")
    p.add_argument("--period", type=int, required=True)
    p.add_argument("--duty", type=_fraction, required=True)
    common(p)
    p.set_defaults(func=cmd_gen_schedule)

    p = sub.add_parser("verify", help="check a schedule's discovery property or a dump's period")
    _schedule_args(p)
    p.add_argument("--peer", help="peer schedule bits (default: the schedule itself)")
    p.add_argument("--seq-file", type=Path, help="sequence dump whose period to detect")
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("metrics", help="MTTR / ATTR / diversity of a node pair")
    protocol(p)
    p.add_argument("--ids", type=int, nargs=2, default=(1, 2))
    _schedule_args(p)
    p.add_argument("--adversarial", action="store_true",
                   help="random slots never produce a rendezvous")
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--horizon", type=int)
    common(p)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("simulate", help="one experiment cell under PU traffic")
    protocol(p)
    _schedule_args(p)
    p.add_argument("--pairs", type=int, default=20)
    p.add_argument("--trials", type=int, default=100, help="trials per pair")
    p.add_argument("--intensity", type=float, default=0.0)
    p.add_argument("--transmitters", type=int, default=10)
    p.add_argument("--busy-slots", type=int, default=5)
    p.add_argument("--horizon", type=int)
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="duty cycle x PU intensity grid")
    p.add_argument("--config", type=Path, help="TOML config (see configs/paper.toml)")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="results directory")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InfeasibleScheduleError as exc:
        print(f"infeasible schedule: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except PaddingError as exc:
        print(f"padding failed: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ConfigError, ValueError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
