"""Command-line entry point: training runs, frozen tests, the two
corridor experiments and figure rendering.

Every run writes delimited trace files plus a manifest into the output
directory, and by default renders the matching novelty-vs-position
figures next to them.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import persist, plotting
from .harness import (ExperimentConfig, run_experiment_one, run_experiment_two,
                      run_trial, train_to_quiescence)
from .novelty import NoveltyFilter, STIMULUS_MODES
from .simworld import builtin_names, feature_intervals, load_builtin, load_world

EXP1_SEED = 1
EXP2_SEED = 142


def _load_world_arg(value):
    p = Path(value)
    if p.exists():
        return load_world(p)
    try:
        return load_builtin(value)
    except ValueError:
        raise SystemExit(
            f"error: world {value!r} is neither a file nor one of {builtin_names()}")


def _config(args, seed_default) -> ExperimentConfig:
    return ExperimentConfig(
        seed=args.seed if args.seed is not None else seed_default,
        smoothing_window=args.smoothing,
        noise=args.noise,
        stimulus_scale=args.stimulus_scale,
        max_training_trials=args.trials,
    )


def _noise_rng(cfg: ExperimentConfig):
    return np.random.Generator(np.random.PCG64(cfg.seed + 0x5EED)) if cfg.noise > 0 else None


def _emit(out: Path, traces, cfg, figures: bool, intervals=None, name="run"):
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    for t in traces:
        fname = f"{t.label}.csv"
        persist.write_trace(t, out / fname)
        entries.append({"label": t.label, "file": fname, **t.summary()})
    persist.write_manifest(out, cfg, entries)
    if figures and traces:
        plotting.save_run_figure(traces, out / f"{name}.png", intervals, title=name)
    return entries


def cmd_train(args) -> int:
    cfg = _config(args, EXP1_SEED)
    world = _load_world_arg(args.world)
    if args.weights:
        filt = persist.load_snapshot(args.weights)
        filt.set_forgetting(args.forgetting == "on")
    else:
        filt = NoveltyFilter.create(seed=cfg.seed,
                                    forgetting_enabled=args.forgetting == "on",
                                    stimulus_scale=cfg.stimulus_scale)
    learning, frozen = train_to_quiescence(filt, world, cfg, "train")
    out = Path(args.out)
    traces = [t for pair in zip(learning, frozen) for t in pair]
    _emit(out, traces, cfg, args.figures, name=f"train_{world.name}")
    persist.save_snapshot(filt, out / "weights.json", seed=cfg.seed,
                          label=f"trained in {world.name}")
    means = ", ".join(f"{t.mean_novelty():.3f}" for t in learning)
    print(f"trained {len(learning)} trials in {world.name}; learning-trial means: {means}")
    print(f"wrote traces and weights.json to {out}")
    return 0


def cmd_test(args) -> int:
    cfg = _config(args, EXP1_SEED)
    world = _load_world_arg(args.world)
    filt = persist.load_snapshot(args.weights)
    trace = run_trial(filt, world, False, cfg, f"test_{world.name}",
                      rng=_noise_rng(cfg))
    if args.out:
        _emit(Path(args.out), [trace], cfg, args.figures, name=trace.label)
        print(f"wrote {trace.label}.csv to {args.out}")
    s = trace.summary()
    print(f"frozen trial in {world.name}: mean novelty {s['mean_novelty']:.4f}, "
          f"max {s['max_novelty']:.4f}, {s['above_threshold']} samples above 0.3")
    return 0


def cmd_exp1(args) -> int:
    cfg = _config(args, EXP1_SEED)
    result = run_experiment_one(cfg)
    out = Path(args.out)
    _emit(out, result.traces(), cfg, args.figures,
          intervals=result.door_intervals_b, name="experiment1")
    persist.save_snapshot(result.a_filter, out / "a_weights.json", seed=cfg.seed,
                          label="trained in corridor A")
    means = [t.mean_novelty() for t in result.a_learning]
    print(f"corridor A: {len(means)} learning trials, means "
          + " -> ".join(f"{m:.3f}" for m in means))
    print(f"transfer to B: mean {result.b_transfer.mean_novelty():.4f}; "
          f"after control training: {result.b_after_control.mean_novelty():.4f}")
    print(f"wrote traces, figures and a_weights.json to {out}")
    return 0


def cmd_exp2(args) -> int:
    cfg = _config(args, EXP2_SEED)
    if args.weights:
        a_filter = persist.load_snapshot(args.weights)
    else:
        a_filter = NoveltyFilter.create(seed=cfg.seed, forgetting_enabled=False,
                                        stimulus_scale=cfg.stimulus_scale)
        train_to_quiescence(a_filter, load_builtin("A"), cfg, "pretrain")
    result = run_experiment_two(a_filter, cfg, forgetting=args.forgetting == "on",
                                variant=args.variant)
    out = Path(args.out)
    traces = [result.baseline]
    for learn, frozen in zip(result.door_learning, result.a_frozen):
        traces += [learn, frozen]
    _emit(out, traces, cfg, args.figures, intervals=result.door_intervals,
          name="experiment2")
    lm = [t.max_in(result.door_intervals) for t in result.door_learning]
    fm = [t.max_in(result.door_intervals) for t in result.a_frozen]
    print("door-region max, learning trials: " + " -> ".join(f"{v:.3f}" for v in lm))
    print("door-region max, frozen trials:   " + " -> ".join(f"{v:.3f}" for v in fm))
    print(f"wrote traces and figures to {out}")
    return 0


def cmd_plot_data(args) -> int:
    src = Path(args.traces)
    files = sorted(src.glob("*.csv"))
    if not files:
        print(f"error: no trace files in {src}", file=sys.stderr)
        return 1
    out = Path(args.out) if args.out else src
    out.mkdir(parents=True, exist_ok=True)
    traces = []
    for f in files:
        trace = persist.read_trace(f)
        traces.append(trace)
        data = out / f"{f.stem}_plotdata.csv"
        with data.open("w") as fh:
            fh.write("arc_position,novelty\n")
            for r in trace.records:
                fh.write(f"{r.arc_position!r},{r.novelty!r}\n")
        plotting.save_trace_figure(trace, out / f"{f.stem}.png")
    plotting.save_run_figure(traces, out / "overview.png", title=src.name)
    print(f"wrote plot data and figures for {len(traces)} trials to {out}")
    return 0


def _add_common(sp, with_world=False):
    sp.add_argument("--seed", type=int, default=None, help="random seed for the run")
    sp.add_argument("--out", required=True, help="output directory")
    sp.add_argument("--trials", type=int, default=10,
                    help="cap on learning trials (default 10)")
    sp.add_argument("--forgetting", choices=("on", "off"), default="on",
                    help="enable the slow recovery of idle synapses")
    sp.add_argument("--stimulus-scale", choices=STIMULUS_MODES, default="binary",
                    help="stimulus fed to firing synapses")
    sp.add_argument("--smoothing", type=int, default=3,
                    help="trailing moving-average window over raw ranges")
    sp.add_argument("--noise", type=float, default=0.0,
                    help="uniform range-noise amplitude in metres")
    sp.add_argument("--no-figures", dest="figures", action="store_false",
                    help="skip rendering PNG figures")
    if with_world:
        sp.add_argument("--world", required=True,
                        help=f"world file or builtin name {builtin_names()}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="habsom",
        description="Habituating-map novelty filter: corridor simulation and experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="alternate learning and frozen trials in one world")
    _add_common(p, with_world=True)
    p.add_argument("--weights", help="snapshot to resume from")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("test", help="single frozen trial from saved weights")
    p.add_argument("--weights", required=True, help="filter snapshot to load")
    p.add_argument("--world", required=True,
                   help=f"world file or builtin name {builtin_names()}")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None, help="optional output directory")
    p.add_argument("--trials", type=int, default=10, help=argparse.SUPPRESS)
    p.add_argument("--forgetting", choices=("on", "off"), default="on")
    p.add_argument("--stimulus-scale", choices=STIMULUS_MODES, default="binary")
    p.add_argument("--smoothing", type=int, default=3)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--no-figures", dest="figures", action="store_false")
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("exp1", help="model acquisition and transfer (A, B, control)")
    _add_common(p)
    p.set_defaults(func=cmd_exp1)

    p = sub.add_parser("exp2", help="forgetting protocol (opened door or corridor B)")
    _add_common(p)
    p.add_argument("--weights", help="corridor-A snapshot; trained fresh when omitted")
    p.add_argument("--variant", choices=("A*", "B"), default="A*",
                   help="changed world for the learning trials")
    p.set_defaults(func=cmd_exp2)

    p = sub.add_parser("plot-data", help="emit plot-ready files and figures from traces")
    p.add_argument("--traces", required=True, help="directory of trace CSV files")
    p.add_argument("--out", default=None, help="output directory (default: alongside)")
    p.set_defaults(func=cmd_plot_data)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
