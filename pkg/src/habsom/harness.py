"""Experiment orchestration: trials, training-to-quiescence and the two
corridor experiments.

A trial walks the world's scripted route for 10 m, presenting a scan
every 10 cm (101 samples).  Training alternates a learning trial with a
frozen (non-learning) trial in the same world, saving the filter state
after every learning trial, and stops once the learning-trial mean
novelty drops under the quiescence threshold.

Experiment one trains a fresh filter in corridor A to quiescence, then
probes corridor B with a frozen trial; a second fresh filter is trained
in the open control area and probes B the same way.  Forgetting stays
off here so that acquisition is monotone.

Experiment two starts from the corridor-A state with forgetting on and
alternates learning trials in the opened-door corridor A* with frozen
trials in the closed corridor A; a contrast arm repeats the protocol
with forgetting off.  A second variant substitutes corridor B for A*.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field

import numpy as np

from .novelty import NoveltyFilter
from .simworld import World, feature_intervals, feature_span, load_builtin, walk_path

__all__ = [
    "TrialRecord", "TrialTrace", "TrialSpec", "ExperimentPlan",
    "ExperimentConfig", "Exp1Result", "Exp2Result",
    "run_trial", "run_plan", "train_to_quiescence",
    "run_experiment_one", "run_experiment_two",
]

REPORT_THRESHOLD = 0.3


@dataclass(frozen=True)
class TrialRecord:
    """One scan's outcome within a trial."""

    arc_position: float
    winner: int
    distance: float
    novelty: float


@dataclass
class TrialTrace:
    """Ordered per-scan records of one 10 m run, plus summary statistics."""

    label: str
    records: list[TrialRecord] = field(default_factory=list)

    def mean_novelty(self) -> float:
        if not self.records:
            return 0.0
        return float(np.mean([r.novelty for r in self.records]))

    def max_novelty(self) -> float:
        if not self.records:
            return 0.0
        return float(max(r.novelty for r in self.records))

    def count_above(self, threshold: float = REPORT_THRESHOLD) -> int:
        return sum(1 for r in self.records if r.novelty > threshold)

    def max_in(self, intervals) -> float:
        """Largest novelty among records whose arc lies in the intervals."""
        vals = [r.novelty for r in self.records if _in_intervals(r.arc_position, intervals)]
        return float(max(vals)) if vals else 0.0

    def max_outside(self, intervals) -> float:
        vals = [r.novelty for r in self.records if not _in_intervals(r.arc_position, intervals)]
        return float(max(vals)) if vals else 0.0

    def summary(self) -> dict:
        return {
            "label": self.label,
            "samples": len(self.records),
            "mean_novelty": self.mean_novelty(),
            "max_novelty": self.max_novelty(),
            "above_threshold": self.count_above(),
        }


def _in_intervals(arc: float, intervals) -> bool:
    return any(lo - 1e-9 <= arc <= hi + 1e-9 for lo, hi in intervals)


@dataclass(frozen=True)
class TrialSpec:
    """One planned trial: which world, learning or frozen, and its label."""

    world: str
    learning: bool
    label: str


@dataclass
class ExperimentPlan:
    """An ordered list of trials over named worlds, with the run seed."""

    trials: list[TrialSpec]
    seed: int = 1

    def __post_init__(self):
        labels = [t.label for t in self.trials]
        if len(set(labels)) != len(labels):
            raise ValueError("trial labels must be unique")


@dataclass
class ExperimentConfig:
    """Knobs shared by the experiment protocols."""

    seed: int = 1
    smoothing_window: int = 3
    noise: float = 0.0
    stimulus_scale: str = "binary"
    quiescence_threshold: float = 0.06
    max_training_trials: int = 10
    door_trials: int = 3
    trial_length: float = 10.0
    trial_step: float = 0.1


def _scan_inputs(world: World, config: ExperimentConfig,
                 rng: np.random.Generator | None = None):
    samples = walk_path(world, config.trial_length, config.trial_step,
                        config.smoothing_window, config.noise, rng)
    return samples


def run_trial(filt: NoveltyFilter, world: World, learning: bool,
              config: ExperimentConfig | None = None, label: str = "trial",
              rng: np.random.Generator | None = None) -> TrialTrace:
    """Walk the world once, presenting every scan to the filter.

    The filter is mutated only when learning is on; a frozen trial is a
    pure read of the current state.
    """
    config = config or ExperimentConfig()
    if world.path is None:
        raise ValueError(f"world {world.name!r} has no path to follow")
    if filt.grid.input_dim != 16:
        raise ValueError(
            f"filter input dimension {filt.grid.input_dim} does not match the "
            "16-beam sonar")
    was_learning = filt.learning_enabled
    filt.set_learning(learning)
    try:
        trace = TrialTrace(label)
        for sample in _scan_inputs(world, config, rng):
            reading = filt.present(sample.input)
            trace.records.append(TrialRecord(
                sample.arc_position, reading.winner, reading.distance, reading.novelty))
    finally:
        filt.set_learning(was_learning)
    return trace


def run_plan(plan: ExperimentPlan, config: ExperimentConfig | None = None,
             worlds: dict[str, World] | None = None,
             filt: NoveltyFilter | None = None) -> list[TrialTrace]:
    """Execute an explicit trial plan against one filter."""
    config = config or ExperimentConfig()
    filt = filt or NoveltyFilter.create(seed=plan.seed,
                                        stimulus_scale=config.stimulus_scale)
    traces = []
    for spec in plan.trials:
        world = worlds[spec.world] if worlds else load_builtin(spec.world)
        traces.append(run_trial(filt, world, spec.learning, config, spec.label))
    return traces


def _make_noise_rng(config: ExperimentConfig):
    if config.noise > 0.0:
        return np.random.Generator(np.random.PCG64(config.seed))
    return None


def train_to_quiescence(filt: NoveltyFilter, world: World,
                        config: ExperimentConfig | None = None,
                        label_prefix: str = "train",
                        rng: np.random.Generator | None = None,
                        ) -> tuple[list[TrialTrace], list[TrialTrace]]:
    """Alternate learning and frozen trials until the learning-trial mean
    novelty falls under the quiescence threshold, capped at
    max_training_trials.  Returns (learning traces, frozen traces)."""
    config = config or ExperimentConfig()
    rng = rng or _make_noise_rng(config)
    learning, frozen = [], []
    for i in range(1, config.max_training_trials + 1):
        learn = run_trial(filt, world, True, config, f"{label_prefix}_learn_{i}", rng)
        learning.append(learn)
        frozen.append(run_trial(filt, world, False, config, f"{label_prefix}_test_{i}", rng))
        if learn.mean_novelty() < config.quiescence_threshold * filt.y0:
            break
    return learning, frozen


@dataclass
class Exp1Result:
    """Traces and trained state from the model-acquisition experiment."""

    a_learning: list[TrialTrace]
    a_frozen: list[TrialTrace]
    b_transfer: TrialTrace
    control_learning: list[TrialTrace]
    b_after_control: TrialTrace
    a_filter: NoveltyFilter
    control_filter: NoveltyFilter
    door_intervals_b: list[tuple[float, float]]

    def traces(self) -> list[TrialTrace]:
        return (self.a_learning + self.a_frozen + [self.b_transfer]
                + self.control_learning + [self.b_after_control])


def run_experiment_one(config: ExperimentConfig | None = None,
                       worlds: dict[str, World] | None = None) -> Exp1Result:
    """Model acquisition and transfer (corridors A and B plus control).

    Trains in A to quiescence with forgetting off, probes B frozen, then
    repeats from scratch in the control area and probes B again.
    """
    config = config or ExperimentConfig()
    worlds = worlds or {name: load_builtin(name) for name in ("A", "B", "CONTROL")}

    rng = _make_noise_rng(config)
    a_filter = NoveltyFilter.create(seed=config.seed, forgetting_enabled=False,
                                    stimulus_scale=config.stimulus_scale)
    a_learning, a_frozen = train_to_quiescence(a_filter, worlds["A"], config, "a", rng)
    b_transfer = run_trial(a_filter, worlds["B"], False, config, "b_transfer", rng)

    control_filter = NoveltyFilter.create(seed=config.seed, forgetting_enabled=False,
                                          stimulus_scale=config.stimulus_scale)
    control_learning, _ = train_to_quiescence(control_filter, worlds["CONTROL"],
                                              config, "control", rng)
    b_after_control = run_trial(control_filter, worlds["B"], False, config,
                                "b_after_control", rng)

    door_intervals = feature_intervals(worlds["B"], "door", config.trial_length,
                                       config.trial_step, config.smoothing_window)
    return Exp1Result(a_learning, a_frozen, b_transfer, control_learning,
                      b_after_control, a_filter, control_filter, door_intervals)


@dataclass
class Exp2Result:
    """Traces from the forgetting experiment (opened door or corridor B)."""

    baseline: TrialTrace
    door_learning: list[TrialTrace]
    a_frozen: list[TrialTrace]
    door_intervals: list[tuple[float, float]]
    filter: NoveltyFilter


def run_experiment_two(a_filter: NoveltyFilter,
                       config: ExperimentConfig | None = None,
                       worlds: dict[str, World] | None = None,
                       forgetting: bool = True,
                       variant: str = "A*") -> Exp2Result:
    """Forgetting protocol from a corridor-A-trained state.

    Starts with a frozen baseline trial in A, then alternates a learning
    trial in the changed world (A* by default, B for the second variant)
    with a frozen trial in A, door_trials times.  The provided filter is
    not modified; a copy is run.
    """
    config = config or ExperimentConfig()
    if variant not in ("A*", "B"):
        raise ValueError(f"variant must be 'A*' or 'B', got {variant!r}")
    worlds = worlds or {name: load_builtin(name) for name in ("A", variant)}

    filt = copy.deepcopy(a_filter)
    filt.set_forgetting(forgetting)

    rng = _make_noise_rng(config)
    baseline = run_trial(filt, worlds["A"], False, config, "a_baseline", rng)
    door_learning, a_frozen = [], []
    for i in range(1, config.door_trials + 1):
        door_learning.append(
            run_trial(filt, worlds[variant], True, config, f"door_learn_{i}", rng))
        a_frozen.append(
            run_trial(filt, worlds["A"], False, config, f"a_frozen_{i}", rng))

    # the stretch of route running past the changed feature: the opened
    # door in the A* variant, every door in the B variant
    tag = "door:2" if variant == "A*" else "door"
    door_intervals = [feature_span(worlds[variant], tag)]
    return Exp2Result(baseline, door_learning, a_frozen, door_intervals, filt)
