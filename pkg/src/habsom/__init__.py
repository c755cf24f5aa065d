"""Habituating self-organising-map novelty filter with a 2-D corridor
sonar simulator and an experiment harness."""

from .habituation import HabituationParams, Synapse, steady_state, step_efficacy
from .harness import (
    Exp1Result,
    Exp2Result,
    ExperimentConfig,
    ExperimentPlan,
    TrialRecord,
    TrialSpec,
    TrialTrace,
    run_experiment_one,
    run_experiment_two,
    run_plan,
    run_trial,
    train_to_quiescence,
)
from .novelty import NoveltyFilter, NoveltyReading
from .persist import (
    SnapshotFormatError,
    load_snapshot,
    read_trace,
    save_snapshot,
    write_trace,
)
from .simworld import (
    N_BEAMS,
    R_MAX,
    Pose,
    ScanSample,
    World,
    WorldFormatError,
    builtin_names,
    feature_intervals,
    feature_span,
    load_builtin,
    load_world,
    parse_world,
    raycast,
    sonar_scan,
    walk_path,
)
from .som import SomGrid

__version__ = "0.1.0"
