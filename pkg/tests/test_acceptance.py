"""Acceptance suite: one test per release criterion.

Each test prints a single PASS line once its assertions hold, so running
``pytest -s tests/test_acceptance.py`` gives one line per criterion.
Criteria 6 and 7 run the full experiment protocols at their reference
seeds (1 and 142).
"""

import math

import numpy as np
import pytest
from numba import njit

from habsom.habituation import HabituationParams, Synapse, step_efficacy
from habsom.harness import (
    ExperimentConfig,
    ExperimentPlan,
    TrialSpec,
    run_experiment_one,
    run_experiment_two,
    run_plan,
    run_trial,
    train_to_quiescence,
)
from habsom.novelty import NoveltyFilter
from habsom.persist import load_snapshot, save_snapshot, write_trace
from habsom.simworld import World, Pose, feature_intervals, load_builtin, raycast
from habsom.som import SomGrid

from oracles import random_segments, ray_segment_oracle

ALPHA, Y0 = 1.05, 1.0
EXP1_SEED = 1
EXP2_SEED = 142


def report(criterion, text):
    print(f"\nacceptance {criterion}: PASS - {text}")


def test_criterion_1_habituation_speed():
    syn = Synapse(HabituationParams(3.33))
    for _ in range(5):
        syn.step(1.0)
    closed_form = (Y0 - 1.0 / ALPHA) + (1.0 / ALPHA) * math.exp(-5 * ALPHA / 3.33)
    assert abs(syn.efficacy - closed_form) < 1e-9
    assert syn.efficacy < 0.9
    report(1, f"unit stimulus at tau=3.33 drops efficacy to {syn.efficacy:.4f} "
              "(< 0.9) within 5 steps")


def test_criterion_2_recovery_time():
    syn = Synapse(HabituationParams(100.0))
    syn.efficacy = 0.0
    steps = 0
    while syn.efficacy < 0.9 * Y0:
        syn.step(0.0)
        steps += 1
        assert steps <= 280
    closed_form = 1.0 - math.exp(-ALPHA * 280 / 100.0)
    syn2 = Synapse(HabituationParams(100.0))
    syn2.efficacy = 0.0
    for _ in range(280):
        syn2.step(0.0)
    assert abs(syn2.efficacy - closed_form) < 1e-9
    report(2, f"rest at tau=100 recovers to 0.9 in {steps} steps "
              f"(0.947 at 280)")


@njit(cache=True)
def _euler(y, alpha, y0, tau, s, n, h):
    for _ in range(n):
        y += h * (alpha * (y0 - y) - s) / tau
    return y


def test_criterion_3_ode_oracle():
    worst = 0.0
    for tau in (3.33, 14.33, 100.0):
        for stim in (0.0, 0.5, 1.0):
            params = HabituationParams(tau, clamp_zero=False)
            y_exact = Y0
            y_euler = Y0
            for _ in range(300):
                y_exact = step_efficacy(y_exact, params, stim)
                y_euler = _euler(y_euler, ALPHA, Y0, tau, stim, 10_000, 1e-4)
                worst = max(worst, abs(y_exact - y_euler))
                assert abs(y_exact - y_euler) < 1e-3
    report(3, f"exact step matches 1e-4-substep forward Euler over 300 steps "
              f"(worst gap {worst:.2e} < 1e-3)")


def test_criterion_4_som_oracle():
    rng = np.random.Generator(np.random.PCG64(99))
    for _ in range(1000):
        w = int(rng.integers(1, 4))
        h = int(rng.integers(1, 4))
        dim = int(rng.integers(1, 5))
        grid = SomGrid(rng.random((w * h, dim)), w, h)
        v = rng.random(dim)
        dists = [float(np.sum((grid.weights[i] - v) ** 2)) for i in range(w * h)]
        best = min(range(w * h), key=lambda i: (dists[i], i))
        winner, d = grid.find_winner(v)
        assert winner == best
        assert d == pytest.approx(dists[best], abs=1e-12)
    for _ in range(1000):
        w = int(rng.integers(2, 5))
        h = int(rng.integers(2, 5))
        dim = int(rng.integers(1, 6))
        grid = SomGrid(rng.random((w * h, dim)), w, h, learning_rate=float(rng.random()))
        v = rng.random(dim)
        winner, before = grid.find_winner(v)
        outside = np.setdiff1d(np.arange(grid.n_neurons), grid.neighbourhood(winner))
        frozen = grid.weights[outside].copy()
        grid.update(winner, v)
        assert grid.distance(winner, v) <= before + 1e-15
        assert np.array_equal(grid.weights[outside], frozen)
    report(4, "winner selection matches exhaustive argmin and updates "
              "contract/localise on 1000 random grids each")


def test_criterion_5_raycast_oracle():
    rng = np.random.Generator(np.random.PCG64(314))
    cases = 0
    for _ in range(100):
        segs = random_segments(rng, 10)
        world = World(segs, [None] * len(segs), None, Pose(0, 0, 0))
        for _ in range(100):
            px, py = rng.uniform(-8, 8, 2)
            bearing = rng.uniform(-math.pi, math.pi)
            got = raycast(world, (px, py), bearing)
            want = ray_segment_oracle(px, py, bearing, segs)
            if math.isinf(want):
                assert math.isinf(got)
            else:
                assert abs(got - want) < 1e-9
            cases += 1
    report(5, f"{cases} random ray/segment cases match the brute-force "
              "intersection oracle to 1e-9 m")


def test_criterion_6_experiment_one_shape():
    result = run_experiment_one(ExperimentConfig(seed=EXP1_SEED))
    means = [t.mean_novelty() for t in result.a_learning]
    assert all(a >= b - 1e-9 for a, b in zip(means, means[1:])), means
    first_below = next((i + 1 for i, m in enumerate(means) if m < 0.1 * Y0), None)
    assert first_below is not None and first_below <= 6, means
    quiescent = means[-1]
    assert means[0] >= 5.0 * quiescent, (means[0], quiescent)

    intervals = result.door_intervals_b
    offenders = [r for r in result.b_transfer.records
                 if r.novelty > 0.3 * Y0
                 and not any(lo - 1e-9 <= r.arc_position <= hi + 1e-9
                             for lo, hi in intervals)]
    assert not offenders, offenders

    a_mean = result.b_transfer.mean_novelty()
    c_mean = result.b_after_control.mean_novelty()
    assert c_mean >= 2.0 * a_mean, (c_mean, a_mean)
    report(6, f"training quiets corridor A in {first_below} trials "
              f"(first/quiescent mean {means[0]:.3f}/{quiescent:.3f}, ratio "
              f"{means[0]/quiescent:.1f}); B novelty above 0.3 stays at doors; "
              f"control-trained mean {c_mean:.3f} vs corridor-trained {a_mean:.3f}")


def test_criterion_7_experiment_two_forgetting():
    cfg = ExperimentConfig(seed=EXP2_SEED)
    worlds = {name: load_builtin(name) for name in ("A", "A*")}
    a_filter = NoveltyFilter.create(seed=EXP2_SEED, forgetting_enabled=False)
    train_to_quiescence(a_filter, worlds["A"], cfg, "a")

    r = run_experiment_two(a_filter, cfg, worlds=worlds, forgetting=True)
    open_maxima = [t.max_in(r.door_intervals) for t in r.door_learning]
    closed_maxima = [t.max_in(r.door_intervals) for t in r.a_frozen]
    assert len(open_maxima) == len(closed_maxima) == 3
    assert all(a > b for a, b in zip(open_maxima, open_maxima[1:])), open_maxima
    assert all(a < b for a, b in zip(closed_maxima, closed_maxima[1:])), closed_maxima

    r0 = run_experiment_two(a_filter, cfg, worlds=worlds, forgetting=False)
    frozen_off = [t.max_in(r0.door_intervals) for t in r0.a_frozen]
    assert all(a >= b - 1e-9 for a, b in zip(frozen_off, frozen_off[1:])), frozen_off
    report(7, "open door learned over 3 trials "
              f"({' > '.join(f'{v:.2f}' for v in open_maxima)}), closed door "
              f"progressively more novel ({' < '.join(f'{v:.2f}' for v in closed_maxima)}), "
              "and non-increasing with forgetting off")


def test_criterion_8_determinism_and_persistence(tmp_path):
    plan = ExperimentPlan([TrialSpec("A", True, "learn_1"),
                           TrialSpec("A", False, "test_1"),
                           TrialSpec("B", False, "transfer")], seed=11)
    cfg = ExperimentConfig(seed=11)
    for run in ("one", "two"):
        d = tmp_path / run
        d.mkdir()
        for trace in run_plan(plan, cfg):
            write_trace(trace, d / f"{trace.label}.csv")
    files = sorted((tmp_path / "one").glob("*.csv"))
    assert files
    for f in files:
        assert f.read_bytes() == (tmp_path / "two" / f.name).read_bytes()

    filt = NoveltyFilter.create(seed=11)
    run_trial(filt, load_builtin("A"), True, cfg, "warm")
    snap = tmp_path / "snap.json"
    save_snapshot(filt, snap, seed=11)
    loaded = load_snapshot(snap)
    assert np.array_equal(loaded.grid.weights, filt.grid.weights)
    assert np.array_equal(loaded.efficacies, filt.efficacies)
    assert loaded.state_fingerprint() == filt.state_fingerprint()
    report(8, f"{len(files)} trace files bit-identical across reruns; "
              "snapshot round-trips the filter state exactly")
