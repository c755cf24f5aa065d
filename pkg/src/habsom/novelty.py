"""Novelty scoring: a SOM classifier with one habituable synapse per neuron.

Each presentation classifies the input, optionally trains the map, and
steps the synapses: the winner's synapse habituates fastest
(tau_winner), the rest of the winning neighbourhood more slowly
(tau_neighbour), and every other synapse relaxes back toward rest on
the long forgetting time constant (tau_forget) when forgetting is
enabled.  The novelty score of a presentation is the winner's synaptic
efficacy at the moment the scan arrives: y0 for a neuron that has never
fired, low for habituated ones, recovering while a neuron stays idle.

Stimulus modes for the habituating tiers:

* ``binary`` (default): a firing neuron's synapse receives a unit
  stimulus.  This keeps the synapse in the saturating regime whatever
  the quantisation error, so repeated presentations decay geometrically
  to the habituated floor and stay there while the percept keeps
  winning.
* ``clamp1``: the winner's distance, clamped at 1.  As the map learns a
  percept its distance falls toward zero, the stimulus vanishes and the
  synapse dishabituates even though the percept keeps being seen.
* ``raw``: the winner's distance, unscaled.

Neighbours receive the same stimulus value as the winner; only the time
constant differs.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .habituation import HabituationParams, step_efficacy
from .som import SomGrid

__all__ = ["NoveltyFilter", "NoveltyReading", "STIMULUS_MODES"]

STIMULUS_MODES = ("binary", "clamp1", "raw")


@dataclass(frozen=True)
class NoveltyReading:
    """Result of presenting one input: the winning neuron, its
    quantisation distance and the novelty score."""

    winner: int
    distance: float
    novelty: float


class NoveltyFilter:
    """The composed novelty filter: map plus per-neuron synapses."""

    def __init__(self, grid: SomGrid, *,
                 tau_winner: float = 3.33,
                 tau_neighbour: float = 14.33,
                 tau_forget: float = 100.0,
                 alpha: float = 1.05,
                 y0: float = 1.0,
                 clamp_zero: bool = True,
                 forgetting_enabled: bool = True,
                 learning_enabled: bool = True,
                 stimulus_scale: str = "binary"):
        if stimulus_scale not in STIMULUS_MODES:
            raise ValueError(
                f"stimulus_scale must be one of {STIMULUS_MODES}, got {stimulus_scale!r}")
        self.grid = grid
        self.winner_params = HabituationParams(tau_winner, alpha, y0, clamp_zero)
        self.neighbour_params = HabituationParams(tau_neighbour, alpha, y0, clamp_zero)
        self.forget_params = HabituationParams(tau_forget, alpha, y0, clamp_zero)
        self.forgetting_enabled = bool(forgetting_enabled)
        self.learning_enabled = bool(learning_enabled)
        self.stimulus_scale = stimulus_scale
        self.efficacies = np.full(grid.n_neurons, y0, dtype=float)

    @classmethod
    def create(cls, width: int = 10, height: int = 10, input_dim: int = 16,
               learning_rate: float = 0.25, neighbourhood_radius: int = 1,
               seed: int = 0, **kwargs) -> "NoveltyFilter":
        """Fresh filter over a randomly initialised map."""
        grid = SomGrid.random(width, height, input_dim, learning_rate,
                              neighbourhood_radius, seed)
        return cls(grid, **kwargs)

    @property
    def y0(self) -> float:
        return self.winner_params.y0

    def present(self, v) -> NoveltyReading:
        """Score one input vector, training the filter if learning is on.

        The novelty score is the winner's synaptic efficacy as the scan
        arrives (before this presentation's habituation step), so a
        never-fired neuron scores a full y0 on first sight.  With
        learning off this is a pure read: the reading reports the
        winner's current efficacy and no state changes at all.
        """
        v = np.asarray(v, dtype=float)
        if np.any(v < 0.0) or np.any(v > 1.0):
            raise ValueError("input components must lie in [0, 1]")
        winner, dist = self.grid.find_winner(v)
        novelty = float(self.efficacies[winner])
        if not self.learning_enabled:
            return NoveltyReading(winner, dist, novelty)

        self.grid.update(winner, v)
        stimulus = self._stimulus(dist)
        hood = self.grid.neighbourhood(winner)
        rest = hood[hood != winner]
        eff = self.efficacies
        eff[winner] = step_efficacy(eff[winner], self.winner_params, stimulus)
        if rest.size:
            eff[rest] = step_efficacy(eff[rest], self.neighbour_params, stimulus)
        if self.forgetting_enabled:
            idle = np.ones(eff.shape, dtype=bool)
            idle[hood] = False
            eff[idle] = step_efficacy(eff[idle], self.forget_params, 0.0)
        return NoveltyReading(winner, dist, novelty)

    def novelty_trace(self, scans) -> list[NoveltyReading]:
        """Present a sequence of scans in order, one reading per scan."""
        return [self.present(v) for v in scans]

    def set_learning(self, enabled: bool) -> None:
        """Toggle weight adaptation and all synapse updates together."""
        self.learning_enabled = bool(enabled)

    def set_forgetting(self, enabled: bool) -> None:
        self.forgetting_enabled = bool(enabled)

    def state_fingerprint(self) -> str:
        """Digest of all mutable state; unchanged iff the filter is unchanged."""
        h = hashlib.sha256()
        h.update(np.ascontiguousarray(self.grid.weights).tobytes())
        h.update(np.ascontiguousarray(self.efficacies).tobytes())
        return h.hexdigest()

    def _stimulus(self, dist: float) -> float:
        if self.stimulus_scale == "binary":
            return 1.0
        if self.stimulus_scale == "clamp1":
            return min(dist, 1.0)
        return dist
