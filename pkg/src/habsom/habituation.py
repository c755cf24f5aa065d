"""Synaptic efficacy dynamics: decay under stimulation, recovery at rest.

The efficacy y of a habituable synapse follows the linear ODE

    tau * dy/dt = alpha * (y0 - y) - S

with the stimulus S >= 0 held constant over a presentation step.  Each
step applies the exact solution of that ODE,

    y(t + dt) = y_inf + (y(t) - y_inf) * exp(-alpha * dt / tau),

where y_inf = y0 - S / alpha is the fixed point for the current
stimulus.  The exact step is unconditionally stable for any dt and
composes exactly: stepping by a then b equals stepping by a + b.

Time is measured in presentation steps, so dt=1 is one presentation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["HabituationParams", "Synapse", "steady_state", "step_efficacy"]


@dataclass(frozen=True)
class HabituationParams:
    """Constants of the efficacy equation.

    tau is the time constant in presentation steps, alpha scales the
    pull back toward the resting efficacy y0.  With clamp_zero on, the
    efficacy never goes below zero even for stimuli strong enough to
    push the fixed point negative (S > alpha * y0).
    """

    tau: float
    alpha: float = 1.05
    y0: float = 1.0
    clamp_zero: bool = True

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not self.y0 > 0:
            raise ValueError(f"y0 must be positive, got {self.y0}")


def steady_state(params: HabituationParams, stimulus: float) -> float:
    """Fixed point y0 - S/alpha reached under a constant stimulus.

    May be negative for S > alpha * y0; the clamp is applied by
    step_efficacy, not here.
    """
    _check_stimulus(stimulus)
    return params.y0 - stimulus / params.alpha


def step_efficacy(y, params: HabituationParams, stimulus, dt: float = 1.0):
    """Advance efficacy by dt presentation steps of the exact solution.

    y may be a scalar or a numpy array (stepped elementwise); stimulus
    may be a scalar or an array broadcastable against y.  Returns the
    new efficacy with the same shape as y.
    """
    _check_stimulus(stimulus)
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    y_inf = params.y0 - np.asarray(stimulus, dtype=float) / params.alpha
    decay = np.exp(-params.alpha * dt / params.tau)
    out = y_inf + (np.asarray(y, dtype=float) - y_inf) * decay
    if params.clamp_zero:
        out = np.maximum(out, 0.0)
    if np.ndim(y) == 0:
        return float(out)
    return out


class Synapse:
    """One habituable connection, starting at the resting efficacy y0."""

    def __init__(self, params: HabituationParams):
        self.params = params
        self.efficacy = params.y0

    def step(self, stimulus: float, dt: float = 1.0) -> float:
        """Apply one stimulation (or rest, S=0) step and return the new efficacy."""
        self.efficacy = step_efficacy(self.efficacy, self.params, stimulus, dt)
        return self.efficacy

    def __repr__(self):
        return f"Synapse(efficacy={self.efficacy!r}, tau={self.params.tau!r})"


def _check_stimulus(stimulus) -> None:
    if np.any(np.asarray(stimulus) < 0):
        raise ValueError(f"stimulus must be non-negative, got {stimulus}")
