"""Fixed-topology self-organising map used as an online vector quantiser.

A rectangular lattice of neurons, each holding a weight vector of the
input dimension.  Classification picks the neuron with the minimum
summed squared difference to the input; training moves the winner and
its lattice neighbours a fixed fraction of the way toward the input.
Learning rate and neighbourhood radius stay constant, so the map keeps
learning for as long as it is shown data.
"""

from __future__ import annotations

import numpy as np

__all__ = ["SomGrid"]


class SomGrid:
    """A width x height lattice of weight vectors in [0, 1]^input_dim.

    Neurons are addressed by flat row-major index: neuron (r, c) has
    index r * width + c.  The lattice is clipped at its edges (no
    wraparound), so an interior neuron has 8 neighbours, an edge neuron
    5 and a corner neuron 3.
    """

    def __init__(self, weights: np.ndarray, width: int, height: int,
                 learning_rate: float = 0.25, neighbourhood_radius: int = 1):
        weights = np.asarray(weights, dtype=float)
        if weights.ndim != 2 or weights.shape[0] != width * height:
            raise ValueError(
                f"weights must have shape ({width * height}, input_dim), got {weights.shape}")
        if not 0.0 <= learning_rate <= 1.0:
            raise ValueError(f"learning rate must be in [0, 1], got {learning_rate}")
        if neighbourhood_radius < 0:
            raise ValueError(f"neighbourhood radius must be >= 0, got {neighbourhood_radius}")
        self.width = int(width)
        self.height = int(height)
        self.weights = weights
        self.learning_rate = float(learning_rate)
        self.neighbourhood_radius = int(neighbourhood_radius)

    @classmethod
    def random(cls, width: int = 10, height: int = 10, input_dim: int = 16,
               learning_rate: float = 0.25, neighbourhood_radius: int = 1,
               seed: int = 0) -> "SomGrid":
        """Create a grid with weights drawn uniformly from [0, 1] per component."""
        rng = np.random.Generator(np.random.PCG64(seed))
        weights = rng.random((width * height, input_dim))
        return cls(weights, width, height, learning_rate, neighbourhood_radius)

    @property
    def n_neurons(self) -> int:
        return self.width * self.height

    @property
    def input_dim(self) -> int:
        return self.weights.shape[1]

    def distance(self, neuron: int, v) -> float:
        """Summed squared component difference between a neuron's weights and v."""
        self._check_neuron(neuron)
        v = self._check_input(v)
        diff = self.weights[neuron] - v
        return float(diff @ diff)

    def distances(self, v) -> np.ndarray:
        """Distances from every neuron to v, in flat index order."""
        v = self._check_input(v)
        diff = self.weights - v
        return np.einsum("ij,ij->i", diff, diff)

    def find_winner(self, v) -> tuple[int, float]:
        """Neuron with the minimum distance to v, and that distance.

        Ties are broken toward the lowest flat index so that repeated
        runs classify identically.
        """
        d = self.distances(v)
        winner = int(np.argmin(d))
        return winner, float(d[winner])

    def neighbourhood(self, winner: int) -> np.ndarray:
        """Flat indices of the winner and its lattice neighbours.

        Neighbours are every neuron within Chebyshev distance
        neighbourhood_radius on the lattice, clipped at the edges.
        Returned sorted ascending.
        """
        self._check_neuron(winner)
        r, c = divmod(winner, self.width)
        rad = self.neighbourhood_radius
        rows = np.arange(max(0, r - rad), min(self.height - 1, r + rad) + 1)
        cols = np.arange(max(0, c - rad), min(self.width - 1, c + rad) + 1)
        return (rows[:, None] * self.width + cols[None, :]).ravel()

    def update(self, winner: int, v) -> None:
        """Move the winner and its neighbours fraction learning_rate toward v.

        Neurons outside the neighbourhood are untouched.  Because the
        update is a convex combination, weights stay inside [0, 1] as
        long as all inputs are.
        """
        v = self._check_input(v)
        idx = self.neighbourhood(winner)
        self.weights[idx] += self.learning_rate * (v - self.weights[idx])

    def copy(self) -> "SomGrid":
        return SomGrid(self.weights.copy(), self.width, self.height,
                       self.learning_rate, self.neighbourhood_radius)

    def _check_neuron(self, neuron: int) -> None:
        if not 0 <= neuron < self.n_neurons:
            raise ValueError(f"neuron index {neuron} out of range [0, {self.n_neurons})")

    def _check_input(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if v.shape != (self.input_dim,):
            raise ValueError(
                f"input must have {self.input_dim} components, got shape {v.shape}")
        return v
