"""Map layer against brute-force oracles and its update invariants."""

import numpy as np
import pytest

from habsom.som import SomGrid


def brute_force_distance(w, v):
    """Independently coded component-by-component re-summation."""
    total = 0.0
    for a, b in zip(w, v):
        total += (a - b) * (a - b)
    return total


def exhaustive_winner(grid, v):
    """Scan every neuron with the loop oracle; first minimum wins."""
    best, best_d = 0, brute_force_distance(grid.weights[0], v)
    for i in range(1, grid.n_neurons):
        d = brute_force_distance(grid.weights[i], v)
        if d < best_d:
            best, best_d = i, d
    return best, best_d


def test_distance_identity_and_all_ones():
    grid = SomGrid.random(seed=1)
    v = grid.weights[7].copy()
    assert grid.distance(7, v) == 0.0

    grid.weights[0] = np.zeros(16)
    assert grid.distance(0, np.ones(16)) == pytest.approx(16.0)


def test_distance_matches_brute_force_oracle():
    rng = np.random.Generator(np.random.PCG64(42))
    levels = np.array([0.0, 0.25, 0.5, 0.75, 1.0])
    grid = SomGrid(rng.choice(levels, size=(9, 16)), width=3, height=3)
    for _ in range(200):
        v = rng.choice(levels, size=16)
        n = int(rng.integers(0, 9))
        assert grid.distance(n, v) == pytest.approx(
            brute_force_distance(grid.weights[n], v), abs=1e-12)


def test_find_winner_exact_match():
    grid = SomGrid.random(seed=3)
    v = grid.weights[7].copy()
    assert grid.find_winner(v) == (7, 0.0)


def test_find_winner_tie_breaks_to_lowest_index():
    w = np.ones((4, 2)) * 0.9
    w[1] = [0.0, 0.0]
    w[3] = [0.0, 0.0]
    grid = SomGrid(w, width=2, height=2)
    winner, d = grid.find_winner([0.0, 0.0])
    assert winner == 1
    assert d == 0.0


def test_find_winner_matches_exhaustive_oracle():
    # 1000 random (grid, input) cases on small grids
    rng = np.random.Generator(np.random.PCG64(7))
    for _ in range(1000):
        w = int(rng.integers(1, 4))
        h = int(rng.integers(1, 4))
        dim = int(rng.integers(1, 5))
        grid = SomGrid(rng.random((w * h, dim)), width=w, height=h)
        v = rng.random(dim)
        assert grid.find_winner(v) == pytest.approx(exhaustive_winner(grid, v))


@pytest.mark.parametrize("winner,expected", [
    (55, 9),   # interior (5, 5)
    (0, 4),    # corner (0, 0)
    (5, 6),    # top edge
    (99, 4),   # far corner
])
def test_neighbourhood_sizes_on_10x10(winner, expected):
    grid = SomGrid.random(seed=0)
    hood = grid.neighbourhood(winner)
    assert len(hood) == expected
    assert winner in hood


def test_neighbourhood_degenerate_grid():
    grid = SomGrid(np.array([[0.5, 0.5]]), width=1, height=1)
    assert list(grid.neighbourhood(0)) == [0]


def test_neighbourhood_is_chebyshev_ball():
    grid = SomGrid.random(seed=2)
    hood = set(grid.neighbourhood(55))
    r, c = divmod(55, 10)
    expected = {rr * 10 + cc for rr in range(10) for cc in range(10)
                if max(abs(rr - r), abs(cc - c)) <= 1}
    assert hood == expected


def test_update_quarter_step():
    grid = SomGrid(np.zeros((4, 3)), width=2, height=2, learning_rate=0.25)
    grid.update(0, np.ones(3))
    # radius 1 on a 2x2 grid covers everyone
    assert np.allclose(grid.weights, 0.25)


def test_update_zero_and_full_rate():
    w0 = np.full((4, 3), 0.3)
    frozen = SomGrid(w0.copy(), 2, 2, learning_rate=0.0)
    frozen.update(0, np.ones(3))
    assert np.array_equal(frozen.weights, w0)

    jump = SomGrid(w0.copy(), 2, 2, learning_rate=1.0)
    jump.update(0, np.ones(3))
    assert np.array_equal(jump.weights, np.ones((4, 3)))


def test_update_contraction_and_locality():
    # 1000 random cases: winner gets closer, outsiders bit-identical
    rng = np.random.Generator(np.random.PCG64(11))
    for _ in range(1000):
        w = int(rng.integers(2, 5))
        h = int(rng.integers(2, 5))
        dim = int(rng.integers(1, 6))
        eta = float(rng.random())
        grid = SomGrid(rng.random((w * h, dim)), w, h, learning_rate=eta)
        v = rng.random(dim)
        winner, before = grid.find_winner(v)
        outside = np.setdiff1d(np.arange(grid.n_neurons), grid.neighbourhood(winner))
        frozen = grid.weights[outside].copy()
        grid.update(winner, v)
        after = grid.distance(winner, v)
        assert after <= before + 1e-15
        if eta > 0.0 and before > 1e-12:
            assert after < before
        assert np.array_equal(grid.weights[outside], frozen)


def test_weights_stay_in_unit_box():
    rng = np.random.Generator(np.random.PCG64(13))
    grid = SomGrid.random(width=4, height=4, input_dim=5, seed=5)
    for _ in range(500):
        v = rng.random(5)
        winner, _ = grid.find_winner(v)
        grid.update(winner, v)
    assert np.all(grid.weights >= 0.0)
    assert np.all(grid.weights <= 1.0)


def test_find_winner_is_deterministic():
    grid = SomGrid.random(seed=9)
    v = np.linspace(0, 1, 16)
    assert grid.find_winner(v) == grid.find_winner(v)


def test_seeded_initialisation_reproducible():
    a = SomGrid.random(seed=123)
    b = SomGrid.random(seed=123)
    c = SomGrid.random(seed=124)
    assert np.array_equal(a.weights, b.weights)
    assert not np.array_equal(a.weights, c.weights)
    assert np.all(a.weights >= 0.0) and np.all(a.weights <= 1.0)


def test_dimension_mismatch_rejected():
    grid = SomGrid.random(seed=0)
    with pytest.raises(ValueError, match="16"):
        grid.distance(0, np.ones(5))
    with pytest.raises(ValueError):
        grid.find_winner(np.ones(17))
    with pytest.raises(ValueError):
        grid.update(0, np.ones(3))
