"""Meta-strategy solvers: functions from a complete empirical game to a
per-player solution profile.

``solve_nash`` is exact for two-player games via support enumeration; for
more players it falls back to (time-averaged) replicator dynamics and reports
the measured residual instead of guaranteeing the tolerance.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import IncompleteGame, NoEquilibriumFound
from .games import EmpiricalGame, MixedStrategy, deviation_values, payoff_tensor

RIDGE = 1e-12  # regulariser for degenerate indifference systems
NEGATIVITY_SLACK = 1e-9  # supports whose solution dips below -slack are rejected


@dataclass
class SolutionProfile:
    """One mixed strategy per player plus the solver's own residual check."""

    mixtures: tuple[MixedStrategy, ...]
    solver_name: str
    residual: float

    def weights(self, player: int) -> np.ndarray:
        return self.mixtures[player].weights


def _profile(weight_vectors, solver_name: str, residual: float) -> SolutionProfile:
    mixtures = tuple(
        MixedStrategy(player, w) for player, w in enumerate(weight_vectors)
    )
    return SolutionProfile(mixtures, solver_name, max(0.0, float(residual)))


def _measured_residual(tensor: np.ndarray, weights: list[np.ndarray]) -> float:
    worst = 0.0
    for player, w in enumerate(weights):
        values = deviation_values(tensor, weights, player)
        worst = max(worst, float(values.max() - values @ w))
    return worst


def _require_complete(game: EmpiricalGame) -> np.ndarray:
    if not game.is_complete():
        raise IncompleteGame(
            f"payoff table holds {len(game.payoffs.cells)} of "
            f"{int(np.prod(game.shape))} cells"
        )
    return payoff_tensor(game)


def _clean_support_solution(dense: np.ndarray, support, size: int) -> np.ndarray | None:
    """Scatter a support-restricted solution onto the full strategy set.

    Returns None when the candidate violates non-negativity beyond the slack.
    """
    if dense.min() < -NEGATIVITY_SLACK:
        return None
    clipped = np.clip(dense, 0.0, None)
    total = clipped.sum()
    if total <= 0.0:
        return None
    full = np.zeros(size)
    full[list(support)] = clipped / total
    return full


def _indifference_solution(payoffs: np.ndarray) -> np.ndarray | None:
    """Solve for the mixing weights that equalise the rows of ``payoffs``.

    ``payoffs[r, c]`` is the responder's payoff for pure strategy r against
    the mixer's support strategy c. Unknowns are the mixer's weights plus the
    common value v; the system appends the probability-sum constraint. Square
    systems are solved directly (with a small ridge against degenerate ties);
    overdetermined ones are solved on a square subsystem and checked against
    the remaining equations; underdetermined ones take the least-squares
    point, with the equilibrium verification deciding validity either way.
    """
    rows, cols = payoffs.shape
    system = np.empty((rows + 1, cols + 1))
    system[:rows, :cols] = payoffs
    system[:rows, cols] = -1.0
    system[rows, :cols] = 1.0
    system[rows, cols] = 0.0
    rhs = np.zeros(rows + 1)
    rhs[-1] = 1.0
    try:
        if rows == cols:
            system.flat[:: cols + 2] += RIDGE
            solution = np.linalg.solve(system, rhs)
        elif rows > cols:
            # Square subsystem: the first `cols` indifference rows plus the
            # probability-sum row; the remaining rows must then be consistent.
            square = np.vstack([system[:cols], system[rows:]])
            square.flat[:: cols + 2] += RIDGE
            solution = np.linalg.solve(square, np.append(rhs[:cols], 1.0))
            residual = system[cols:rows] @ solution
            if np.abs(residual).max() > 1e-7:
                return None
        else:
            solution, *_ = np.linalg.lstsq(system, rhs, rcond=None)
    except np.linalg.LinAlgError:
        return None
    return solution[:-1]


def _support_pairs(k0: int, k1: int):
    """All support pairs in increasing total-support-size order (deterministic)."""
    for total in range(2, k0 + k1 + 1):
        for s0 in range(max(1, total - k1), min(k0, total - 1) + 1):
            s1 = total - s0
            for support0 in itertools.combinations(range(k0), s0):
                for support1 in itertools.combinations(range(k1), s1):
                    yield support0, support1


def solve_nash(game: EmpiricalGame, tolerance: float = 1e-8) -> SolutionProfile:
    """Nash equilibrium of the empirical game.

    Two players: support enumeration, solving the indifference linear system
    per support pair and verifying non-negativity and the absence of any
    profitable pure deviation. Ties between equilibria are broken by
    enumeration order, so repeated calls are bit-identical. More than two
    players: replicator-dynamics approximation with the residual reported.
    """
    tensor = _require_complete(game)
    if game.n_players != 2:
        return _replicator(tensor, steps=100_000, step_size=0.1, solver_name="nash")

    a = tensor[..., 0]  # row player's payoffs
    b = tensor[..., 1]
    k0, k1 = game.shape
    for support0, support1 in _support_pairs(k0, k1):
        sub_a = a[np.ix_(support0, support1)]
        sub_b = b[np.ix_(support0, support1)]
        # Column mixture y makes the rows (player 0's support) indifferent.
        y_raw = _indifference_solution(sub_a)
        if y_raw is None:
            continue
        x_raw = _indifference_solution(sub_b.T)
        if x_raw is None:
            continue
        y = _clean_support_solution(y_raw, support1, k1)
        x = _clean_support_solution(x_raw, support0, k0)
        if x is None or y is None:
            continue
        gain0 = float((a @ y).max() - x @ a @ y)
        gain1 = float((x @ b).max() - x @ b @ y)
        if max(gain0, gain1) <= tolerance:
            return _profile([x, y], "nash", max(gain0, gain1))
    raise NoEquilibriumFound(
        f"support enumeration exhausted for shape {game.shape} at tolerance {tolerance}"
    )


def _replicator(
    tensor: np.ndarray, steps: int, step_size: float, solver_name: str
) -> SolutionProfile:
    shape = tensor.shape[:-1]
    weights = [np.full(k, 1.0 / k) for k in shape]
    averages = [np.zeros(k) for k in shape]
    for _ in range(steps):
        values = [deviation_values(tensor, weights, p) for p in range(len(shape))]
        for p, w in enumerate(weights):
            mean_value = float(values[p] @ w)
            updated = w * (1.0 + step_size * (values[p] - mean_value))
            updated = np.clip(updated, 0.0, None)
            weights[p] = updated / updated.sum()
            averages[p] += weights[p]
    averaged = [avg / steps for avg in averages]
    return _profile(averaged, solver_name, _measured_residual(tensor, averaged))


def solve_replicator(
    game: EmpiricalGame, steps: int = 20_000, step_size: float = 0.1
) -> SolutionProfile:
    """Discrete-time replicator dynamics from the uniform profile.

    Returns the trajectory's time-average, which converges on zero-sum games
    where the raw iterate cycles; the residual is the measured internal
    regret of the averaged profile, reported but not enforced.
    """
    tensor = _require_complete(game)
    return _replicator(tensor, steps, step_size, "replicator")


def solve_uniform(game: EmpiricalGame) -> SolutionProfile:
    """Uniform mixture over each player's current strategy set."""
    weights = [np.full(k, 1.0 / k) for k in game.shape]
    residual = _measured_residual(payoff_tensor(game), weights) if game.is_complete() else 0.0
    return _profile(weights, "uniform", residual)


def solve_last(game: EmpiricalGame) -> SolutionProfile:
    """Probability one on each player's newest strategy (self-play target)."""
    weights = []
    for k in game.shape:
        w = np.zeros(k)
        w[k - 1] = 1.0
        weights.append(w)
    residual = _measured_residual(payoff_tensor(game), weights) if game.is_complete() else 0.0
    return _profile(weights, "last", residual)


SOLVERS = {
    "nash": solve_nash,
    "replicator": solve_replicator,
    "uniform": solve_uniform,
    "last": solve_last,
}


def get_solver(name: str, **params):
    """Solver selected by config name, with solver parameters bound."""
    if name not in SOLVERS:
        raise ValueError(f"unknown meta-strategy solver {name!r}")
    solver = SOLVERS[name]
    if not params:
        return solver
    return lambda game: solver(game, **params)
