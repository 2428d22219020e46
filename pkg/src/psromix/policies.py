"""Value-based and scripted policies.

A policy maps an observation plus the legal action set to an action. Value
policies are backed by an action-value table (anything exposing ``lookup``,
``action_count`` and ``default_value``); greedy ties always break toward the
lowest action index so behaviour is deterministic given the table.
"""

from __future__ import annotations

from typing import Iterable, Protocol, Sequence

import numpy as np


class ValueTable(Protocol):
    """Interface shared by QTable and the Q-mixture in :mod:`psromix.qmixing`."""

    action_count: int

    def lookup(self, key: bytes) -> np.ndarray: ...

    def known_keys(self) -> Iterable[bytes]: ...


class QTable:
    """Observation-keyed action-value table with a default for unseen keys."""

    def __init__(
        self,
        action_count: int,
        values: dict[bytes, np.ndarray] | None = None,
        default_value: float = 0.0,
    ):
        self.action_count = int(action_count)
        self.default_value = float(default_value)
        self.values: dict[bytes, np.ndarray] = {}
        for key, vec in (values or {}).items():
            self.set(key, vec)

    def set(self, key: bytes, vec) -> None:
        arr = np.asarray(vec, dtype=float)
        if arr.shape != (self.action_count,):
            raise ValueError(
                f"value vector has shape {arr.shape}, expected ({self.action_count},)"
            )
        self.values[key] = arr

    def lookup(self, key: bytes) -> np.ndarray:
        """Return the stored vector (treat as read-only) or a default vector."""
        vec = self.values.get(key)
        if vec is None:
            return np.full(self.action_count, self.default_value)
        return vec

    def ensure(self, key: bytes) -> np.ndarray:
        """Return the mutable vector for ``key``, inserting the default first."""
        vec = self.values.get(key)
        if vec is None:
            vec = np.full(self.action_count, self.default_value)
            self.values[key] = vec
        return vec

    def known_keys(self) -> Iterable[bytes]:
        return self.values.keys()

    def copy(self) -> "QTable":
        return QTable(
            self.action_count,
            {k: v.copy() for k, v in self.values.items()},
            self.default_value,
        )


def greedy_over(vec, legal_actions: Sequence[int]) -> int:
    """Lowest-index maximiser of ``vec`` restricted to the legal actions."""
    best = legal_actions[0]
    best_value = vec[best]
    for a in legal_actions[1:]:
        v = vec[a]
        if v > best_value:
            best, best_value = a, v
    return best


class ValuePolicy:
    """Policy acting greedily (or epsilon-greedily) on an action-value table.

    ``epsilon`` is the probability of playing a uniform-random legal action;
    ``epsilon=1.0`` yields a uniform-random policy, the conventional initial
    strategy for each player.
    """

    def __init__(self, q: ValueTable, epsilon: float = 0.0):
        if not 0.0 <= epsilon <= 1.0:
            raise ValueError(f"epsilon must lie in [0, 1], got {epsilon}")
        self.q = q
        self.epsilon = float(epsilon)

    @property
    def mode(self) -> str:
        return "greedy" if self.epsilon == 0.0 else f"epsilon-greedy({self.epsilon})"

    @property
    def action_count(self) -> int:
        return self.q.action_count

    def greedy_action(self, observation, legal_actions: Sequence[int]) -> int:
        return greedy_over(self.q.lookup(observation.key), legal_actions)

    def act(self, observation, legal_actions: Sequence[int], rng) -> int:
        if self.epsilon > 0.0 and rng.random() < self.epsilon:
            return legal_actions[rng.integers(len(legal_actions))]
        return self.greedy_action(observation, legal_actions)

    def action_probabilities(self, observation, legal_actions: Sequence[int]) -> np.ndarray:
        probs = np.zeros(self.q.action_count)
        if self.epsilon > 0.0:
            probs[list(legal_actions)] = self.epsilon / len(legal_actions)
        probs[self.greedy_action(observation, legal_actions)] += 1.0 - self.epsilon
        return probs


class FixedMixturePolicy:
    """Scripted policy playing a fixed distribution over actions every step.

    The distribution is not masked by legal actions: sampling an illegal
    action is reported by the episode runner as a policy/environment mismatch.
    """

    def __init__(self, probs):
        self.probs = np.asarray(probs, dtype=float)
        if self.probs.ndim != 1 or self.probs.min() < 0:
            raise ValueError("probs must be a non-negative vector")
        if abs(self.probs.sum() - 1.0) > 1e-9:
            raise ValueError(f"probs must sum to 1, got {self.probs.sum()!r}")
        self._cumulative = np.cumsum(self.probs)

    @property
    def action_count(self) -> int:
        return len(self.probs)

    def greedy_action(self, observation, legal_actions: Sequence[int]) -> int:
        return greedy_over(self.probs, legal_actions)

    def act(self, observation, legal_actions: Sequence[int], rng) -> int:
        return int(np.searchsorted(self._cumulative, rng.random(), side="right"))

    def action_probabilities(self, observation, legal_actions: Sequence[int]) -> np.ndarray:
        return self.probs.copy()


def uniform_random_policy(action_count: int) -> ValuePolicy:
    """A value-based uniform-random policy (empty zero table, epsilon = 1)."""
    return ValuePolicy(QTable(action_count), epsilon=1.0)


def pure_action_policy(action_count: int, action: int) -> FixedMixturePolicy:
    probs = np.zeros(action_count)
    probs[action] = 1.0
    return FixedMixturePolicy(probs)
