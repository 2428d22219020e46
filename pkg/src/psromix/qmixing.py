"""Value-based policy aggregation.

A mixture of value policies is itself a value policy: its action values at an
observation are the components' values weighted by the mixture probabilities
(components that never saw the observation contribute their default value).
The same construction serves two roles in the epoch loops: combining a
library of stored best responses into a response to a mixed opponent, and
collapsing a mixed opponent into a single representative policy to train
against.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import MissingResponse, NotValueBased
from .games import MixedStrategy, as_weights
from .policies import ValuePolicy


class MixedQPolicy:
    """Weighted sum of component action-value tables.

    Immutable after construction; exposes the same lookup interface as QTable
    so mixtures can be nested and acted on greedily.
    """

    def __init__(self, components: Sequence, weights):
        self.weights = np.asarray(weights, dtype=float)
        if len(components) != len(self.weights):
            raise ValueError("one weight per component required")
        if len(components) == 0:
            raise ValueError("at least one component required")
        if self.weights.min() < 0:
            raise ValueError("weights must be non-negative")
        if abs(self.weights.sum() - 1.0) > 1e-9:
            raise ValueError(f"weights sum to {self.weights.sum()!r}, expected 1")
        counts = {c.action_count for c in components}
        if len(counts) != 1:
            raise ValueError(f"components disagree on action count: {sorted(counts)}")
        self.components = tuple(components)
        self.action_count = counts.pop()

    def lookup(self, key: bytes) -> np.ndarray:
        total = np.zeros(self.action_count)
        for weight, component in zip(self.weights, self.components):
            total += weight * component.lookup(key)
        return total

    def known_keys(self):
        keys = set()
        for component in self.components:
            keys.update(component.known_keys())
        return keys


def mixed_q(policy: MixedQPolicy, observation) -> np.ndarray:
    """Mixture action values at one observation."""
    return policy.lookup(observation.key)


def _value_table(policy):
    table = getattr(policy, "q", None)
    if table is None:
        raise NotValueBased(
            f"{type(policy).__name__} exposes no action-value table"
        )
    return table


def _support(solution) -> tuple[np.ndarray, np.ndarray]:
    weights = (
        solution.weights if isinstance(solution, MixedStrategy) else as_weights(solution)
    )
    support = np.flatnonzero(weights > 0.0)
    if len(support) == 0:
        raise ValueError("opponent solution has empty support")
    return weights, support


def combine_responses(responses: Sequence, opponent_solution) -> ValuePolicy:
    """Aggregate stored per-opponent best responses by the opponent mixture.

    ``responses[j]`` is the best response to the opponent's strategy ``j``;
    entries outside the mixture support may be missing (None).
    """
    weights, support = _support(opponent_solution)
    for index in support:
        if index >= len(responses) or responses[index] is None:
            raise MissingResponse(
                f"no stored best response for opponent strategy {index}"
            )
    components = [_value_table(responses[index]) for index in support]
    return ValuePolicy(MixedQPolicy(components, weights[support]))


def combine_opponents(opponent_policies: Sequence, opponent_solution) -> ValuePolicy:
    """Collapse a mixed opponent into one fixed value-based policy.

    The result plays greedily on the weighted value mixture, removing the
    need to sample a fresh opponent at each episode. Zero-weight policies may
    be arbitrary; supported ones must expose a value table.
    """
    weights, support = _support(opponent_solution)
    components = [_value_table(opponent_policies[index]) for index in support]
    return ValuePolicy(MixedQPolicy(components, weights[support]))
