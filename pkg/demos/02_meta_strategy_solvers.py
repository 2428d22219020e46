"""Compare the meta-strategy solvers on small empirical games.

Support enumeration is exact for two players; replicator dynamics returns
its trajectory time-average (which converges on zero-sum games where the raw
iterate cycles); uniform and last-added are the fictitious-play and
self-play solution rules.
"""

import itertools

import numpy as np

import psromix as pm


def build_game(u1, u2):
    game = pm.EmpiricalGame(2)
    u1, u2 = np.asarray(u1, float), np.asarray(u2, float)
    for i in range(u1.shape[0]):
        game.add_policy(0, f"row{i}")
    for j in range(u1.shape[1]):
        game.add_policy(1, f"col{j}")
    for i, j in itertools.product(range(u1.shape[0]), range(u1.shape[1])):
        game.payoffs.record((i, j), [u1[i, j], u2[i, j]], 1)
    return game


u2 = np.array([[0.7, 0.15], [0.2, 0.7]])
pennies = build_game(1 - u2, u2)
print("== matching-pennies-like game, player-2 payoffs ==")
print(u2)

nash = pm.solve_nash(pennies)
print(f"\nnash:       p1 {np.round(nash.weights(0), 6)}  p2 {np.round(nash.weights(1), 6)}"
      f"  residual {nash.residual:.2e}")
print(f"exact fractions: p1 (10/21, 11/21) = {(10/21, 11/21)}")

replicator = pm.solve_replicator(pennies, steps=100_000, step_size=0.1)
print(f"replicator: p1 {np.round(replicator.weights(0), 4)}"
      f"  residual {replicator.residual:.4f} (time-averaged trajectory)")

uniform = pm.solve_uniform(pennies)
last = pm.solve_last(pennies)
print(f"uniform:    p1 {uniform.weights(0)}  residual {uniform.residual:.4f}")
print(f"last:       p1 {last.weights(0)}  residual {last.residual:.4f}")

rps_u = np.zeros((3, 3))
for a, b in itertools.product(range(3), range(3)):
    rps_u[a, b] = 0.5 if a == b else (1.0 if (a - b) % 3 == 1 else 0.0)
rps = build_game(rps_u, 1 - rps_u)
print("\n== symmetric RPS ==")
print(f"nash: {np.round(pm.solve_nash(rps).weights(0), 6)} (uniform, as symmetry demands)")
print(f"replicator stays at its uniform fixed point: "
      f"{np.round(pm.solve_replicator(rps, steps=500, step_size=0.1).weights(0), 6)}")

# The generic entry point used by run configs:
solver = pm.get_solver("replicator", steps=2_000, step_size=0.05)
print(f"\nget_solver('replicator', ...): residual {solver(pennies).residual:.4f}")
