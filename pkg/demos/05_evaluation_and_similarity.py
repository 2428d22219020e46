"""Evaluate solutions against deviation sets and compare policy libraries.

Proxy regret measures deviation gain against discovered plus held-out
policies, clipped at zero; the similarity report checks how behaviourally
diverse a policy set is by greedy-action agreement over a deduplicated
corpus of visited states.
"""

import numpy as np

import psromix as pm
from psromix.evaluation import export_similarity

env = pm.rps_env()

print("== regret against pure deviations ==")
populations = [[pm.FixedMixturePolicy([0.0, 0.3, 0.7])], [pm.pure_action_policy(3, 0)]]
sigma = [np.array([1.0]), np.array([1.0])]
deviations = pm.DeviationSet(
    tuple(tuple(pm.pure_action_policy(3, a) for a in range(3)) for _ in range(2))
)
values = pm.regret(env, sigma, deviations, populations=populations)
print(f"player 2 plays R against (0,.3,.7): regret {values[1]:.3f} (R is already the BR)")
print(f"player 1 could deviate: regret {values[0]:.3f}")
print(f"sum_regret: {pm.sum_regret(values):.3f}")

print("\n== proxy regret clips weak deviation sets at zero ==")
weak_eval = [[pm.pure_action_policy(3, 1)], [pm.pure_action_policy(3, 2)]]
clipped = pm.proxy_regret(env, sigma, psro_set=[[], []], eval_set=weak_eval,
                          populations=populations)
print(f"per-player proxy regret: {np.round(clipped, 3)} (never negative)")

print("\n== held-out evaluation set from a finished run ==")
hparams = pm.OracleHParams(learning_rate=5e-3, discount=0.0,
                           total_timesteps=800, exploration_timesteps=400)
config = pm.RunConfig(algorithm="mixed-opponents", env="rps", mss="nash",
                      epochs=5, episodes_per_cell=20, oracle="tabular",
                      pure_hparams=hparams, mix_hparams=hparams, seed=23)
record = pm.run_algorithm(config)
independent = pm.run_algorithm(
    pm.RunConfig(algorithm="psro", env="rps", mss="nash", epochs=5,
                 episodes_per_cell=20, oracle="tabular",
                 pure_hparams=hparams, mix_hparams=hparams, seed=99)
)
from psromix.evaluation import export_eval_set

eval_set = export_eval_set(independent, "/tmp/psromix-demo-eval", size=2, seed=1)
proxy = pm.proxy_regret(env, record.solution,
                        psro_set=record.game.strategy_sets, eval_set=eval_set,
                        populations=record.game.strategy_sets,
                        episodes=30, rng=np.random.default_rng(5))
print(f"run solution proxy regret vs own + held-out policies: {np.round(proxy, 4)}")

print("\n== similarity of the discovered policies (Leduc) ==")
leduc = pm.LeducEnv()
leduc_hp = pm.OracleHParams(learning_rate=0.05, discount=1.0,
                            total_timesteps=4_000, exploration_timesteps=2_000)
library = [
    pm.train_best_response(leduc, 0, {1: pm.uniform_random_policy(3)}, leduc_hp,
                           np.random.default_rng(seed))
    for seed in range(3)
]
report = pm.similarity_report(library, leduc, episodes_per_profile=30,
                              rng=np.random.default_rng(0))
print(f"states collected: {report.corpus_size_raw}, "
      f"after deduplication: {report.corpus_size_deduplicated}")
print(export_similarity(report, [f"br{i}" for i in range(3)]))
