"""Ad-hoc desk-scale tuning runs (not part of the package)."""
import dataclasses
import sys
import time

import numpy as np

from mecpriv.agents import DRQNPolicy, train_drqn
from mecpriv.harness import desk_agent, desk_env, evaluate

name = sys.argv[1]
overrides = eval(sys.argv[2]) if len(sys.argv) > 2 else {}
lam = float(sys.argv[3]) if len(sys.argv) > 3 else 10.0
seed = int(sys.argv[4]) if len(sys.argv) > 4 else 1

env = dataclasses.replace(desk_env(), privacy_weight=lam)
cfg = desk_agent("drqn", **overrides)
t0 = time.time()
res = train_drqn(env, cfg, np.random.default_rng(seed))
dt = time.time() - t0
rr = np.array([r for _, r, _ in res.curve])
ma = np.convolve(rr, np.ones(50) / 50, mode="valid")
pol = DRQNPolicy(res.spec, res.params, env)
rec = evaluate(pol, env, 20, (1, 2, 3), name)
print(f"[{name}] lam={lam} seed={seed} {dt:.0f}s  "
      f"MA50 start/mid/end {ma[0]:.0f}/{ma[len(ma)//2]:.0f}/{ma[-1]:.0f}  "
      f"last50 {rr[-50:].mean():.0f}")
print(f"[{name}] h_dt {rec.h_dt:.3f}  h_gt {rec.h_gt:.3f}  "
      f"cost {rec.avg_cost_per_task:.3f}  reward/step {rec.avg_reward_per_step:.2f}")
