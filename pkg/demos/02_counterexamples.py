"""
When consensus fails
====================

Two agents influencing each other fully. Whether they agree depends on the
shape of the bias, and not only on which region it lives in.
"""

import numpy as np

from biasdyn import detect_convergence, get_builtin, simulate

# %%
# A discontinuous bias that still moves agents toward each other: the gap
# shrinks as 0.5 + 0.5 * 0.75**t and never drops below one half.
traj = simulate(get_builtin("two-agent-discontinuous").graph(), [1.0, 0.0], 50)
print("gap at t=0,10,50:", traj.gap[[0, 10, 50]])

# %%
# A malleable (arctan) bias overshoots. A tiny initial difference of 0.001
# is amplified until the agents sit at opposite ends.
traj = simulate(get_builtin("two-agent-arctan").graph(), [0.0, 0.001], 200)
print("arctan: first step with gap > 0.99:", int(np.argmax(traj.gap > 0.99)))

# %%
# exp_slow attracts, but so weakly near agreement that after 10**4 steps
# the agents are still more than 0.05 apart.
traj = simulate(get_builtin("two-agent-slow").graph(), [0.0, 1.0], 10_000)
print("exp_slow gap after 1e4 steps:", traj.gap[-1])
print("verdict:", detect_convergence(traj).label)

# %%
# Fanatics swap places forever; insular agents never move.
for name in ("two-agent-fan", "two-agent-ins"):
    traj = simulate(get_builtin(name).graph(), [0.0, 1.0], 10)
    print(name, traj.states[:4].tolist(), "->", detect_convergence(traj).reason)
