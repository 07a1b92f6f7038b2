"""Two coupled path graphs reach a common optimum.

Each of the eight node-layer pairs holds a private quadratic cost
f(x) = x^2/2 + gamma x. The saddle-point flow drives every state to
x* = -mean(gamma), although no node ever sees another node's gamma.
"""

import numpy as np

from mlsaddle import builtin_manifest, run_experiment

traj, report = run_experiment(builtin_manifest("two-layer"), write=False)
x_star = traj.meta["x_star"]

print(f"optimum x* = {x_star:.6f}")
print(f"{'t':>6}  spread max|y - mean(y)|   max|y - x*|")
for t in (0, 1, 2, 5, 10, 20, 50, 100):
    k = int(np.searchsorted(traj.times, t))
    y = traj.y[k]
    print(f"{traj.times[k]:6.1f}  {np.abs(y - y.mean()).max():22.3e}   {np.abs(y - x_star).max():.3e}")

print()
print(report.to_text(), end="")
print(f"multiplier mean stays at {traj.lam[-1].mean():+.2e} (started at 0)")
