"""Interlayer diffusion constants act as control knobs for the consensus time.

Sweeps the scale on the bridge between layers 1 and 3 of the four-layer
network and prints t_C next to the algebraic connectivity lambda2. Small
scales are slow because lambda2 is small. Large scales are not monotonically
better: the fastest point sits in the middle of the grid.

Pass a directory as the first argument to also write sweep.csv there.
"""

import sys

import numpy as np

from mlsaddle import builtin_manifest, run_sweep

grid = [float(v) for v in np.logspace(-2, 1, 12)]
m = builtin_manifest("four-layer", integrator={"dt": 0.01, "t_end": 5000.0, "sample_every": 10},
                     sweep={"dinter_1_3": grid})
result = run_sweep(m, output_dir=sys.argv[1] if len(sys.argv) > 1 else None, workers=4)

print(f"{'D(1,3)':>9} {'lambda2':>9} {'t_C':>9}")
for row in result.rows:
    t = "not reached" if row.t_consensus is None else f"{row.t_consensus:9.1f}"
    print(f"{row.point['dinter_1_3']:9.4f} {row.lambda2:9.4f} {t}")
