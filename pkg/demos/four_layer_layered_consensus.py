"""Four layers agree internally first, then globally.

The first layer links to every other layer, the others are joined more
sparsely. Watching the spread of each layer separately shows that every
layer settles on its own value well before the whole network does.
"""

from mlsaddle import builtin_manifest, run_experiment
from mlsaddle.network import ASSUMED_FOUR_LAYER_SCALES

for (h, k), d in ASSUMED_FOUR_LAYER_SCALES.items():
    print(f"note: interlayer scale between layers {h + 1} and {k + 1} is an assumed value ({d})")

_, four = run_experiment(builtin_manifest("four-layer"), write=False)
_, two = run_experiment(builtin_manifest("two-layer"), write=False)

print()
for h, t in sorted(four.per_layer_times.items()):
    print(f"layer {h + 1} internal consensus at t = {t:7.1f}")
print(f"global consensus             at t = {four.t_consensus:7.1f}")
print()
print(f"for comparison, the two-layer network agrees at t = {two.t_consensus:.1f}")
