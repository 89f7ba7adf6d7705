"""
Classifying biases
==================

A bias maps a belief difference x in [-1, 1] to a reaction y. The regions
M (malleable), R (reasonable), B (backfire) and I (insular) describe how
the reaction relates to x. ``classify_bias`` samples the curve and reports
which regions it touches, using exact certificates for the built-ins.
"""

from biasdyn import bias as bz
from biasdyn import classify_bias, continuity_probe, region_membership

# %%
# Single points first.
for x, y in [(0.5, 0.5), (0.5, 0.2), (0.5, -0.1), (0.5, 0.0), (0.0, 0.3)]:
    print((x, y), sorted(region_membership(x, y)))

# %%
# Built-in biases.
for kind in ("degroot", "conf", "backf", "fan", "ins", "exp_slow", "arctan_malleable"):
    print(classify_bias(bz.make_bias(kind)))
    print()

# %%
# A user-defined piecewise-linear bias. With the origin as a knot and every
# knot inside R it is certified; otherwise the report falls back to samples.
pl = bz.piecewise_linear([-1, -0.2, 0, 0.4, 1], [-0.3, -0.1, 0, 0.1, 0.6])
print(classify_bias(pl))

# %%
# Where do the jumps sit?
print("fan jumps near:", continuity_probe(bz.fan()))
print("step jumps near:", continuity_probe(bz.step_discontinuous()))
