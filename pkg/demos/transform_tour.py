"""
A tour of the slow transform
============================

Geometry of the recursion, the phase classes of every layer, and the
transform itself on a small instance.
"""

import numpy as np

from slowpolar import SlowParams, forward, generator_matrix, inverse, phase_classes
from slowpolar.geometry import layer_sizes

# l0 = 1 and m0 = 2 give a base block of N0 = 4 symbols; one layer doubles it
params = SlowParams(l0=1, m0=2, n=1)
print("N0 =", params.n0, " N =", params.length)

# each layer splits a branch into lateral-top, medial and lateral-bottom phases
for lam in range(params.n + 1):
    sizes = layer_sizes(params, lam)
    tags = "".join({"lateral_top": "T", "medial_minus": "-", "medial_plus": "+",
                    "lateral_bottom": "B"}[c.value] for c in phase_classes(params, lam))
    print(f"layer {lam}: L={sizes.big_l} M={sizes.big_m} N={sizes.big_n}  {tags}")

# lateral phases pass bits through, medial pairs combine two of them
x = np.array([1, 0, 1, 1, 0, 0, 1, 0], dtype=np.uint8)
u = forward(params, x)
print("x =", "".join(map(str, x)), "->  u =", "".join(map(str, u)))
print("round trip ok:", np.array_equal(inverse(params, u), x))

# the transform is linear; its generator matrix shows which inputs feed each output
G = generator_matrix(params)
print(G)

# deeper instances stay invertible
deep = SlowParams(2, 4, 3)
batch = np.random.default_rng(0).integers(0, 2, (1000, deep.length), dtype=np.uint8)
print("N =", deep.length, "batch round trip ok:",
      np.array_equal(inverse(deep, forward(deep, batch)), batch))
