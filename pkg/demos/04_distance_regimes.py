"""Short, intermediate and long distance.

D = exp(-k0L) sets how strongly the bath correlates the particles:

* D = 1: the relative coordinate is undamped and oscillates in the induced
  potential; entanglement keeps oscillating.
* intermediate D: entanglement appears after a delay that grows with distance.
* D -> 0: two independent baths; a product state never becomes entangled.
"""

# %%
import math

import numpy as np

from brownpair import BathSpec, InitialStateSpec, analyze, evolve

base = BathSpec(eta=0.1, mass_M=1.0, omega_cutoff=5.0, beta=math.inf, k0L=1.0)
init = InitialStateSpec(z=0.0, sigma=2.0)
times = np.linspace(0.0, 30.0, 301)

# %%
for label, k0L in (("short", 1e-9), ("k0L=1", 1.0), ("k0L=2", 2.0), ("long", 30.0)):
    spec = base.replace(k0L=k0L)
    e_n = np.array([analyze(c).E_N for c in evolve(init, spec, times, workers=4)])
    late = times >= 1.0  # skip the switch-on transient
    onset = times[late][np.argmax(e_n[late] > 1e-3)] if np.any(e_n[late] > 1e-3) else math.inf
    print(f"{label:>6}: max E_N={e_n.max():.4f}  mean E_N={e_n.mean():.4f}  onset after t=1: {onset:.2f}")
