"""The bath noise kernel.

The bath enters the two-particle dynamics through

    K(tau) = int_0^cutoff  w coth(beta w / 2) cos(w tau) dw,

a cutoff-limited cosine transform of the thermal spectral weight. This
script evaluates it at a few temperatures, checks it against the
zero-temperature closed form and the high-temperature limit, and builds
the interpolation table that the propagator uses.
"""

# %%
import math

import numpy as np

from brownpair import BathSpec, build_kernel_table, kernel_closed_form_zero_t, spectral_weight, thermal_kernel

spec = BathSpec(eta=0.1, mass_M=1.0, omega_cutoff=5.0, beta=math.inf, k0L=1.0)

# %% The spectral weight is finite at omega = 0 (value 2/beta) and grows with temperature.
for beta in (math.inf, 10.0, 1.0, 0.1):
    w = spectral_weight(np.array([0.0, 1.0, 5.0]), spec.replace(beta=beta))
    print(f"beta={beta:>5}: w coth(beta w/2) at w=0,1,5 -> {np.round(w, 4)}")

# %% At T = 0 the kernel has a closed form.
tau = np.array([0.02, 0.2, 2.0])
numeric = thermal_kernel(tau, spec)
exact = kernel_closed_form_zero_t(tau, spec.omega_cutoff)
print("\nT = 0, quadrature vs closed form:")
for t, a, b in zip(tau, numeric, exact):
    print(f"  tau={t:<5} K={a: .12f}  closed={b: .12f}  rel.diff={abs(a - b) / abs(b):.1e}")

# %% At high temperature coth(x) ~ 1/x, so K(tau) ~ (2/beta) sin(cutoff tau)/tau.
hot = spec.replace(beta=1e-3 / spec.omega_cutoff)
k = thermal_kernel(3.0, hot)
approx = (2 / hot.beta) * math.sin(hot.omega_cutoff * 3.0) / 3.0
print(f"\nhigh T at tau=3: K={k:.6g}, limit={approx:.6g}, rel.diff={abs(k - approx) / abs(approx):.1e}")

# %% The propagator reads K from a cubic-spline table over [0, t_max].
table = build_kernel_table(20.0, None, spec.replace(beta=2.0))
mid = 0.5 * (table.tau[1:] + table.tau[:-1])
direct = thermal_kernel(mid, spec.replace(beta=2.0))
print(f"\ntable: {table.tau.size} samples, worst mid-point error {np.abs(table(mid) - direct).max():.1e}")
