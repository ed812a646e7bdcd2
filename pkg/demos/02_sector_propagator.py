"""Decoherence coefficients and sector forms.

In center-of-mass (CM) and relative (REL) coordinates the two-particle
superpropagator splits into two damped-oscillator sectors. Each one is a
Gaussian kernel: a phase (the classical action) times a noise damping
built from three coefficients A, B, C. This script evaluates them and
shows their limiting behavior.
"""

# %%
import math

import numpy as np

from brownpair import (
    BathSpec,
    build_kernel_table,
    coefficients_cm,
    coefficients_rel,
    derive_params,
    sector_form_rel,
)

spec = BathSpec(eta=0.1, mass_M=1.0, omega_cutoff=5.0, beta=2.0, k0L=1.0)
p = derive_params(spec)
print(f"D={p.D:.4f}  gamma+={p.gamma_plus:.4f}  gamma-={p.gamma_minus:.4f}  omega_t^2={p.omega_t_sq:.4f}")

# %% Coefficients grow from zero and always satisfy A, C >= 0 and B^2 <= 4AC.
t_max = 12.0
table = build_kernel_table(t_max, None, spec)
print("\n    t      A_chi      B_chi      C_chi        A_v        B_v        C_v   B^2/4AC(REL)")
for t in (0.5, 2.0, 5.0, 12.0):
    cm, rel = coefficients_cm(t, spec, table), coefficients_rel(t, spec, table)
    ratio = rel.B**2 / (4 * rel.A * rel.C)
    print(f"{t:5.1f} " + " ".join(f"{x:10.5f}" for x in (cm.A, cm.B, cm.C, rel.A, rel.B, rel.C)) + f"   {ratio:.4f}")

# %% Far apart (D -> 0) the relative sector sees the same bath as the CM, scaled by 1/4.
far = spec.replace(k0L=30.0)
far_table = build_kernel_table(3.0, None, far)
cm, rel = coefficients_cm(3.0, far, far_table), coefficients_rel(3.0, far, far_table)
print(f"\nD -> 0: A_v / A_chi = {rel.A / cm.A:.9f}")

# %% The relative-sector form: phase on (u, v, u', v'), noise only on the v rows.
form = sector_form_rel(3.0, spec, table)
np.set_printoptions(precision=4, suppress=True)
print("\nREL phase matrix:\n", form.imag_form)
print("REL noise matrix:\n", form.real_form)
