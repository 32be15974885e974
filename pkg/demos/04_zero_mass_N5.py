# In dimension five the branch stops at a finite mass a0, the mass of the
# zero-frequency solution. Two independent routes to a0 should meet.
import numpy as np

from quasiground import Params
from quasiground.curves import branch_sweep, estimate_a0, zero_mass_energy
from quasiground.shooting import shoot_zero_mass

params = Params(5, 6)

#%%
# Route 1: shoot the lambda = 0 equation directly. The solution decays like r^{-3},
# so it lies in L^2 and its mass is finite. This takes a few tens of seconds.
zm = shoot_zero_mass(params)
print(f"u0(0)={zm.u0.values[0]:.8f}  a0={zm.a0:.6f}  decay exponent={zm.decay_exponent:.3f}  R_max={zm.r_max:g}")
print("I(u0) =", zero_mass_energy(zm, params))
for R, alpha in zm.alpha_history:
    print(f"  truncation {R:7g}: alpha = {alpha:.12f}")

#%%
# Route 2: follow the branch towards lambda -> 0 and extrapolate in sqrt(lambda).
table = branch_sweep(params, np.geomspace(1e-5, 1e-1, 9), zero_mass=zm)
for pt in table.points:
    print(f"lambda={pt.lam:9.2e}  a={pt.a:10.4f}  M={pt.M:10.4f}")
est = estimate_a0(params, table, zm)
for line in est.report.lines():
    print(line)
