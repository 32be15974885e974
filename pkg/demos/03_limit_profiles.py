# Both ends of the N = 1, p = 9 branch, compared with their limit problems.
import math

import numpy as np

from quasiground import Params
from quasiground.curves import (
    SemilinearNorms,
    branch_point,
    large_mass_targets,
    rescale_tilde,
    small_mass_limit_check,
)
from quasiground.dual_transform import phi_values
from quasiground.shooting import free_boundary_alpha_1d, shoot_free_boundary, shoot_semilinear

params = Params(1, 9)

#%%
# Small mass (large lambda). The rescaled dual profile approaches a compactly
# supported solution of a free-boundary problem.
fb = shoot_free_boundary(params)
print(f"free boundary: alpha={fb.alpha:.12f} (closed form {free_boundary_alpha_1d(9):.12f}), R={fb.R:.6f}")

for lam in (1e2, 1e3, 1e4):
    pt = branch_point(params, lam, keep_profile=True)
    chk = small_mass_limit_check(params, pt, fb)
    vt = rescale_tilde(pt.v_profile, lam, 9)
    print(f"lambda={lam:8.0e}  a={pt.a:.5f}  v(0)={pt.alpha:8.4f}  v~(0)={vt.values[0]:.5f}"
          f"  sup dist={chk.sup_distance:.4f}  ratio={chk.ratio:.5f}")

#%%
# The height ratio is phi(alpha)/sqrt(alpha) for alpha = v(0), whatever the rescaling.
# v(0) grows only like lambda^(2/7), so getting within 1% of 2^(1/4) (alpha near 50)
# takes lambda of order 1e6.
for alpha in (4.0, 16.0, 50.0, 100.0, 1e4):
    print(f"alpha={alpha:8.4g}  phi(alpha)/sqrt(alpha)={phi_values(alpha) / math.sqrt(alpha):.5f}")
print("target 2^(1/4) =", 2**0.25)

#%%
# Large mass (small lambda). The semilinear ground state W sets the power law.
W = shoot_semilinear(params)
norms = SemilinearNorms.from_trajectory(W, params)
tg = large_mass_targets(params, norms)
print("W(0) =", W.alpha, " |W|^2 =", norms.mass, " targets:", tg)
pts = [branch_point(params, lam) for lam in np.geomspace(1e-12, 1e-9, 4)]
a = np.array([pt.a for pt in pts])
lam = np.array([pt.lam for pt in pts])
print("fitted slope of log lambda vs log a:", np.polyfit(np.log(a), np.log(lam), 1)[0])
