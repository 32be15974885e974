# Change of variables and fiber maps: the two pieces of algebra everything else rests on.
import numpy as np

from quasiground import Params, phi_inv, phi_values
from quasiground.dual_transform import phi_prime_of_u
from quasiground.fiber_map import fiber_polynomial, fiber_scale, project_pohozaev
from quasiground.radial_field import RadialProfile, functionals, graded_grid

#%%
# phi solves phi' = 1/sqrt(1 + 2 phi^2). Linear near zero, square-root growth far out.
s = np.geomspace(1e-4, 1e8, 7)
u = phi_values(s)
for si, ui in zip(s, u):
    print(f"s={si:9.1e}  phi={ui:12.6g}  phi/s={ui / si:8.5f}  phi/sqrt(s)={ui / np.sqrt(si):8.5f}")
print("2^(1/4) =", 2**0.25)

#%%
# the inverse has a closed form, so round trips are cheap to check
print("max round-trip error:", np.max(np.abs(phi_inv(u) - s) / s))
print("max phi*phi':", np.max(u * phi_prime_of_u(u)), "<= 2^(-1/2) =", 2**-0.5)

#%%
# A Gaussian in N = 1 with p = 9, dilated along t -> t^{1/2} u(t x).
# Mass stays put while the energy traces a polynomial with one interior maximum.
params = Params(1, 9)
r = graded_grid(12.0, 1e-3, 1.005)
g = RadialProfile(1, r, 1.5 * np.exp(-r**2 / 2))
h = fiber_polynomial(g, params)
t_star = h.critical_point()
for t in (0.5, 0.9, t_star, 1.5):
    fv = functionals(fiber_scale(g, t), params)
    print(f"t={t:7.4f}  mass={fv.mass:.6f}  energy={fv.energy:+.6f}  h(t)={h.h(t):+.6f}")

#%%
# projecting onto the Pohozaev set P = 0 picks exactly that maximiser
proj = project_pohozaev(g, params)
print("t_u =", proj.t_u, " side:", proj.side.name, " P after projection:", functionals(proj.projected, params).pohozaev)
