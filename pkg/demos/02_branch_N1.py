# The ground-state branch for N = 1, p = 9: sweep the frequency, read off mass and energy.
import numpy as np

from quasiground import Params
from quasiground.curves import branch_structure_report, branch_sweep

#%%
params = Params(1, 9)
table = branch_sweep(params, np.geomspace(1e-2, 1e3, 16))

#%%
# Sorted by mass: energy falls, frequency falls, and lambda * a dies out at large mass.
print(f"{'lambda':>10} {'a':>10} {'M':>12} {'lambda*a':>10} {'lagrange':>10}")
for pt in table.points:
    print(f"{pt.lam:10.4g} {pt.a:10.5f} {pt.M:12.6g} {pt.lam * pt.a:10.4g} {pt.lagrange_residual / (pt.lam * pt.a):10.2e}")

#%%
for line in branch_structure_report(table).lines():
    print(line)

#%%
# keep the table around for plotting elsewhere
table.to_csv("branch_N1_p9.csv")
