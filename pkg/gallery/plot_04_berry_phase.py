"""
Berry phase of the central spin
===============================

The chain enters the central spin's Berry phase only through ``f``, the mean
``cos(theta_k)`` of its ground branch.  In the thermodynamic limit ``f`` is
an integral; for the XX chain it has a closed form and at finite ``N`` it is
a staircase.
"""

# %%
import numpy as np

from xyecho import (
    CentralSpinParams,
    ChainParams,
    berry_phase_finite,
    berry_phase_thermodynamic,
    berry_phase_xx_closed_form,
)

cs = CentralSpinParams(mu=0.1, nu=2.0, g=0.5)
print(" lambda  gamma=1.0 beta  dbeta/dlambda   gamma=0.5 beta")
for lam in (0.0, 0.5, 0.9, 0.99, 1.01, 1.5, 2.0):
    a = berry_phase_thermodynamic(1.0, lam, cs)
    b = berry_phase_thermodynamic(0.5, lam, cs)
    print(f"{lam:6.2f}  {a.beta:13.6f}  {a.dbeta_dlambda:13.6f}  {b.beta:13.6f}")

# %%
# XX chain: finite sizes give steps that fill in towards the arccos law.
lams = np.linspace(0, 1.5, 7)
for n in (10, 50):
    row = [berry_phase_finite(ChainParams(0.0, x, n), cs).beta for x in lams]
    print(f"N={n:3d} ", " ".join(f"{v:.4f}" for v in row))
print("N=inf", " ".join(f"{berry_phase_xx_closed_form(x, cs):.4f}" for x in lams))

# %%
# For ``N = 10`` the steps sit where a g-branch mode crosses zero energy,
# at ``lambda = cos(2 pi k / N) - delta``.
n, delta = 10, 0.05
grid = np.arange(1, 12000) * 1e-4
beta = np.array([berry_phase_finite(ChainParams(0.0, x, n), cs, delta=delta).beta for x in grid])
print("steps near", grid[1:][np.diff(beta) != 0].round(4))
print("predicted ", sorted(round(float(np.cos(2 * np.pi * k / n)) - delta, 4) for k in (1, 2)))
