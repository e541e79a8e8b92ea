"""Two dilation families and where their energies go.

The conformal dilations of the 3-sphere start at the identity (energy
3 pi^2) and strictly lower the energy as the parameter grows; their
closed-form energy is 12 pi^2 t / (t + 1)^2, which tends to zero.  The
capped variant on projective 3-space pins the equator plane in place,
and its energies approach a finite limit, twice pi^2, like c / t; the
Richardson combination 2 E(2t) - E(t) cancels that tail and exposes the
limit at modest parameter values.
"""

import numpy as np

from mapenergy.constructions import make_capped_theta, make_theta
from mapenergy.energy import p_energy
from mapenergy.manifolds import real_projective, sphere
from mapenergy.maps import build_grid

NODES = 30000

grid_s3 = build_grid(sphere(3), NODES, "monte_carlo", seed=5)
print("conformal dilations of the 3-sphere")
print("   t    measured E_2    closed form 12 pi^2 t/(t+1)^2")
for t in (1, 2, 4, 8, 16):
    measured = p_energy(make_theta(t), grid_s3, p=2.0).value
    exact = 12 * np.pi**2 * t / (t + 1) ** 2
    print(f"{t:4d}   {measured:12.6f}    {exact:12.6f}")

grid_rp3 = build_grid(real_projective(3), 4 * NODES, "monte_carlo", seed=6)
print()
print("capped dilations of projective 3-space")
print("   t    measured E_2")
energies = {}
for t in (4, 8, 16):
    energies[t] = p_energy(make_capped_theta(t), grid_rp3, p=2.0).value
    print(f"{t:4d}   {energies[t]:12.6f}")

limit = 2 * energies[16] - energies[8]
print()
print(f"Richardson limit 2 E(16) - E(8) = {limit:.6f}")
print(f"two pi^2                        = {2 * np.pi**2:.6f}")
print(f"relative deviation              = {abs(limit - 2 * np.pi**2) / (2 * np.pi**2):.2%}")
