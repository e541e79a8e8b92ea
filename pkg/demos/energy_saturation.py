"""Identity maps sit exactly on the closed-form p-energy bounds.

For complex projective space the p-energy of any map is bounded below in
terms of the area of its image class, for real projective space in terms
of the length of its noncontractible geodesic images.  The identity maps
saturate both families of bounds, so a Monte Carlo energy estimate and
the closed-form bound value must agree to sampling precision -- and
since the identity has constant energy density, the estimator is exact
far beyond that.
"""

import numpy as np

from mapenergy.energy import p_energy
from mapenergy.manifolds import complex_projective, real_projective
from mapenergy.maps import build_grid, identity_map
from mapenergy.report import BoundSpec, eval_bound

NODES = 50000

print("complex projective identities (image class area pi)")
print(f"{'space':8s} {'p':>4s} {'energy':>14s} {'bound':>14s} {'rel dev':>10s}")
for N in (1, 2):
    M = complex_projective(N)
    grid = build_grid(M, NODES, "monte_carlo", seed=N)
    for p in (2.0, 3.0, 4.0):
        energy = p_energy(identity_map(M), grid, p=p).value
        bound = eval_bound(BoundSpec("CPN_P", {"N": N, "p": p, "area": np.pi}))
        print(f"CP^{N:<5d} {p:4.0f} {energy:14.8f} {bound:14.8f} "
              f"{abs(energy - bound) / bound:10.1e}")

print()
print("real projective identities (geodesic image length pi)")
print(f"{'space':8s} {'p':>4s} {'energy':>14s} {'bound':>14s} {'rel dev':>10s}")
for n in (2, 3):
    M = real_projective(n)
    grid = build_grid(M, NODES, "monte_carlo", seed=10 + n)
    for p in (1.0, 2.0, 4.0):
        energy = p_energy(identity_map(M), grid, p=p).value
        bound = eval_bound(BoundSpec("RPN_P", {"n": n, "p": p, "length": np.pi}))
        print(f"RP^{n:<5d} {p:4.0f} {energy:14.8f} {bound:14.8f} "
              f"{abs(energy - bound) / bound:10.1e}")

print()
print("the p = 2 complex bound coincides with the sharp infimum:")
for N in (1, 2, 3):
    a = eval_bound(BoundSpec("CPN_P", {"N": N, "p": 2.0, "area": np.pi}))
    b = eval_bound(BoundSpec("INFIMUM", {"N": N, "area": np.pi}))
    print(f"  N = {N}: quadratic bound {a:.10f}  infimum {b:.10f}")
