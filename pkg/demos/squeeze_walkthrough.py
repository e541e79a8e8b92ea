"""Projective dilations squeeze a map's energy onto one line.

The dilation family T_lam of CP^2 scales the first two homogeneous
coordinates by lam.  As lam grows, almost the whole space is pushed
toward the fixed reference line, and the 2-energy of F composed with
T_lam descends to pi times the energy of F restricted to that line.
The walk below starts from a bent identity map, climbs the dilation
ladder with one shared quadrature grid (so the trend is smooth), and
compares the terminal energy with the restricted-energy target.
"""

import numpy as np

from mapenergy.constructions import (
    make_projective_dilation,
    perturbed_identity,
    reference_line,
)
from mapenergy.energy import p_energy
from mapenergy.manifolds import complex_projective
from mapenergy.maps import build_grid, compose

cp2 = complex_projective(2)
bent = perturbed_identity(cp2, magnitude=0.2, flavor="squeeze", seed=0)
grid = build_grid(cp2, 100000, "monte_carlo", seed=3)

print("lam     E_2(F o T_lam)   MC stderr")
values = []
for lam in (1.0, 2.0, 4.0, 8.0, 16.0, 32.0):
    ev = p_energy(compose(bent, make_projective_dilation(2, lam)), grid, p=2.0)
    values.append(ev.value)
    print(f"{lam:5.0f}   {ev.value:13.6f}   {ev.stderr:.2e}")

line_grid = build_grid(complex_projective(1), 4, "mesh")
restricted = p_energy(compose(bent, reference_line(2).embedding), line_grid,
                      p=2.0).value
target = np.pi * restricted
print()
print(f"restricted energy on the fixed line: {restricted:.6f}")
print(f"squeeze target pi * restricted:      {target:.6f}")
print(f"terminal dev: {abs(values[-1] - target) / target:.2%}"
      f"  (unperturbed identity would give exactly pi^2 = {np.pi**2:.6f})")
