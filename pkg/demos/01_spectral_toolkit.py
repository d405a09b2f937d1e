"""Tour of the spectral toolkit: fields, projections, multipliers, norms.

Every field on the torus [0, 2 pi)^2 lives as a set of Fourier
coefficients on the symmetric lattice |k|_inf <= N.  This script builds a
few simple fields and shows the basic operators acting on them.
"""

import numpy as np

from vectormix import (
    GridSpec,
    field_from_component_modes,
    fractional_multiplier,
    l2_norm,
    lebesgue_norm,
    leray_project,
    sobolev_norm,
    to_physical,
)

grid = GridSpec(n_cutoff=16)
print(f"grid: modes |k|_inf <= {grid.n_cutoff}, sampling {grid.phys_size}^2, "
      f"dealiased products on {grid.dealias_size}^2")

# A single shear mode u = (0, sin x).  Its only nonzero coefficients are
# uhat_{(1,0)} = (0, -i/2) and the Hermitian partner.
u = field_from_component_modes(grid, {(1, 0): (0.0, -0.5j)})

print("\nnorms of (0, sin x):")
print(f"  L2         = {l2_norm(u):.12f}   (pi sqrt(2) = {np.pi*np.sqrt(2):.12f})")
print(f"  H^-1       = {sobolev_norm(u, -1.0):.12f}  (|k| = 1: same value)")
print(f"  H^-1/2     = {sobolev_norm(u, -0.5):.12f}")
print(f"  sup norm   = {lebesgue_norm(to_physical(u, pad=64), np.inf):.12f}")

# The divergence-free projection removes the k-parallel part of each mode.
# A mode pointing along its own wavevector is annihilated entirely:
grad_mode = field_from_component_modes(grid, {(1, 0): (1.0, 0.0)})
print("\nprojection of the gradient mode (e^{ix}, 0):",
      np.max(np.abs(leray_project(grad_mode).coeffs)), "(annihilated)")

# An oblique mode keeps only its perpendicular part:
oblique = field_from_component_modes(grid, {(1, 1): (1.0, 0.0)})
proj = leray_project(oblique)
print("projection of (e^{i(x+y)}, 0) at k=(1,1):",
      proj.coeffs[:, 17, 17].real, "(the formula gives (1/2, -1/2))")

# Fractional multipliers scale each mode by ((2 pi / L)|k|)^s.  Applying s
# and then -s returns the original mean-zero field:
smoothed = fractional_multiplier(u, -2.0)
roundtrip = fractional_multiplier(smoothed, 2.0)
print("\nmultiplier round trip error:",
      np.max(np.abs(roundtrip.coeffs - u.coeffs)))

# Parseval: the spectral L2 norm equals the physical-space quadrature.
phys = to_physical(u, pad=48)
print("Parseval check:", abs(lebesgue_norm(phys, 2.0) - l2_norm(u)))
