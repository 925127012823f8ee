"""Moment hydrodynamics of a Wigner function.

Integrating F over p gives a density n, a mean momentum pbar and a variance
sigma2.  The variance defines a pressure potential I with I_x = (n sigma2)_x/(n m).
For a pure state I coincides with the quantum potential Q = -hbar^2 R''/(2 m R),
R = |psi|.

The moments are trusted down to n = 1e-8 of the peak, so the packet must fall
well below that at the x window edges.  A tail cut off at the edge leaks into F
at every momentum and spoils sigma2 exactly where n is small.
"""
import numpy as np

from wignerlab import (build_phase_space_grid, closure_deviation, compute_Q,
                       gaussian_wavepacket, hydro_fields, pure_to_wigner)
from wignerlab.hydrodynamics import pressure_condition_gap

grid = build_phase_space_grid(256, 256, -8.0, 8.0, -8.0, 8.0)

for x0, p0, s in ((0.0, 0.0, 2 ** -0.5), (0.5, 0.8, 0.6), (-1.0, -0.5, 0.7)):
    psi = gaussian_wavepacket(grid, x0, p0, s)
    fields = hydro_fields(pure_to_wigner(psi), 1.0, psi=psi)
    print(f"x0={x0:+.1f} p0={p0:+.1f} sigma={s:.3f}:  max|I-Q|/max|Q| = "
          f"{closure_deviation(fields):.1e}, pressure condition gap = "
          f"{pressure_condition_gap(fields, grid, 1.0):.1e}")

# the same packet as the last one but wider: its tail reaches the edge at ~3e-7
psi = gaussian_wavepacket(grid, -1.0, -0.5, 0.9)
fields = hydro_fields(pure_to_wigner(psi), 1.0, psi=psi)
print(f"under-resolved tail (sigma=0.9): max|I-Q|/max|Q| = {closure_deviation(fields):.1e}")

# the harmonic ground state has Q = (1 - x^2)/2 in closed form
psi = gaussian_wavepacket(grid, 0.0, 0.0, 2 ** -0.5)
Q = compute_Q(psi, grid, 1.0)
inner = np.abs(grid.x) < 3
print("ground-state Q vs (1 - x^2)/2:", np.max(np.abs(Q[inner] - 0.5 * (1 - grid.x[inner] ** 2))))
