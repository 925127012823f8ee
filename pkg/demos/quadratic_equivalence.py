"""For a harmonic potential the classical and quantum Wigner evolutions coincide.

The kick phase of either mechanics is d * V'(x) when V is quadratic, so the two
propagators apply the same multiplications and the arrays stay equal to the bit.
"""
import numpy as np

from wignerlab import (PropagatorConfig, build_phase_space_grid, coherence_band_divergence,
                       evolve, gaussian_wavepacket, purity, pure_to_wigner)
from wignerlab.potential import harmonic

grid = build_phase_space_grid(128, 128, -8.0, 8.0, -8.0, 8.0)
pot = harmonic(1.0, 1.0)
w0 = pure_to_wigner(gaussian_wavepacket(grid, 1.0, 0.5, 2 ** -0.5))

period = 2 * np.pi
runs = {}
for mech in ("classical", "quantum"):
    cfg = PropagatorConfig(mech, period / 500, 1000, 1.0, pot, record_every=250)
    runs[mech] = evolve(w0, cfg)

print("   t     max|F_cl - F_q|   outer band   purity")
for a, b in zip(runs["classical"].states, runs["quantum"].states):
    bands = coherence_band_divergence(a, b)
    print(f"{a.t:6.2f}   {np.max(np.abs(a.f - b.f)):.1e}          "
          f"{bands['outer']:.1e}      {purity(a):.12f}")

# after two full periods the packet is back where it started
x = grid.x
fx = runs["quantum"][-1].f.sum(axis=1) * grid.dp
print("<x> after two periods:", np.sum(fx * x) * grid.dx)
