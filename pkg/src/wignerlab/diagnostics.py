"""Scalar and band-resolved measures of classical/quantum divergence."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import PhaseSpaceGrid
from .potential import Potential
from .state import WignerState, ZMatrix, assemble_density_matrix, wigner_to_z

BAND_NAMES = ("inner", "mid", "outer")


@dataclass
class DivergenceReport:
    t: float
    norm: float
    energy: float
    purity: float
    min_eig: float
    band_dist: dict = field(default_factory=dict)
    diag_dist: float = float("nan")
    low_confidence: bool = False

    def row(self):
        b = self.band_dist
        nan = float("nan")
        return (self.t, self.norm, self.energy, self.purity, self.min_eig, self.diag_dist,
                b.get("inner", nan), b.get("mid", nan), b.get("outer", nan))


def norm(wig: WignerState) -> float:
    return wig.norm


def purity(wig: WignerState, grid: PhaseSpaceGrid | None = None) -> float:
    """``Tr rho^2 = 2 pi hbar sum F^2 dx dp``."""
    grid = grid or wig.grid
    return float(2 * np.pi * grid.hbar * np.sum(wig.f ** 2) * grid.dx * grid.dp)


def dense_purity(wig: WignerState) -> float:
    """``Tr rho^2`` from the assembled dense density matrix (snapshot cross-check)."""
    grid = wig.grid
    dm = assemble_density_matrix(wig)
    return float(np.sum(np.abs(dm.rho) ** 2) * grid.dx ** 2)


@dataclass
class EigenResult:
    value: float
    low_confidence: bool
    truncated: int


def min_eigenvalue(state, grid: PhaseSpaceGrid | None = None, max_truncated=0.01) -> EigenResult:
    """Smallest eigenvalue of ``dx * (rho + rho^dagger)/2``.

    ``low_confidence`` is set when more than ``max_truncated`` of the matrix
    entries fell outside the representable offset window.
    """
    dm = assemble_density_matrix(state, grid)
    g = dm.grid
    h = 0.5 * (dm.rho + dm.rho.conj().T) * g.dx
    lo = float(np.linalg.eigvalsh(h)[0])
    frac = dm.truncated / h.size
    return EigenResult(lo, frac > max_truncated, dm.truncated)


def rank_one_defect(state, grid: PhaseSpaceGrid | None = None) -> float:
    """``1 - lambda_max / trace`` of the density matrix: 0 exactly when it factorizes
    into a single wavefunction.  Unlike ``purity`` this separates a classically
    evolved F (whose integral of F^2 is conserved) from a pure quantum state.
    """
    dm = assemble_density_matrix(state, grid)
    h = 0.5 * (dm.rho + dm.rho.conj().T) * dm.grid.dx
    ev = np.linalg.eigvalsh(h)
    return float(1.0 - ev[-1] / ev.sum())


def random_probe_min(matrix, n_probes=64, rng=None):
    """Min of the Rayleigh quotient over random probes (an upper bound on the
    smallest eigenvalue of a Hermitian matrix).

    Probes alternate between dense complex Gaussian vectors and sparse ones
    supported on a random handful of coordinates.
    """
    rng = np.random.default_rng(rng)
    h = 0.5 * (matrix + matrix.conj().T)
    n = h.shape[0]
    best = np.inf
    for i in range(n_probes):
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        if i % 2:
            keep = rng.choice(n, size=rng.integers(1, max(2, n // 4) + 1), replace=False)
            mask = np.zeros(n, bool)
            mask[keep] = True
            v[~mask] = 0
        v /= np.linalg.norm(v)
        best = min(best, float((v.conj() @ h @ v).real))
    return best


def energy(wig: WignerState, grid: PhaseSpaceGrid | None, potential: Potential, m) -> float:
    grid = grid or wig.grid
    h = grid.p[None, :] ** 2 / (2 * m) + potential.value(grid.x)[:, None]
    return float(np.sum(wig.f * h) * grid.dx * grid.dp)


def default_bands(grid: PhaseSpaceGrid):
    L = grid.dxoff_range
    return {"inner": (0.0, L / 8), "mid": (L / 8, L / 4), "outer": (L / 4, L / 2 + 1e-12 * L)}


def _as_z(s):
    if isinstance(s, ZMatrix):
        return s
    return wigner_to_z(s)


def coherence_band_divergence(z_cl, z_q, grid: PhaseSpaceGrid | None = None, bands=None):
    """Max ``|Z_cl - Z_q|`` within each band of ``|d|``.

    Default bands split the offset window of width L at L/8 and L/4; the
    outer band includes the Nyquist offset ``|d| = L/2``.
    """
    z_cl, z_q = _as_z(z_cl), _as_z(z_q)
    grid = grid or z_cl.grid
    grid.check_same(z_cl.grid)
    grid.check_same(z_q.grid)
    bands = bands or default_bands(grid)
    diff = np.abs(z_cl.z - z_q.z)
    ad = np.abs(grid.dxoff_values)
    out = {}
    for name, (lo, hi) in bands.items():
        sel = (ad >= lo) & (ad < hi)
        out[name] = float(diff[:, sel].max()) if sel.any() else 0.0
    return out


def diagonal_divergence(z_cl, z_q, grid: PhaseSpaceGrid | None = None) -> float:
    z_cl, z_q = _as_z(z_cl), _as_z(z_q)
    grid = grid or z_cl.grid
    grid.check_same(z_cl.grid)
    grid.check_same(z_q.grid)
    return float(np.max(np.abs(z_cl.z[:, 0] - z_q.z[:, 0])))


def report(wig: WignerState, potential: Potential, m, other: WignerState | None = None,
           eig=True) -> DivergenceReport:
    """Build one :class:`DivergenceReport`; ``other`` is the opposite mechanics at the same time."""
    ev = min_eigenvalue(wig) if eig else EigenResult(float("nan"), False, 0)
    rep = DivergenceReport(wig.t, wig.norm, energy(wig, None, potential, m), purity(wig),
                           ev.value, low_confidence=ev.low_confidence)
    if other is not None:
        za, zb = wigner_to_z(wig), wigner_to_z(other)
        rep.band_dist = coherence_band_divergence(za, zb)
        rep.diag_dist = diagonal_divergence(za, zb)
    return rep
