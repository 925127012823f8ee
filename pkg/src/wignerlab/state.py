"""Initial states and the transforms between psi, Z and the Wigner function.

Conventions used throughout the package:

* ``Z[ix, j] = <x + d_j/2 | rho | x - d_j/2>`` with ``d_j = grid.dxoff_values[j]``
  (the full offset, FFT order).
* ``Z(x, d) = int dp F(x, p) exp(+i p d / hbar)`` and its inverse
  ``F(x, p) = (2 pi hbar)^-1 int dd Z(x, d) exp(-i p d / hbar)``.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from .grid import PhaseSpaceGrid


class StateError(ValueError):
    pass


class HermiticityError(StateError):
    """Z does not satisfy Z(x, -d) = conj(Z(x, d))."""


@dataclass(frozen=True)
class PureState:
    psi: np.ndarray
    grid: PhaseSpaceGrid = field(repr=False)
    x0: float | None = None
    p0: float | None = None
    sigma_x: float | None = None
    norm_factor: float = 1.0

    @property
    def norm(self) -> float:
        return float(np.sum(np.abs(self.psi) ** 2) * self.grid.dx)


@dataclass(frozen=True)
class ZMatrix:
    z: np.ndarray
    grid: PhaseSpaceGrid = field(repr=False)
    t: float = 0.0
    norm_factor: float = 1.0

    @property
    def norm(self) -> float:
        return float(np.sum(self.z[:, 0].real) * self.grid.dx)


@dataclass(frozen=True)
class WignerState:
    f: np.ndarray
    grid: PhaseSpaceGrid = field(repr=False)
    t: float = 0.0
    norm_factor: float = 1.0

    @property
    def norm(self) -> float:
        return float(np.sum(self.f) * self.grid.dx * self.grid.dp)

    def with_f(self, f, t=None) -> "WignerState":
        return WignerState(f, self.grid, self.t if t is None else t)


@dataclass
class DensityMatrix:
    """Dense ``rho[i, j] = <x_i | rho | x_j>``; ``truncated`` counts zeroed entries."""
    rho: np.ndarray
    truncated: int
    grid: PhaseSpaceGrid = field(repr=False)


def gaussian_wigner(x, p, x0, p0, sigma_x, hbar=1.0):
    """Closed-form Wigner function of the minimum-uncertainty Gaussian."""
    return np.exp(-(x - x0) ** 2 / (2 * sigma_x ** 2)
                  - 2 * sigma_x ** 2 * (p - p0) ** 2 / hbar ** 2) / (np.pi * hbar)


def gaussian_wavepacket(grid: PhaseSpaceGrid, x0, p0, sigma_x) -> PureState:
    """Minimum-uncertainty Gaussian, normalized on the grid.

    Rejects packets whose 4-sigma support in x or p does not fit on the grid.
    """
    if not sigma_x > 0:
        raise StateError(f"sigma_x must be positive, got {sigma_x}")
    margin = 4 * sigma_x
    if x0 - margin < grid.x_min or x0 + margin > grid.x_max:
        raise StateError(
            f"packet at x0={x0} with sigma_x={sigma_x} needs a 4-sigma margin inside "
            f"[{grid.x_min}, {grid.x_max})")
    sigma_p = grid.hbar / (2 * sigma_x)
    p_lim = min(grid.p_max, -grid.p_min)
    if abs(p0) + 4 * sigma_p > p_lim:
        raise StateError(
            f"|p0| + 4*sigma_p = {abs(p0) + 4 * sigma_p:.4g} exceeds the momentum window {p_lim:.4g}")
    x = grid.x
    psi = (2 * np.pi * sigma_x ** 2) ** -0.25 * np.exp(
        -(x - x0) ** 2 / (4 * sigma_x ** 2) + 1j * p0 * x / grid.hbar)
    psi = psi / np.sqrt(np.sum(np.abs(psi) ** 2) * grid.dx)
    return PureState(psi, grid, x0, p0, sigma_x)


def shifted_samples(values, grid: PhaseSpaceGrid, shifts):
    """Spectrally interpolate ``values(x_i + s)`` for every shift ``s``.

    Returns shape ``(len(shifts), nx)``.  Points landing outside the x window
    are set to zero instead of being wrapped periodically.
    """
    shifts = np.asarray(shifts, dtype=float)
    spec = np.fft.fft(values)
    k = grid.k_values
    out = np.fft.ifft(spec[None, :] * np.exp(1j * k[None, :] * shifts[:, None]), axis=1)
    pos = grid.x[None, :] + shifts[:, None]
    out[(pos < grid.x_min) | (pos >= grid.x_max)] = 0.0
    return out


def pure_to_z(psi, grid: PhaseSpaceGrid | None = None, t=0.0) -> ZMatrix:
    """``Z(x, d) = psi(x + d/2) conj(psi(x - d/2))`` with spectral midpoints."""
    if isinstance(psi, PureState):
        grid = grid or psi.grid
        psi = psi.psi
    d = grid.dxoff_values
    plus = shifted_samples(psi, grid, 0.5 * d)
    minus = shifted_samples(psi, grid, -0.5 * d)
    z = (plus * np.conj(minus)).T
    z = 0.5 * (z + np.conj(z[:, _neg_index(grid.np)]))
    return ZMatrix(np.ascontiguousarray(z), grid, t)


def _neg_index(n):
    return (-np.arange(n)) % n


def hermiticity_violation(z) -> float:
    """Max ``|Z(x, -d) - conj Z(x, d)|`` relative to ``max |Z|``."""
    z = np.asarray(z)
    scale = np.max(np.abs(z)) or 1.0
    return float(np.max(np.abs(z[:, _neg_index(z.shape[1])] - np.conj(z))) / scale)


def _p_min_phase(grid):
    return np.exp(1j * grid.p_min * grid.dxoff_values / grid.hbar)


def z_to_wigner(zmat: ZMatrix, grid: PhaseSpaceGrid | None = None, tol=1e-6) -> WignerState:
    grid = grid or zmat.grid
    err = hermiticity_violation(zmat.z)
    if err > tol:
        raise HermiticityError(f"Z violates Z(x,-d) = conj Z(x,d) by {err:.3g} (tolerance {tol:g})")
    f = np.fft.fft(zmat.z * np.conj(_p_min_phase(grid))[None, :], axis=1) / (grid.np * grid.dp)
    return WignerState(np.ascontiguousarray(f.real), grid, zmat.t)


def wigner_to_z(wig: WignerState, grid: PhaseSpaceGrid | None = None) -> ZMatrix:
    grid = grid or wig.grid
    f = np.asarray(wig.f)
    if np.iscomplexobj(f):
        raise StateError("Wigner array must be real")
    z = np.fft.ifft(f, axis=1) * (grid.np * grid.dp) * _p_min_phase(grid)[None, :]
    return ZMatrix(z, grid, wig.t)


def pure_to_wigner(psi, grid=None, t=0.0) -> WignerState:
    return z_to_wigner(pure_to_z(psi, grid, t))


def z_at_offsets(wig: WignerState, offsets):
    """Evaluate ``Z(x_i, d)`` at arbitrary offsets directly from F."""
    grid = wig.grid
    kern = np.exp(1j * np.outer(grid.p, offsets) / grid.hbar) * grid.dp
    return wig.f @ kern


def assemble_density_matrix(zmat, grid: PhaseSpaceGrid | None = None) -> DensityMatrix:
    """Dense ``rho[i, j] = Z((x_i + x_j)/2, x_i - x_j)``.

    Offsets come from the trigonometric interpolant in d (evaluated straight
    from the discrete F) and half-grid midpoints from a spectral half-cell shift
    along x.  Offsets outside the representable window are zeroed and counted.
    """
    if isinstance(zmat, WignerState):
        wig = zmat
    else:
        wig = z_to_wigner(zmat, grid)
    grid = wig.grid
    nx = grid.nx
    s = np.arange(-(nx - 1), nx)
    offsets = s * grid.dx
    zd = z_at_offsets(wig, offsets)
    spec = np.fft.fft(zd, axis=0)
    zh = np.fft.ifft(spec * np.exp(0.5j * grid.k_values * grid.dx)[:, None], axis=0)

    i, j = np.indices((nx, nx))
    a = i + j
    col = i - j + (nx - 1)
    rho = np.where(a % 2 == 0, zd[a // 2, col], zh[a // 2, col])
    outside = np.abs(offsets) > 0.5 * grid.dxoff_range
    trunc = outside[col]
    rho[trunc] = 0.0
    return DensityMatrix(rho, int(np.count_nonzero(trunc)), grid)


def normalize(state):
    """Rescale to unit total mass; the applied factor lands in ``norm_factor``."""
    mass = state.norm
    if not np.isfinite(mass) or mass <= 0:
        raise StateError(f"cannot normalize a state with total mass {mass}")
    if isinstance(state, PureState):
        factor = 1.0 / np.sqrt(mass)
        return dataclasses.replace(state, psi=state.psi * factor, norm_factor=factor)
    factor = 1.0 / mass
    if isinstance(state, ZMatrix):
        return dataclasses.replace(state, z=state.z * factor, norm_factor=factor)
    if isinstance(state, WignerState):
        return dataclasses.replace(state, f=state.f * factor, norm_factor=factor)
    raise TypeError(f"cannot normalize {type(state).__name__}")
