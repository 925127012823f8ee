"""Moment hierarchy of a Wigner array: n, pbar, sigma2, the potentials W and I,
the quantum potential Q, and residuals of the continuity and motion equations.

Everything derived by dividing by n lives on ``mask = n > n_floor``; values
off the mask are zero.  The residual checks use the stricter relative floor
``RESIDUAL_FLOOR``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_simpson

from .grid import PhaseSpaceGrid
from .potential import Potential
from .state import PureState, WignerState

MAX_ISLANDS = 8
# residuals use a higher relative floor than the moments: below ~1e-6 the mask
# picks up an unresolved low-density halo whose noise does not refine away
RESIDUAL_FLOOR = 1e-6


class HydroError(ValueError):
    pass


@dataclass
class HydroFields:
    n: np.ndarray
    pbar: np.ndarray
    sigma2: np.ndarray
    mask: np.ndarray
    flux: np.ndarray  # n * pbar, the raw first moment (defined everywhere)
    pressure: np.ndarray  # n * sigma2, continuous across the mask edge
    W: np.ndarray | None = None
    I: np.ndarray | None = None
    Q: np.ndarray | None = None
    t: float = 0.0


def spectral_derivative(f, grid: PhaseSpaceGrid, order=1):
    k = grid.k_values.copy()
    if grid.nx % 2 == 0:
        k[grid.nx // 2] = 0.0  # drop the unpaired Nyquist mode
    out = np.fft.ifft((1j * k) ** order * np.fft.fft(f))
    return out.real if np.isrealobj(f) else out


def default_floor(n):
    return 1e-8 * float(np.max(n))


def moments(wig: WignerState, grid: PhaseSpaceGrid | None = None, n_floor=None) -> HydroFields:
    grid = grid or wig.grid
    f, p, dp = wig.f, grid.p, grid.dp
    n = f.sum(axis=1) * dp
    flux = (f @ p) * dp
    floor = default_floor(n) if n_floor is None else n_floor
    mask = n > floor
    pbar = np.zeros_like(n)
    pbar[mask] = flux[mask] / n[mask]
    dev = p[None, :] - pbar[:, None]
    sigma2 = np.zeros_like(n)
    sigma2[mask] = ((f * dev ** 2).sum(axis=1) * dp)[mask] / n[mask]
    # n*sigma2 = sum (p - c)^2 F dp - (M1 - n c)^2 / n for any constant c.  With
    # c the mean momentum the correction is small, and max(n, floor) keeps it
    # continuous off the mask, so the spectral derivative does not ring there.
    c = float(np.sum(flux) / np.sum(n))
    pressure = (f @ (p - c) ** 2) * dp - (flux - n * c) ** 2 / np.maximum(n, max(floor, 1e-300))
    return HydroFields(n, pbar, sigma2, mask, flux, pressure, t=wig.t)


def _islands(mask):
    """``[(start, stop), ...]`` for each run of True values."""
    m = np.concatenate(([False], mask, [False])).astype(np.int8)
    edges = np.flatnonzero(np.diff(m))
    return list(zip(edges[::2], edges[1::2]))


def antiderivative_on_mask(g, mask, dx):
    """Cumulative integral of ``g`` across the span of ``mask``.

    Gaps inside the span are bridged by linear interpolation of ``g``; the
    result is zero outside the span.
    """
    isl = _islands(mask)
    if not isl:
        raise HydroError("mask is empty")
    lo, hi = isl[0][0], isl[-1][1]
    idx = np.arange(lo, hi)
    seg = np.interp(idx, np.flatnonzero(mask), g[mask])
    out = np.zeros_like(g, dtype=float)
    if hi - lo > 1:
        out[lo:hi] = cumulative_simpson(seg, dx=dx, initial=0.0)
    return out


def compute_W(fields: HydroFields, grid: PhaseSpaceGrid):
    """Velocity potential with ``W_x = pbar``; zero at the density maximum."""
    if not fields.mask.any():
        raise HydroError("cannot compute W: mask is empty")
    W = antiderivative_on_mask(fields.pbar, fields.mask, grid.dx)
    peak = int(np.argmax(np.where(fields.mask, fields.n, -np.inf)))
    W = np.where(fields.mask, W - W[peak], 0.0)
    fields.W = W
    return W


def compute_I(fields: HydroFields, grid: PhaseSpaceGrid, m):
    """Pressure potential: ``I_x = (n sigma2)_x / (n m)`` with the level fixed by
    ``sum n sigma2/(2m) dx == sum n I dx``.
    """
    mask = fields.mask
    if not mask.any():
        raise HydroError("cannot compute I: mask is empty")
    isl = _islands(mask)
    if len(isl) > MAX_ISLANDS:
        raise HydroError(
            f"mask splits into {len(isl)} islands (limit {MAX_ISLANDS}); "
            f"raise n_floor or refine the grid")
    n = fields.n
    dS = spectral_derivative(fields.pressure, grid)
    g = np.zeros_like(n)
    g[mask] = dS[mask] / (n[mask] * m)
    I = antiderivative_on_mask(g, mask, grid.dx)
    I = np.where(mask, I, 0.0)
    target = np.sum(n[mask] * fields.sigma2[mask]) / (2 * m)
    shift = (target - np.sum(n[mask] * I[mask])) / np.sum(n[mask])
    I[mask] += shift
    fields.I = I
    return I


def pressure_condition_gap(fields: HydroFields, grid: PhaseSpaceGrid, m) -> float:
    """``|int n sigma2/(2m) dx - int n I dx|`` in the discrete quadrature."""
    mask = fields.mask
    lhs = np.sum(fields.n[mask] * fields.sigma2[mask]) / (2 * m) * grid.dx
    rhs = np.sum(fields.n[mask] * fields.I[mask]) * grid.dx
    return float(abs(lhs - rhs))


def compute_Q(psi_or_R, grid: PhaseSpaceGrid, m, n_floor=None):
    """Quantum potential ``-hbar^2 R_xx / (2 m R)`` on ``R^2 > n_floor``.

    Accepts a :class:`PureState`, a complex wavefunction, or a real modulus.
    Anything else (a Wigner array, None) raises, since Q needs a pure state.
    R''/R is taken spectrally, so R (like the Wigner moments it is compared
    with) must decay far below the mask floor at both window edges; a tail cut
    off there spoils the low-density end of the mask.
    """
    if isinstance(psi_or_R, PureState):
        psi_or_R = psi_or_R.psi
    if psi_or_R is None or isinstance(psi_or_R, WignerState):
        raise HydroError("Q is defined only for a pure state; pass psi or its modulus")
    R = np.abs(np.asarray(psi_or_R))
    if R.shape != (grid.nx,):
        raise HydroError(f"expected a wavefunction of length {grid.nx}, got shape {R.shape}")
    floor = default_floor(R ** 2) if n_floor is None else n_floor
    mask = R ** 2 > floor
    Rxx = spectral_derivative(R, grid, order=2)
    Q = np.zeros_like(R)
    Q[mask] = -grid.hbar ** 2 * Rxx[mask] / (2 * m * R[mask])
    return Q


def hydro_fields(wig: WignerState, m, psi=None, n_floor=None) -> HydroFields:
    """Moments plus W, I (and Q when a pure state is supplied)."""
    grid = wig.grid
    fields = moments(wig, grid, n_floor)
    compute_W(fields, grid)
    compute_I(fields, grid, m)
    if psi is not None:
        fields.Q = compute_Q(psi, grid, m, n_floor=default_floor(fields.n) if n_floor is None else n_floor)
    return fields


def closure_deviation(fields: HydroFields) -> float:
    """``max |I - Q| / max |Q|`` over the common mask."""
    if fields.I is None or fields.Q is None:
        raise HydroError("both I and Q are needed")
    sel = fields.mask & (fields.Q != 0)
    return float(np.max(np.abs(fields.I[sel] - fields.Q[sel])) / np.max(np.abs(fields.Q[sel])))


# --- residuals ---------------------------------------------------------------

def _triple(trajectory, t_index):
    states = trajectory.states if hasattr(trajectory, "states") else list(trajectory)
    if t_index < 1 or t_index + 1 >= len(states):
        raise HydroError(
            f"need snapshots on both sides of t_index={t_index} (have {len(states)})")
    a, b, c = states[t_index - 1], states[t_index], states[t_index + 1]
    h1, h2 = b.t - a.t, c.t - b.t
    if not np.isclose(h1, h2, rtol=1e-9, atol=0) or h1 <= 0:
        raise HydroError("residuals need equally spaced snapshots")
    return a, b, c


def _wnorm(v, w):
    return float(np.sqrt(np.sum(w * v * v)))


def continuity_residual(trajectory, grid: PhaseSpaceGrid, m, t_index,
                        rel_floor=RESIDUAL_FLOOR) -> float:
    """Relative L2 residual of ``n_t = -(n pbar / m)_x`` on the mask.

    ``n_t`` is a centred difference of neighbouring snapshots.  The
    denominator is ``max(||rhs||, ||n_x|| p_rms / m)``, where the second term
    (the rate a flow at the rms speed would produce) keeps stationary states
    from dividing zero by zero.
    """
    a, b, c = _triple(trajectory, t_index)
    fb = moments(b, grid)
    fb.mask = fb.n > rel_floor * fb.n.max()
    n_t = (moments(c, grid).n - moments(a, grid).n) / (c.t - a.t)
    rhs = -spectral_derivative(fb.flux, grid) / m
    mask = fb.mask
    ones = np.ones(int(mask.sum()))
    num = _wnorm((n_t - rhs)[mask], ones)
    p_rms = np.sqrt(max(np.sum(b.f * grid.p[None, :] ** 2) * grid.dx * grid.dp, 0.0))
    scale = max(_wnorm(rhs[mask], ones),
                _wnorm(spectral_derivative(fb.n, grid)[mask], ones) * p_rms / m)
    return num / scale if scale > 0 else num


@dataclass
class MotionResidual:
    value: float
    gauge_offset: float


def motion_residual(trajectory, grid: PhaseSpaceGrid, m, t_index, potential: Potential,
                    rel_floor=RESIDUAL_FLOOR) -> MotionResidual:
    """Residual of ``W_t = -[(W_x)^2/(2m) + V + I]`` at snapshot ``t_index``.

    Norms are density-weighted L2 over the mask common to the three
    snapshots.  The spatially constant part of the residual (W's arbitrary
    level) is removed and returned as ``gauge_offset``; the remainder is
    divided by the sum of the norms of the individual (mean-removed) terms.
    """
    a, b, c = _triple(trajectory, t_index)
    fa, fb, fc = (moments(s, grid) for s in (a, b, c))
    for f in (fa, fb, fc):
        f.mask = f.n > rel_floor * f.n.max()
    mask = fa.mask & fb.mask & fc.mask
    for f in (fa, fb, fc):
        f.mask = mask
    Wa, Wc = compute_W(fa, grid), compute_W(fc, grid)
    compute_I(fb, grid, m)
    W_t = (Wc - Wa) / (c.t - a.t)
    kin = fb.pbar ** 2 / (2 * m)
    V = potential.value(grid.x)
    w = fb.n[mask] * grid.dx
    w = w / w.sum()

    def centred(v):
        v = v[mask]
        return v - np.sum(w * v)

    r = (W_t + kin + V + fb.I)[mask]
    offset = float(np.sum(w * r))
    num = _wnorm(r - offset, w)
    scale = sum(_wnorm(centred(v), w) for v in (W_t, kin, V, fb.I))
    return MotionResidual(num / scale if scale > 0 else num, offset)
