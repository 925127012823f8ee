"""Periodic phase-space grid with its two Fourier-conjugate pairings.

Position ``x`` pairs with wavenumber ``k`` and momentum ``p`` pairs with the
coordinate offset ``dxoff`` (written delta-x elsewhere), related by
``dxoff = hbar * 2*pi * fftfreq(np, dp)``.  Arrays on the grid are laid out
as ``F[ix, ip]``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class GridError(ValueError):
    """Raised for an invalid grid specification."""


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class PhaseSpaceGrid:
    nx: int
    np: int
    x_min: float
    x_max: float
    p_min: float
    p_max: float
    hbar: float = 1.0
    # derived, filled in __post_init__
    dx: float = field(init=False)
    dp: float = field(init=False)
    x: np.ndarray = field(init=False, repr=False, compare=False)
    p: np.ndarray = field(init=False, repr=False, compare=False)
    k_values: np.ndarray = field(init=False, repr=False, compare=False)
    dxoff_values: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        problems = []
        for name in ("nx", "np"):
            n = getattr(self, name)
            if not isinstance(n, (int, np.integer)) or not _is_power_of_two(int(n)):
                problems.append(f"{name} must be a power of two (got {n!r})")
            elif n < 8:
                problems.append(f"{name} must be at least 8 (got {n})")
        if not self.x_max > self.x_min:
            problems.append(f"x_max ({self.x_max}) must exceed x_min ({self.x_min})")
        if not self.p_max > self.p_min:
            problems.append(f"p_max ({self.p_max}) must exceed p_min ({self.p_min})")
        if not self.hbar > 0:
            problems.append(f"hbar must be positive (got {self.hbar})")
        if problems:
            raise GridError("; ".join(problems))

        nx, np_ = int(self.nx), int(self.np)
        dx = (self.x_max - self.x_min) / nx
        dp = (self.p_max - self.p_min) / np_
        x = self.x_min + dx * np.arange(nx)
        p = self.p_min + dp * np.arange(np_)
        k, dxoff = _conjugates(nx, np_, dx, dp, self.hbar)
        for arr in (x, p, k, dxoff):
            arr.flags.writeable = False

        set_ = object.__setattr__
        set_(self, "nx", nx)
        set_(self, "np", np_)
        set_(self, "dx", dx)
        set_(self, "dp", dp)
        set_(self, "x", x)
        set_(self, "p", p)
        set_(self, "k_values", k)
        set_(self, "dxoff_values", dxoff)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx, self.np)

    @property
    def d_dxoff(self) -> float:
        """Spacing of the offset grid, ``2*pi*hbar / (np*dp)``."""
        return 2 * np.pi * self.hbar / (self.np * self.dp)

    @property
    def dxoff_range(self) -> float:
        """Full width of the offset window, ``2*pi*hbar/dp``."""
        return 2 * np.pi * self.hbar / self.dp

    @property
    def x_length(self) -> float:
        return self.x_max - self.x_min

    def same_as(self, other: "PhaseSpaceGrid") -> bool:
        return (self.nx, self.np, self.x_min, self.x_max, self.p_min, self.p_max, self.hbar) == (
            other.nx, other.np, other.x_min, other.x_max, other.p_min, other.p_max, other.hbar)

    def check_same(self, other: "PhaseSpaceGrid"):
        if not self.same_as(other):
            raise GridError(f"grid mismatch: {self} vs {other}")


def _conjugates(nx, np_, dx, dp, hbar):
    k = 2 * np.pi * np.fft.fftfreq(nx, d=dx)
    dxoff = hbar * 2 * np.pi * np.fft.fftfreq(np_, d=dp)
    return k, dxoff


def build_phase_space_grid(nx, np, x_min, x_max, p_min, p_max, hbar=1.0) -> PhaseSpaceGrid:
    """Validate the bounds and build a :class:`PhaseSpaceGrid`.

    Raises :class:`GridError` listing every violated precondition.
    """
    return PhaseSpaceGrid(nx, np, float(x_min), float(x_max), float(p_min), float(p_max), float(hbar))


def frequency_grid(grid: PhaseSpaceGrid):
    """Return ``(k_values, dxoff_values)`` in FFT order (zero frequency first)."""
    return grid.k_values, grid.dxoff_values
