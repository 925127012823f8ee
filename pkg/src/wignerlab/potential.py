"""Polynomial potential families and the kick phases built from them.

All families are stored as ascending polynomial coefficients, so values and
derivatives are exact closed forms.  The classical and quantum kick phases
differ only by the odd Taylor terms of order >= 3:

    classical:  phi_cl(x, d) = d * V'(x)
    quantum:    phi_q(x, d)  = V(x + d/2) - V(x - d/2)
                             = sum_{n odd} 2 V^(n)(x) (d/2)^n / n!
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial

import numpy as np
from numpy.polynomial import polynomial as P

from .grid import PhaseSpaceGrid

FAMILIES = ("free", "linear", "harmonic", "quartic", "polynomial")
MAX_DEGREE = 8

CLASSICAL = "classical"
QUANTUM = "quantum"


class PotentialError(ValueError):
    pass


@dataclass(frozen=True)
class Potential:
    """A potential ``V(x) = sum_n coeffs[n] x**n``.

    Build one through :func:`make_potential` or the family helpers.
    """
    family: str
    params: dict
    coeffs: np.ndarray = field(repr=False, compare=False)

    def value(self, x):
        return P.polyval(np.asarray(x, dtype=float), self.coeffs)

    def derivative(self, x, order=1):
        return P.polyval(np.asarray(x, dtype=float), self.derivative_coeffs(order))

    def derivative_coeffs(self, order=1):
        if order >= len(self.coeffs):
            return np.zeros(1)
        return P.polyder(self.coeffs, order)

    @property
    def degree(self) -> int:
        nz = np.flatnonzero(self.coeffs)
        return int(nz[-1]) if nz.size else 0

    @property
    def is_at_most_quadratic(self) -> bool:
        return self.degree <= 2


def _build(family, params, coeffs):
    c = np.asarray(coeffs, dtype=float)
    if c.ndim != 1 or c.size == 0:
        raise PotentialError("coefficient list must be a non-empty 1-D sequence")
    if not np.all(np.isfinite(c)):
        raise PotentialError("coefficients must be finite")
    if c.size > MAX_DEGREE + 1:
        if np.any(c[MAX_DEGREE + 1:] != 0):
            raise PotentialError(f"polynomial degree is capped at {MAX_DEGREE}")
        c = c[:MAX_DEGREE + 1]
    c = c.copy()
    c.flags.writeable = False
    return Potential(family, dict(params), c)


def free():
    return _build("free", {}, [0.0])


def linear(g):
    return _build("linear", {"g": g}, [0.0, g])


def harmonic(m=1.0, omega=1.0):
    return _build("harmonic", {"m": m, "omega": omega}, [0.0, 0.0, 0.5 * m * omega ** 2])


def quartic(lam=1.0, m=1.0, omega=0.0):
    """``lam*x**4`` plus an optional harmonic part ``m*omega**2*x**2/2``."""
    return _build("quartic", {"lam": lam, "m": m, "omega": omega},
                  [0.0, 0.0, 0.5 * m * omega ** 2, 0.0, lam])


def polynomial(coeffs):
    return _build("polynomial", {"coeffs": list(map(float, coeffs))}, coeffs)


def make_potential(family: str, coefficients=()) -> Potential:
    """Build a potential from a family name and a flat coefficient list.

    Coefficient meaning per family (the config-file convention):

    - free: none
    - linear: ``g``
    - harmonic: ``m, omega``
    - quartic: ``lam[, m, omega]``
    - polynomial: ``c0, c1, ..., cN`` with N <= 8
    """
    c = [float(v) for v in coefficients]
    expected = {"free": (0, 0), "linear": (1, 1), "harmonic": (2, 2), "quartic": (1, 3)}
    if family not in FAMILIES:
        raise PotentialError(f"unknown potential family {family!r}; expected one of {FAMILIES}")
    if family in expected:
        lo, hi = expected[family]
        if not lo <= len(c) <= hi:
            raise PotentialError(
                f"family {family!r} takes {lo}..{hi} coefficients, got {len(c)}")
    if family == "free":
        return free()
    if family == "linear":
        return linear(*c)
    if family == "harmonic":
        return harmonic(*c)
    if family == "quartic":
        if len(c) == 2:
            raise PotentialError("quartic takes lam alone or lam, m, omega")
        return quartic(*c)
    if not c:
        raise PotentialError("polynomial family needs at least one coefficient")
    return polynomial(c)


def eval_potential(pot: Potential, x_array):
    return pot.value(x_array)


def eval_force_potential_derivative(pot: Potential, x_array):
    """Exact ``V_x`` (the force is its negative)."""
    return pot.derivative(x_array)


@dataclass(frozen=True)
class KickPhase:
    """Phase array ``phase[ix, j]`` on the (x, dxoff) grid, dxoff in FFT order."""
    phase: np.ndarray
    mechanics: str
    grid: PhaseSpaceGrid = field(repr=False)


def classical_kick_phase(pot: Potential, grid: PhaseSpaceGrid) -> KickPhase:
    return KickPhase(_classical_phase(pot, grid.x, grid.dxoff_values), CLASSICAL, grid)


def quantum_kick_phase(pot: Potential, grid: PhaseSpaceGrid) -> KickPhase:
    return KickPhase(_quantum_phase(pot, grid.x, grid.dxoff_values), QUANTUM, grid)


def kick_phase(pot: Potential, grid: PhaseSpaceGrid, mechanics: str) -> KickPhase:
    if mechanics == CLASSICAL:
        return classical_kick_phase(pot, grid)
    if mechanics == QUANTUM:
        return quantum_kick_phase(pot, grid)
    raise PotentialError(f"mechanics must be 'classical' or 'quantum', got {mechanics!r}")


def _classical_phase(pot, x, d):
    return np.asarray(d)[None, :] * pot.derivative(x)[:, None]


def _quantum_phase(pot, x, d):
    # Odd Taylor expansion about the midpoint; exact for polynomials and free of
    # the cancellation in V(x+d/2) - V(x-d/2).  The n=1 term is written exactly
    # as the classical phase so quadratic potentials agree bit for bit.
    d = np.asarray(d)
    phase = _classical_phase(pot, x, d)
    half = 0.5 * d
    for n in range(3, pot.degree + 1, 2):
        dn = pot.derivative_coeffs(n)
        if not np.any(dn):
            continue
        phase = phase + (2.0 / factorial(n)) * P.polyval(x, dn)[:, None] * half[None, :] ** n
    return phase


def phase_discrepancy(pot: Potential, grid: PhaseSpaceGrid):
    """``|phi_q - phi_cl|`` on the grid; leading term ``|V'''(x)| |d|**3 / 24``."""
    x, d = grid.x, grid.dxoff_values
    return np.abs(_quantum_phase(pot, x, d) - _classical_phase(pot, x, d))
