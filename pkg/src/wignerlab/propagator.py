"""Strang-split spectral propagation of a Wigner array under either mechanics.

One step is ``stream(dt/2) . kick(dt) . stream(dt/2)``:

* stream: exact free flow ``F(x, p) <- F(x - p t/m, p)`` by a phase in (k, p);
* kick: multiplication of ``Z(x, d)`` by ``exp(-i phi(x, d) dt / hbar)``, which is
  the exact classical momentum shear for ``phi_cl`` and the exact integral of
  the Moyal potential term for ``phi_q``.

Both substeps use real FFTs, so realness of F holds by construction.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .grid import GridError, PhaseSpaceGrid
from .potential import CLASSICAL, QUANTUM, KickPhase, Potential, kick_phase
from .state import WignerState, gaussian_wigner

log = logging.getLogger(__name__)


class PropagationError(RuntimeError):
    pass


class NonFiniteError(PropagationError):
    """Raised when F stops being finite; carries the partial trajectory."""

    def __init__(self, step, trajectory):
        super().__init__(f"non-finite values in F at step {step}")
        self.step = step
        self.trajectory = trajectory


@dataclass(frozen=True)
class PropagatorConfig:
    mechanics: str
    dt: float
    n_steps: int
    m: float
    potential: Potential
    record_every: int = 1

    def __post_init__(self):
        problems = []
        if self.mechanics not in (CLASSICAL, QUANTUM):
            problems.append(f"mechanics must be classical or quantum, got {self.mechanics!r}")
        if not self.dt > 0:
            problems.append(f"dt must be positive, got {self.dt}")
        if not self.m > 0:
            problems.append(f"m must be positive, got {self.m}")
        if int(self.n_steps) < 1:
            problems.append(f"n_steps must be >= 1, got {self.n_steps}")
        if int(self.record_every) < 1:
            problems.append(f"record_every must be >= 1, got {self.record_every}")
        if problems:
            raise ValueError("; ".join(problems))


@dataclass
class Trajectory:
    times: list = field(default_factory=list)
    states: list = field(default_factory=list)
    steps: list = field(default_factory=list)
    config: PropagatorConfig | None = None

    def __len__(self):
        return len(self.states)

    def __getitem__(self, i) -> WignerState:
        return self.states[i]

    def append(self, step, state):
        self.steps.append(step)
        self.times.append(state.t)
        self.states.append(state)


# --- multipliers -------------------------------------------------------------

def _rk_axis(grid):
    return 2 * np.pi * np.fft.rfftfreq(grid.nx, d=grid.dx)


def stream_multiplier(grid: PhaseSpaceGrid, m, tau):
    """Free-flow factor on the (rfft k, p) grid for a drift of duration ``tau``.

    The unpaired Nyquist mode has no direction to shift in; it is zeroed, which
    also makes two half streams compose exactly into a full one.
    """
    mult = np.exp(-1j * (tau / m) * _rk_axis(grid)[:, None] * grid.p[None, :])
    if grid.nx % 2 == 0:
        mult[-1] = 0.0
    return mult


def rfft_phase(kick: KickPhase):
    """Kick phase at the non-negative offsets of an rfft along p.

    The Nyquist column is stored at the negative offset in FFT order; oddness
    in d gives its value at the positive one.
    """
    half = kick.grid.np // 2
    ph = np.array(kick.phase[:, :half + 1])
    ph[:, half] = -kick.phase[:, half]
    return ph


def kick_multiplier(kick: KickPhase, dt):
    # rfft uses exp(-i...), i.e. the conjugate of the Z kernel, hence the + sign
    return np.exp(1j * (dt / kick.grid.hbar) * rfft_phase(kick))


def _apply_stream(f, mult, nx):
    return np.fft.irfft(np.fft.rfft(f, axis=0) * mult, n=nx, axis=0)


def _apply_kick(f, mult, np_):
    return np.fft.irfft(np.fft.rfft(f, axis=1) * mult, n=np_, axis=1)


# --- single operations --------------------------------------------------------

def stream_half_step(wig: WignerState, grid: PhaseSpaceGrid, m, dt) -> WignerState:
    """Free flow over ``dt/2``: ``F(x, p) <- F(x - p dt/(2m), p)``."""
    grid.check_same(wig.grid)
    f = _apply_stream(wig.f, stream_multiplier(grid, m, 0.5 * dt), grid.nx)
    return WignerState(f, grid, wig.t + 0.5 * dt)


def kick_full_step(wig: WignerState, grid: PhaseSpaceGrid, kick: KickPhase, dt) -> WignerState:
    """Apply ``exp(-i phi dt/hbar)`` to Z.  Time stamp is unchanged."""
    grid.check_same(wig.grid)
    if not grid.same_as(kick.grid) or kick.phase.shape != grid.shape:
        raise GridError("kick phase was built on a different grid")
    f = _apply_kick(wig.f, kick_multiplier(kick, dt), grid.np)
    return WignerState(f, grid, wig.t)


def strang_step(wig: WignerState, grid: PhaseSpaceGrid, config: PropagatorConfig) -> WignerState:
    kick = kick_phase(config.potential, grid, config.mechanics)
    half = stream_half_step(wig, grid, config.m, config.dt)
    kicked = kick_full_step(half, grid, kick, config.dt)
    out = stream_half_step(kicked, grid, config.m, config.dt)
    return WignerState(out.f, grid, wig.t + config.dt)


class SplitStepper:
    """Caches the stream and kick multipliers for repeated steps."""

    def __init__(self, grid: PhaseSpaceGrid, config: PropagatorConfig):
        self.grid = grid
        self.config = config
        self.kick = kick_phase(config.potential, grid, config.mechanics)
        self._half = stream_multiplier(grid, config.m, 0.5 * config.dt)
        self._full = stream_multiplier(grid, config.m, config.dt)
        self._kick = kick_multiplier(self.kick, config.dt)

    def half_stream(self, f):
        return _apply_stream(f, self._half, self.grid.nx)

    def full_stream(self, f):
        return _apply_stream(f, self._full, self.grid.nx)

    def apply_kick(self, f):
        return _apply_kick(f, self._kick, self.grid.np)

    def step(self, f):
        return self.half_stream(self.apply_kick(self.half_stream(f)))


def iter_evolve(initial: WignerState, config: PropagatorConfig, check_every=1):
    """Yield ``(step, WignerState)`` at step 0, every ``record_every`` steps and
    the final step, without keeping earlier states.

    Adjacent half-streams between unrecorded steps are fused into one full
    stream.  Raises :class:`NonFiniteError` (trajectory None) if F blows up.
    """
    grid = initial.grid
    stepper = SplitStepper(grid, config)
    t0 = initial.t
    f = np.array(initial.f, dtype=float)
    yield 0, WignerState(f.copy(), grid, t0)

    n_steps, every = int(config.n_steps), int(config.record_every)
    pending_half = False  # a half stream from the previous step still owed
    for n in range(1, n_steps + 1):
        f = stepper.full_stream(f) if pending_half else stepper.half_stream(f)
        f = stepper.apply_kick(f)
        record = n % every == 0 or n == n_steps
        if record:
            f = stepper.half_stream(f)
            pending_half = False
        else:
            pending_half = True
        if (record or n % check_every == 0) and not np.isfinite(f).all():
            raise NonFiniteError(n, None)
        if record:
            yield n, WignerState(f.copy(), grid, t0 + n * config.dt)


def evolve(initial: WignerState, config: PropagatorConfig, check_every=1) -> Trajectory:
    """Run ``n_steps`` Strang steps and collect the recorded states.

    Raises :class:`NonFiniteError` carrying the partial trajectory if F blows up.
    """
    traj = Trajectory(config=config)
    try:
        for n, state in iter_evolve(initial, config, check_every):
            traj.append(n, state)
    except NonFiniteError as exc:
        raise NonFiniteError(exc.step, traj) from None
    return traj


# --- classical characteristics oracle -------------------------------------------

@dataclass(frozen=True)
class GaussianSpec:
    x0: float
    p0: float
    sigma_x: float


@dataclass
class OracleResult:
    state: WignerState
    substeps: int
    escaped: int


def _rk4_backward(x, p, force, m, t, nsub):
    h = -t / nsub
    for _ in range(nsub):
        k1x, k1p = p / m, -force(x)
        x2, p2 = x + 0.5 * h * k1x, p + 0.5 * h * k1p
        k2x, k2p = p2 / m, -force(x2)
        x3, p3 = x + 0.5 * h * k2x, p + 0.5 * h * k2p
        k3x, k3p = p3 / m, -force(x3)
        x4, p4 = x + h * k3x, p + h * k3p
        k4x, k4p = p4 / m, -force(x4)
        x = x + (h / 6) * (k1x + 2 * k2x + 2 * k3x + k4x)
        p = p + (h / 6) * (k1p + 2 * k2p + 2 * k3p + k4p)
    return x, p


def characteristics_oracle(initial: GaussianSpec, potential: Potential, m, t,
                           sample_grid: PhaseSpaceGrid, tol=1e-8, box=None,
                           min_step=0.01, max_substeps=1 << 16) -> OracleResult:
    """Classical F at time ``t`` by backward RK4 along characteristics.

    Each grid node is traced back to ``t = 0`` and the closed-form initial
    Gaussian Wigner function is evaluated at the preimage.  The substep count is
    doubled until the sampled F changes by less than ``tol``.  Preimages leaving
    ``box`` (default: the grid rectangle enlarged 2x about its centre) are
    assigned 0 and counted.
    """
    grid = sample_grid
    hbar = grid.hbar
    X, Pm = np.meshgrid(grid.x, grid.p, indexing="ij")

    def f0(x, p):
        return gaussian_wigner(x, p, initial.x0, initial.p0, initial.sigma_x, hbar)

    if t == 0:
        return OracleResult(WignerState(f0(X, Pm), grid, 0.0), 0, 0)

    if box is None:
        cx, hx = 0.5 * (grid.x_min + grid.x_max), grid.x_length
        cp, hp = 0.5 * (grid.p_min + grid.p_max), grid.p_max - grid.p_min
        box = (cx - hx, cx + hx, cp - hp, cp + hp)
    force = potential.derivative

    def sample(nsub):
        with np.errstate(over="ignore", invalid="ignore"):
            xb, pb = _rk4_backward(X, Pm, force, m, t, nsub)
        bad = ~(np.isfinite(xb) & np.isfinite(pb))
        bad |= (xb < box[0]) | (xb > box[1]) | (pb < box[2]) | (pb > box[3])
        xb = np.where(bad, initial.x0, xb)
        pb = np.where(bad, initial.p0, pb)
        return np.where(bad, 0.0, f0(xb, pb)), int(np.count_nonzero(bad))

    nsub = max(8, math.ceil(abs(t) / min_step))
    prev, escaped = sample(nsub)
    while True:
        nsub *= 2
        cur, escaped = sample(nsub)
        if np.max(np.abs(cur - prev)) < tol:
            break
        if nsub >= max_substeps:
            log.warning("characteristics oracle did not converge to %g at %d substeps", tol, nsub)
            break
        prev = cur
    if escaped:
        log.warning("%d characteristic preimages left the safety box", escaped)
    return OracleResult(WignerState(cur, grid, t), nsub, escaped)
