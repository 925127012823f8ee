"""Run a configured experiment and write its files.

Layout under the output directory::

    config.ini                      resolved configuration
    <mechanics>/diagnostics.csv     one row per record time
    <mechanics>/F_<step>.bin|.csv   Wigner snapshots (if requested)
    <mechanics>/hydro_<step>.csv    moment fields (if hydro = true)
    <mechanics>/closure.csv         t, I-Q deviation, pressure condition gap
    error.log                       only after a runtime abort
"""
from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import io
from .config import ExperimentConfig
from .diagnostics import coherence_band_divergence, diagonal_divergence, report
from .hydrodynamics import (HydroError, closure_deviation, hydro_fields,
                            pressure_condition_gap)
from .propagator import NonFiniteError, PropagatorConfig, iter_evolve
from .state import gaussian_wavepacket, pure_to_wigner, wigner_to_z

log = logging.getLogger(__name__)

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2


@dataclass
class ExperimentResult:
    status: int
    out_dir: str
    reports: dict = field(default_factory=dict)
    closure: dict = field(default_factory=dict)
    files: list = field(default_factory=list)
    error: str = ""


def _closure_row(wig, m, psi):
    try:
        fields = hydro_fields(wig, m, psi=psi)
    except HydroError as exc:
        log.warning("hydro fields unavailable at t=%g: %s", wig.t, exc)
        return None, (wig.t, float("nan"), float("nan"))
    return fields, (wig.t, closure_deviation(fields), pressure_condition_gap(fields, wig.grid, m))


def run_experiment(config: ExperimentConfig, out_dir=None) -> ExperimentResult:
    """Evolve the configured initial state under each requested mechanics.

    With ``mechanics = both`` the two evolutions advance concurrently, record
    by record, and the cross divergences fill the band and diagonal columns
    (nan otherwise).  A non-finite state stops the run: everything recorded so
    far is written, ``error.log`` names the step, and the status is 2.
    """
    out_dir = out_dir or config.output.directory
    res = ExperimentResult(EXIT_OK, out_dir)
    grid = config.grid.build()
    pot = config.potential.build()
    run = config.run
    m = run.mass
    psi = gaussian_wavepacket(grid, config.initial.x0, config.initial.p0, config.initial.sigma_x)
    w0 = pure_to_wigner(psi)
    mechs = run.mechanics_list

    io.ensure_dir(out_dir)
    for mech in mechs:
        io.ensure_dir(os.path.join(out_dir, mech))
    with open(os.path.join(out_dir, "config.ini"), "w", encoding="utf-8") as fh:
        fh.write(config.echo())
    res.files.append(os.path.join(out_dir, "config.ini"))

    gens = {mech: iter_evolve(w0, PropagatorConfig(mech, run.dt, run.n_steps, m, pot,
                                                   run.record_every))
            for mech in mechs}
    reports = {mech: [] for mech in mechs}
    closure = {mech: [] for mech in mechs}
    n_records = -(-run.n_steps // run.record_every) + 1
    snap_every = config.output.snapshot_every

    def path(mech, name):
        p = os.path.join(out_dir, mech, name)
        res.files.append(p)
        return p

    k = 0
    with ThreadPoolExecutor(max_workers=len(mechs)) as pool:
        while True:
            futures = {mech: pool.submit(next, gens[mech], None) for mech in mechs}
            try:
                got = {mech: fut.result() for mech, fut in futures.items()}
            except NonFiniteError as exc:
                res.status = EXIT_RUNTIME
                res.error = f"non-finite Wigner values at step {exc.step}"
                log.error("run aborted: %s", res.error)
                with open(os.path.join(out_dir, "error.log"), "w", encoding="utf-8") as fh:
                    fh.write(res.error + "\n")
                res.files.append(os.path.join(out_dir, "error.log"))
                break
            if any(v is None for v in got.values()):
                break
            final = k == n_records - 1
            eig = k % run.eigen_every == 0 or final
            states = {mech: st for mech, (_, st) in got.items()}
            for mech, st in states.items():
                reports[mech].append(report(st, pot, m, eig=eig))
            if len(mechs) == 2:
                za, zb = (wigner_to_z(states[mech]) for mech in mechs)
                bands, diag = coherence_band_divergence(za, zb), diagonal_divergence(za, zb)
                for mech in mechs:
                    reports[mech][-1].band_dist = dict(bands)
                    reports[mech][-1].diag_dist = diag
            snap = k == 0 or final or (snap_every > 0 and k % snap_every == 0)
            for mech, (step, st) in got.items():
                if snap:
                    for fmt in config.output.snapshots:
                        ext = "bin" if fmt == "binary" else "csv"
                        io.write_snapshot(st, path(mech, f"F_{step:08d}.{ext}"), fmt)
                if config.output.hydro:
                    # t = 0 uses the exact initial wavefunction; later quantum states
                    # are pure, so R = sqrt(n).  Classical states have no R for t > 0.
                    if k == 0:
                        R = psi
                    elif mech == "quantum":
                        R = np.sqrt(np.clip(states[mech].f.sum(axis=1) * grid.dp, 0, None))
                    else:
                        R = None
                    if R is not None:
                        fields, row = _closure_row(st, m, R)
                        closure[mech].append(row)
                        if snap and fields is not None:
                            io.write_hydro(fields, grid, path(mech, f"hydro_{step:08d}.csv"))
            k += 1

    for mech in mechs:
        io.write_series(reports[mech], path(mech, "diagnostics.csv"))
        if config.output.hydro:
            with open(path(mech, "closure.csv"), "w", encoding="utf-8") as fh:
                fh.write("t,closure_dev,pressure_gap\n")
                for row in closure[mech]:
                    fh.write(",".join(io.fmt17(v) for v in row) + "\n")
    res.reports, res.closure = reports, closure
    return res
