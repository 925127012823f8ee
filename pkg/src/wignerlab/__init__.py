"""Classical and quantum Wigner-function dynamics on a shared phase-space grid."""
from .grid import GridError, PhaseSpaceGrid, build_phase_space_grid, frequency_grid
from .potential import (Potential, PotentialError, classical_kick_phase, kick_phase,
                        make_potential, quantum_kick_phase)
from .state import (DensityMatrix, HermiticityError, PureState, StateError, WignerState,
                    ZMatrix, assemble_density_matrix, gaussian_wavepacket, gaussian_wigner,
                    normalize, pure_to_wigner, pure_to_z, wigner_to_z, z_to_wigner)
from .propagator import (NonFiniteError, PropagatorConfig, Trajectory, characteristics_oracle,
                         evolve, iter_evolve, kick_full_step, stream_half_step, strang_step)
from .diagnostics import (DivergenceReport, coherence_band_divergence, diagonal_divergence,
                          energy, min_eigenvalue, purity, report)
from .hydrodynamics import (HydroError, HydroFields, closure_deviation, compute_I, compute_Q,
                            compute_W, continuity_residual, hydro_fields, moments,
                            motion_residual)
from .config import ConfigError, ExperimentConfig, load_config, parse_config
from .experiment import run_experiment

__version__ = "0.1.0"
