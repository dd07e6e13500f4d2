"""Spontaneous emission and driven transfer in small dipole-coupled atom chains.

All rates are in units of the single-atom decay rate; times in its inverse.
"""

from .coupling import (AtomGeometry, CouplingMatrix, coupling_matrix,
                       dipole_pattern, xi_coefficient)
from .dynamics import (EmissionEvent, StateTrace, TrajectoryEnsemble, evolve,
                       fit_decay_rate, populations, sample_trajectories)
from .emission import (AngularDistribution, AngularGrid, DrivenAnsatz,
                       angular_distribution_numeric, driven_matrix_element,
                       jump_operator, phi_b_analytic, phi_c_analytic,
                       phi_omega_analytic, phi_omega_numeric_vs_exact,
                       three_atom_projection, total_emission_probability)
from .hamiltonian import (CollectiveBasis, DriveField, DriveSpec, EffectiveHamiltonian,
                          ThreeAtomSpectrum, collective_basis_three, collective_basis_two,
                          dark_state_three, dark_state_two, drive_hamiltonian,
                          raman_effective_coupling, system_hamiltonian,
                          three_atom_prep_coupling, three_atom_stirap_couplings,
                          two_atom_collective_drive)
from .pulses import (GaussianPulse, PulseTrain, StirapSchedule, adiabaticity_margin,
                     evaluate, make_fig_schedule)
from .scenarios import (RunReport, ScenarioConfig, builtin_config, list_builtins,
                        run_scenario, validate_config)

__version__ = "0.1.0"
