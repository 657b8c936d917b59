"""Steady-state photon statistics of a driven pair of coupled optomechanical cavities."""

__version__ = "0.1.0"

from .errors import (ConfigError, NonConvergenceError, OptoUPBError, PoleError,
                     ResourceLimitError, SingularSystemError, UndefinedCorrelationError)
from .fock import FockBasis, build_basis, mode_operators
from .liouvillian import (SuperOperator, SystemParams, build_hamiltonian, build_liouvillian,
                          delta_opt, thermal_occupation, with_optimal_detuning)
from .observables import compute_observables, g2_zero, g2_zero_phonon, occupations
from .steady import SolveOptions, SteadyState, converge_cutoffs, solve_steady_state, steady_state
from .weakpump import (c_perturbative, g2_weak_pump, optimal_conditions_limit,
                       solve_weak_pump)

__all__ = [
    "ConfigError", "FockBasis", "NonConvergenceError", "OptoUPBError", "PoleError",
    "ResourceLimitError", "SingularSystemError", "SolveOptions", "SteadyState",
    "SuperOperator", "SystemParams", "UndefinedCorrelationError", "build_basis",
    "build_hamiltonian", "build_liouvillian", "c_perturbative", "compute_observables",
    "converge_cutoffs", "delta_opt", "g2_weak_pump", "g2_zero", "g2_zero_phonon",
    "mode_operators", "occupations", "optimal_conditions_limit", "solve_steady_state", "solve_weak_pump",
    "steady_state", "thermal_occupation", "with_optimal_detuning",
]
