"""Boundary-driven XXZ/XXX spin chains under the Lindblad equation.

Symbolic Pauli algebra, Hamiltonians and boundary baths, steady-state
solvers, current observables, bath-inversion symmetries and uniqueness
witnesses.
"""

from .chain import ChainKind, ChainSpec, build_hamiltonian
from .config import Experiment, RunConfig, parse_config, serialize_config
from .currents import (
    CurrentProfile, current_profile, energy_current_op, expectation, spin_current_op,
)
from .driving import (
    DrivingCase, DrivingConfig, LindbladSet, Orientation, build_lindblad_set, invert_baths,
)
from .errors import (
    CapacityError, ConfigError, ConvergenceError, DimensionError, LindbladiumError,
    ReductionError, SpecificationError,
)
from .liouvillian import (
    SolverMode, Superoperator, SteadyStateResult, assemble, steady_state, validate_state,
)
from .pauli import OperatorSum, PauliString, anticommutator, commutator, to_dense
from .runner import RunReport, run
from .symmetry import MappingReport, build_A, conjugate, verify_mapping
from .uniqueness import (
    ClosureReport, algebra_closure, null_space_dimension, reduce_boundary_generators,
    uniqueness_witnesses, verify_ladder_recursion,
)

__version__ = "0.1.0"

__all__ = [
    "ChainKind", "ChainSpec", "build_hamiltonian",
    "Experiment", "RunConfig", "parse_config", "serialize_config",
    "CurrentProfile", "current_profile", "energy_current_op", "expectation", "spin_current_op",
    "DrivingCase", "DrivingConfig", "LindbladSet", "Orientation", "build_lindblad_set",
    "invert_baths",
    "CapacityError", "ConfigError", "ConvergenceError", "DimensionError", "LindbladiumError",
    "ReductionError", "SpecificationError",
    "SolverMode", "Superoperator", "SteadyStateResult", "assemble", "steady_state",
    "validate_state",
    "OperatorSum", "PauliString", "anticommutator", "commutator", "to_dense",
    "RunReport", "run",
    "MappingReport", "build_A", "conjugate", "verify_mapping",
    "ClosureReport", "algebra_closure", "null_space_dimension", "reduce_boundary_generators",
    "uniqueness_witnesses", "verify_ladder_recursion",
]
