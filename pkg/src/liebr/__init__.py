"""liebr: Lie-bracket phase-space dynamics and exact Gaussian propagators.

Library layout:

- :mod:`liebr.poisson` - bracket tensors, observables, axiom residuals, flows
- :mod:`liebr.models` - pendulum, charged particle, rigid body, oscillator algebra
- :mod:`liebr.semiclassical` - free / harmonic / constant-B propagation kernels
- :mod:`liebr.propertime` - relativistic constant-field kernel machinery
- :mod:`liebr.oracle` - independent brute-force verifiers (lattice chains,
  grid convolutions, PDE residuals, gradient checks)
- :mod:`liebr.cli` - ``liebr simulate | kernel | verify`` command line
"""

from .errors import (
    BlowUpError,
    CausticError,
    CoincidenceLimitError,
    ConfigError,
    DegenerateStructureError,
    DimensionMismatchError,
    LiebrError,
    SingularJacobianError,
)
from .poisson import (
    CoordinateMap,
    HamiltonianSystem,
    Observable,
    PoissonStructure,
    Trajectory,
    antisymmetry_residual,
    as_phase_point,
    bracket_eval,
    canonical_structure,
    constant_structure,
    evolve,
    hamiltonian_rhs,
    invert_structure,
    jacobi_residual,
    pushforward_structure,
)
from .models import PhysicalConstants

__version__ = "0.1.0"
