"""Spin tunneling in molecular nanomagnets.

Exact diagonalization of the giant-spin Hamiltonian and the angle-representation
Hamiltonian with a position-dependent effective mass, plus closed-form barrier
and resonance-field analytics. Energies in Kelvin, fields in Tesla.
"""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    CONSTANTS,
    FE8,
    ConvergenceError,
    GiantSpinError,
    ModelDomainError,
    NumericalError,
    ParameterError,
    PhysicalConstants,
    SpinParams,
    UnsupportedConfigurationError,
    zeeman_energy,
)
from .linalg import Spectrum, SymMatrix, eigh  # noqa: E402
from .giant_spin import build_giant_spin, reference_spectrum, reference_splitting  # noqa: E402
from .angle_model import angle_splitting, assemble, inverse_mass, potential, solve  # noqa: E402
