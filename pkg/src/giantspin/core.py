"""Parameter types, physical constants and the exception hierarchy.

Energies are in Kelvin (divided by k_B) and fields in Tesla throughout the
package.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass


class GiantSpinError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(GiantSpinError, ValueError):
    """A parameter set violates the basic invariants of the model."""


class ModelDomainError(GiantSpinError, ValueError):
    """Parameters are valid in general but outside a model's domain (e.g. D <= E)."""


class UnsupportedConfigurationError(GiantSpinError):
    """The requested quantity is not defined for this configuration."""


class NumericalError(GiantSpinError, ArithmeticError):
    """A numerical routine failed."""


class ConvergenceError(NumericalError):
    def __init__(self, message: str, iterations: int):
        super().__init__(f"{message} (after {iterations} iterations)")
        self.iterations = iterations


@dataclass(frozen=True)
class PhysicalConstants:
    """Constants used for Tesla <-> Kelvin conversion.

    mu_B_over_k_B is the Bohr magneton over Boltzmann's constant in K/T,
    rounded to the four digits the Fe8 field values support.
    """

    mu_B_over_k_B: float = 0.6717


CONSTANTS = PhysicalConstants()


def _finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ParameterError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class SpinParams:
    """Giant-spin system: spin S, anisotropies D and E (K), g-factor, parallel field (T).

    Half-integer spins are accepted. ``H_par`` must be non-negative; routines that
    probe the reflected field do so on assembled coefficients, not through this
    type.
    """

    S: float
    D: float
    E: float
    g: float = 2.0
    H_par: float = 0.0

    def __post_init__(self) -> None:
        S = _finite("S", self.S)
        if S <= 0 or abs(2 * S - round(2 * S)) > 1e-12:
            raise ParameterError(f"S must be a positive integer or half-integer, got {self.S!r}")
        object.__setattr__(self, "S", round(2 * S) / 2)
        for name in ("D", "E", "H_par"):
            value = _finite(name, getattr(self, name))
            if value < 0:
                raise ParameterError(f"{name} must be non-negative, got {value!r}")
            object.__setattr__(self, name, value)
        g = _finite("g", self.g)
        if g <= 0:
            raise ParameterError(f"g must be positive, got {g!r}")
        object.__setattr__(self, "g", g)

    @property
    def dim(self) -> int:
        """Multiplet size 2S+1."""
        return int(round(2 * self.S)) + 1

    @property
    def is_integer_spin(self) -> bool:
        return (self.dim - 1) % 2 == 0

    @property
    def spin_square(self) -> float:
        """S(S+1)."""
        return self.S * (self.S + 1)

    def with_field(self, H_par: float) -> SpinParams:
        return dataclasses.replace(self, H_par=H_par)

    def require_angle_domain(self) -> None:
        """Raise ModelDomainError unless D > E (positive inverse mass at phi=0)."""
        if not self.D > self.E:
            raise ModelDomainError(
                f"angle representation requires D > E, got D={self.D}, E={self.E}"
            )


FE8 = SpinParams(S=10, D=0.275, E=0.046)


def zeeman_energy(params: SpinParams, constants: PhysicalConstants = CONSTANTS) -> float:
    """Coefficient A = g mu_B H_par of J_z, in Kelvin."""
    return params.g * constants.mu_B_over_k_B * params.H_par


def field_from_energy(
    A: float, g: float = 2.0, constants: PhysicalConstants = CONSTANTS
) -> float:
    """Inverse of :func:`zeeman_energy`: field in Tesla giving Zeeman coefficient A."""
    return A / (g * constants.mu_B_over_k_B)
