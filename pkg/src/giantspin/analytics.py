"""Closed-form barrier, harmonic-approximation and resonance-field results.

All formulas are implemented with S(S+1) where the model has S(S+1) and S^2
only in the crude variants. Outputs are Kelvin for energies, Tesla for fields.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import CONSTANTS, ModelDomainError, SpinParams, UnsupportedConfigurationError

EXPERIMENTAL_BARRIER_K = 22.2
EXPERIMENTAL_H0_T = 0.22


def percent_deviation(value: float, base: float) -> float:
    """100 * |value - base| / |base|."""
    return 100.0 * abs(value - base) / abs(base)


def barrier_top(params: SpinParams) -> float:
    """Zero-field potential maximum V(pi/2) = -E S(S+1)."""
    if params.H_par != 0:
        raise UnsupportedConfigurationError(
            "closed-form barrier top holds at zero field only; evaluate the potential at its maximum"
        )
    return -params.E * params.spin_square


def potential_minimum(params: SpinParams) -> float:
    """V(0) = -D S(S+1) at zero field."""
    return -params.D * params.spin_square


def barrier_height_numeric(params: SpinParams, E_gs: float) -> float:
    """h_b = -E S(S+1) - E_gs."""
    return -params.E * params.spin_square - E_gs


def harmonic_frequency(params: SpinParams, E_gs_abs: float) -> float:
    """omega = 2 sqrt((D-E) (E S(S+1) + |E_gs|)), harmonic at phi = 0."""
    radicand = (params.D - params.E) * (params.E * params.spin_square + E_gs_abs)
    if radicand < 0:
        raise ModelDomainError(f"harmonic frequency radicand is negative ({radicand})")
    return 2.0 * math.sqrt(radicand)


def _harmonic_bracket(params: SpinParams) -> float:
    dE = params.D - params.E
    ratio = (params.D + params.E) / dE
    return 0.5 * dE * (1.0 - math.sqrt(1.0 + 4.0 * ratio * params.spin_square))


def harmonic_ground_state(params: SpinParams) -> tuple[float, float]:
    """(|E_gs|, h_b) from the self-consistent harmonic approximation.

    |E_gs| solves |E| = D S(S+1) - omega(|E|)/2 exactly.
    """
    if not params.D > params.E:
        raise ModelDomainError(f"harmonic approximation requires D > E, got D={params.D}, E={params.E}")
    bracket = _harmonic_bracket(params)
    ss = params.spin_square
    return params.D * ss + bracket, (params.D - params.E) * ss + bracket


def crude_ground_state(params: SpinParams) -> tuple[float, float]:
    """(|E_gs|, h_b) with (D+E)/(D-E) ~ 1: (D S^2 + E S, (D-E) S^2)."""
    S = params.S
    return params.D * S * S + params.E * S, (params.D - params.E) * S * S


def minima_offset(params: SpinParams) -> float:
    """V(pi) - V(0) = 2 sqrt(S(S+1)) g muB H."""
    return 2.0 * math.sqrt(params.spin_square) * params.g * CONSTANTS.mu_B_over_k_B * params.H_par


def _require_cutoff_domain(params: SpinParams) -> None:
    if params.E <= 0 or not params.D > params.E:
        raise ModelDomainError(
            f"no finite cutoff field unless D > E > 0 (D={params.D}, E={params.E})"
        )


def field_cutoff(params: SpinParams) -> float:
    """Field at which the inverse mass first touches zero, in Tesla."""
    _require_cutoff_domain(params)
    return 4.0 * params.S / (params.g * CONSTANTS.mu_B_over_k_B) * math.sqrt(
        2.0 * params.E * (params.D - params.E)
    )


def resonance_increment(params: SpinParams) -> float:
    """H0 = cutoff / (2S), the spacing of level-matching fields."""
    return field_cutoff(params) / (2.0 * params.S)


def resonance_increment_direct(params: SpinParams) -> float:
    """H0 = (2 / (g muB)) sqrt(2E(D-E)); S-independent form."""
    _require_cutoff_domain(params)
    return 2.0 / (params.g * CONSTANTS.mu_B_over_k_B) * math.sqrt(2.0 * params.E * (params.D - params.E))


def merge_field(params: SpinParams) -> float:
    """Field above which phi = pi stops being a potential minimum."""
    if not params.D > params.E:
        raise ModelDomainError("merge field requires D > E")
    return 2.0 * (params.D - params.E) * math.sqrt(params.spin_square) / (
        params.g * CONSTANTS.mu_B_over_k_B
    )


@dataclass(frozen=True)
class BarrierReport:
    """Barrier and ground-state variants side by side (Kelvin).

    Ground-state magnitudes from the closed forms are stored as signed energies
    (negative) in ``E_gs_harmonic``/``E_gs_crude``.
    """

    V_max: float
    E_min: float
    E_gs_numeric: float
    h_b_numeric: float
    E_gs_harmonic: float
    h_b_harmonic: float
    E_gs_crude: float
    h_b_crude: float
    omega: float
    E_gs_reference: float | None = None
    h_b_experimental: float = EXPERIMENTAL_BARRIER_K

    def deviations(self) -> dict[str, tuple[float, str]]:
        """Percent deviations with their base, keyed by quantity."""
        out = {
            "h_b_numeric": (percent_deviation(self.h_b_numeric, self.h_b_experimental), "experimental"),
            "h_b_harmonic": (percent_deviation(self.h_b_harmonic, self.h_b_experimental), "experimental"),
            "h_b_crude": (percent_deviation(self.h_b_crude, self.h_b_experimental), "experimental"),
        }
        if self.E_gs_reference is not None:
            for key in ("E_gs_numeric", "E_gs_harmonic", "E_gs_crude"):
                out[key] = (percent_deviation(getattr(self, key), self.E_gs_reference), "reference")
        return out


def barrier_report(
    params: SpinParams, E_gs_numeric: float, E_gs_reference: float | None = None
) -> BarrierReport:
    """Assemble every barrier variant for a zero-field parameter set.

    ``E_gs_numeric`` is the angle-model ground state; ``E_gs_reference`` the
    exact giant-spin one, used as base for ground-state deviations.
    """
    V_max = barrier_top(params)
    E_min = potential_minimum(params)
    if not E_min <= E_gs_numeric <= V_max:
        raise ModelDomainError(
            f"ground state {E_gs_numeric} K outside [{E_min}, {V_max}]: no bound state below the barrier"
        )
    Eh, hh = harmonic_ground_state(params)
    Ec, hc = crude_ground_state(params)
    return BarrierReport(
        V_max=V_max,
        E_min=E_min,
        E_gs_numeric=E_gs_numeric,
        h_b_numeric=barrier_height_numeric(params, E_gs_numeric),
        E_gs_harmonic=-Eh,
        h_b_harmonic=hh,
        E_gs_crude=-Ec,
        h_b_crude=hc,
        omega=harmonic_frequency(params, Eh),
        E_gs_reference=E_gs_reference,
    )
