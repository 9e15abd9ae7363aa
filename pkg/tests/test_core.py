import dataclasses
import math

import pytest
from hypothesis import given, strategies as st

from giantspin.core import (
    CONSTANTS,
    FE8,
    ModelDomainError,
    ParameterError,
    PhysicalConstants,
    SpinParams,
    field_from_energy,
    zeeman_energy,
)


def test_zeeman_energy_examples():
    assert zeeman_energy(SpinParams(10, 0.275, 0.046, g=2, H_par=0)) == 0.0
    assert zeeman_energy(SpinParams(10, 0.275, 0.046, g=2, H_par=1.0)) == pytest.approx(1.3434, abs=1e-12)
    assert zeeman_energy(SpinParams(10, 0.275, 0.046, g=2, H_par=0.216)) == pytest.approx(0.29018, abs=1e-4)


@given(st.just(0.0) | st.floats(1e-6, 50), st.floats(0.1, 5))
def test_zeeman_energy_linear(H, g):
    a = zeeman_energy(SpinParams(10, 0.275, 0.046, g=g, H_par=H))
    b = zeeman_energy(SpinParams(10, 0.275, 0.046, g=g, H_par=2 * H))
    assert b == pytest.approx(2 * a, rel=1e-15, abs=0)


@given(st.floats(-10, 10))
def test_field_from_energy_inverts_zeeman(A):
    H = field_from_energy(abs(A))
    assert zeeman_energy(FE8.with_field(H)) == pytest.approx(abs(A), rel=1e-14, abs=1e-300)


def test_constant_is_fixed_and_immutable():
    assert CONSTANTS.mu_B_over_k_B == 0.6717
    with pytest.raises(dataclasses.FrozenInstanceError):
        CONSTANTS.mu_B_over_k_B = 1.0  # type: ignore[misc]
    assert PhysicalConstants() == CONSTANTS


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(S=0, D=0.275, E=0.046),
        dict(S=-1, D=0.275, E=0.046),
        dict(S=1.3, D=0.275, E=0.046),
        dict(S=10, D=-0.1, E=0.046),
        dict(S=10, D=0.275, E=-0.046),
        dict(S=10, D=0.275, E=0.046, g=0),
        dict(S=10, D=0.275, E=0.046, H_par=-0.1),
        dict(S=10, D=math.nan, E=0.046),
        dict(S=10, D=0.275, E=math.inf),
    ],
)
def test_invalid_params_rejected(kwargs):
    with pytest.raises(ParameterError):
        SpinParams(**kwargs)


def test_parameter_error_is_value_error():
    assert issubclass(ParameterError, ValueError)


def test_half_integer_spin_accepted():
    p = SpinParams(S=2.5, D=0.3, E=0.05)
    assert p.dim == 6
    assert not p.is_integer_spin
    assert FE8.is_integer_spin and FE8.dim == 21
    assert FE8.spin_square == 110


def test_angle_domain_requires_d_above_e():
    FE8.require_angle_domain()
    for D, E in ((0.046, 0.046), (0.0, 0.046)):
        with pytest.raises(ModelDomainError):
            SpinParams(10, D, E).require_angle_domain()


def test_with_field_validates():
    assert FE8.with_field(0.5).H_par == 0.5
    with pytest.raises(ParameterError):
        FE8.with_field(-0.5)
