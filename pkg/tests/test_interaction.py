import math

import pytest

from specdet.errors import InvalidInteraction, SingularPreset
from specdet.interaction import (
    InteractionMatrix,
    in_warning_band,
    parameter_warnings,
    pole_class,
    preset,
    unperturbed_poles,
)


def params(m):
    return (m.phi, m.a, m.b, m.c, m.d)


def test_preset_examples():
    assert params(preset("delta", -2)) == (0, 1, 0, -2, -1)
    assert params(preset("delta_prime", 3)) == (0, -1, 3, 0, 1)
    assert params(preset("delta_delta1", 0, 0)) == params(preset("kirchhoff"))
    assert params(preset("kirchhoff")) == params(preset("delta", 0))
    assert params(preset("density", 0.5)) == (0, 1, -0.5, 0, -1)


@pytest.mark.parametrize("s2", [2.0, -2.0])
def test_delta_delta1_singular(s2):
    with pytest.raises(SingularPreset, match="singular preset"):
        preset("delta_delta1", 1.0, s2)


def test_unknown_preset_and_arity():
    with pytest.raises(InvalidInteraction):
        preset("nope")
    with pytest.raises(InvalidInteraction):
        preset("delta")


def test_determinant_constraint():
    with pytest.raises(InvalidInteraction, match="determinant-constraint violated"):
        InteractionMatrix(0, 1, 0.5, 0, 0.5)
    with pytest.raises(InvalidInteraction):
        InteractionMatrix(2.0, 1, 0, 0, -1)  # phi outside [-pi/2, pi/2]
    with pytest.raises(InvalidInteraction):
        InteractionMatrix(0, math.inf, 0, 0, -1)


def test_pole_class_table():
    assert pole_class(preset("kirchhoff")) == 1
    assert pole_class(preset("delta", -2)) == 0
    # delta' has c = 0 and a - d = -2, so the middle row of the table applies
    assert pole_class(preset("delta_prime", 3)) == 1
    assert pole_class(InteractionMatrix(0, 1, 1, 2, 1)) == 0
    assert pole_class(InteractionMatrix(0, 2, 3, 0, -0.5)) == 1


def test_pole_class_two_is_unreachable():
    # c = 0 forces ad = -1, which rules out a = d for real entries
    for a in (-3.0, -1.0, 0.5, 2.0):
        m = InteractionMatrix(0, a, 1.0, 0.0, -1.0 / a)
        assert pole_class(m) == 1


def test_warning_band():
    m = InteractionMatrix(0, 1, 0, 1e-8, -1)
    assert in_warning_band(m.c)
    assert parameter_warnings(m)
    assert not parameter_warnings(preset("delta", -2))


def test_unperturbed_poles():
    assert unperturbed_poles(preset("delta", -2)) == pytest.approx([1.0])
    assert unperturbed_poles(preset("delta", 2)) == []
    assert unperturbed_poles(preset("kirchhoff")) == []
    # density: b k^2 - 2k = 0 with b = -sigma -> k = -2/sigma
    assert unperturbed_poles(preset("density", -1.0)) == pytest.approx([2.0])
    assert unperturbed_poles(preset("delta_prime", 1.0)) == []
