import math

import numpy as np
import pytest

from specdet.errors import InvalidPotential, NonIntegrable
from specdet.potential import EdgePotentials, PotentialProfile, evaluate, moment, validate_profile


def test_evaluate_examples():
    assert evaluate(PotentialProfile.zero(), 3.7) == 0.0
    assert evaluate(PotentialProfile.square_well(-4, 1), 0.5) == -4.0
    assert evaluate(PotentialProfile.exponential(2, 1), 1.0) == pytest.approx(0.7357588823, abs=1e-10)


def test_evaluate_rejects_negative_x():
    with pytest.raises(ValueError):
        evaluate(PotentialProfile.zero(), -1.0)


def test_tabulated_linear_inside_zero_outside():
    p = PotentialProfile.tabulated([0.0, 1.0, 2.0], [-1.0, -3.0, 0.0])
    assert evaluate(p, 0.5) == pytest.approx(-2.0)
    assert evaluate(p, 2.5) == 0.0
    assert p.scalar()(1.5) == pytest.approx(-1.5)


def test_moments_examples():
    assert moment(PotentialProfile.square_well(-4, 1), 0) == 4.0
    assert moment(PotentialProfile.zero(), 1) == 0.0
    assert moment(PotentialProfile.exponential(2, 1), 1) == pytest.approx(2.0, abs=1e-9)
    assert moment(PotentialProfile.exponential(2, 1), 0) == pytest.approx(2.0, abs=1e-9)


def test_gaussian_moment_closed_form():
    p = PotentialProfile.gaussian(-1.5, 3.0, 0.5)
    # center far from the origin: the half-line integral is the full gaussian mass
    assert moment(p, 0) == pytest.approx(1.5 * 0.5 * math.sqrt(2 * math.pi), rel=1e-9)
    assert moment(p, 1) == pytest.approx(3.0 * 1.5 * 0.5 * math.sqrt(2 * math.pi), rel=1e-8)


def test_non_integrable_tail():
    # support hint far too short for the decay rate
    p = PotentialProfile("exponential", amplitude=1.0, rate=1e-3, support_hint=1.0)
    with pytest.raises(NonIntegrable):
        moment(p, 0)


@pytest.mark.parametrize(
    "kwargs, message",
    [
        (dict(family="square_well", depth=-1, width=0.0), "width"),
        (dict(family="exponential", amplitude=1, rate=-1), "rate"),
        (dict(family="gaussian", amplitude=1, sigma=0), "sigma"),
        (dict(family="tabulated", grid_x=(0.0, 2.0, 1.0), grid_v=(1.0, 1.0, 1.0)), "grid not increasing"),
        (dict(family="square_well", depth=math.nan, width=1), "non-finite"),
        (dict(family="bogus"), "unknown"),
    ],
)
def test_invalid_profiles(kwargs, message):
    with pytest.raises(InvalidPotential, match=message):
        PotentialProfile(**kwargs)


def test_csv_loader(tmp_path):
    f = tmp_path / "v.csv"
    f.write_text("x,V\n0,-1\n1,-2\n2,0\n")
    p = PotentialProfile.from_csv(f)
    assert p.grid_x == (0.0, 1.0, 2.0)
    assert validate_profile(p) == []


def test_support_hint_defaults():
    assert PotentialProfile.square_well(-1, 2.5).support_hint == 2.5
    assert PotentialProfile.exponential(1, 2).support_hint == 20.0
    assert PotentialProfile.gaussian(1, 1, 0.5).support_hint == 6.0
    # beyond the hint the built-in families are below 1e-14 relative
    e = PotentialProfile.exponential(1, 2)
    assert abs(e(e.support_hint)) < 1e-14 * 2 + 1e-17


def test_evaluate_deterministic_and_vectorised():
    p = PotentialProfile.gaussian(2.0, 1.0, 0.3)
    xs = np.linspace(0, 3, 17)
    assert np.array_equal(p(xs), p(xs))
    assert all(p.scalar()(x) == pytest.approx(v, rel=1e-15) for x, v in zip(xs, p(xs)))


def test_edge_potentials():
    ep = EdgePotentials(PotentialProfile.zero(), PotentialProfile.square_well(-1, 1))
    assert not ep.is_zero
    assert EdgePotentials.free().is_zero
    assert ep[1].family == "square_well"
