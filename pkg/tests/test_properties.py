"""Property-based checks over randomly drawn potentials, interactions and wavenumbers."""

import cmath
import math

import numpy as np
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from specdet.determinant import denominator, det_at, det_value, numerator, trace_formula_rhs
from specdet.errors import AtUnperturbedPole
from specdet.interaction import InteractionMatrix, pole_class
from specdet.potential import EdgePotentials, PotentialProfile, moment
from specdet.resolvent import _rank_two_trace_norm, discretize
from specdet.scattering import jost, jost_pair

SETTINGS = settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])

amp = st.floats(-5, 5).filter(lambda v: abs(v) > 1e-3)


@st.composite
def profiles(draw):
    kind = draw(st.sampled_from(["zero", "square_well", "exponential", "gaussian"]))
    if kind == "zero":
        return PotentialProfile.zero()
    if kind == "square_well":
        return PotentialProfile.square_well(draw(amp), draw(st.floats(0.2, 2.0)))
    if kind == "exponential":
        return PotentialProfile.exponential(draw(amp), draw(st.floats(0.5, 3.0)))
    return PotentialProfile.gaussian(draw(amp), draw(st.floats(0.0, 2.0)), draw(st.floats(0.2, 1.0)))


@st.composite
def interactions(draw):
    phi = draw(st.floats(-math.pi / 2, math.pi / 2))
    a = draw(st.floats(-3, 3).filter(lambda v: abs(v) > 0.1))
    b = draw(st.floats(-3, 3))
    c = draw(st.floats(-3, 3))
    # solve ad - bc = -1 for d
    return InteractionMatrix(phi, a, b, c, (b * c - 1.0) / a)


zetas = st.builds(complex, st.floats(-3, 3), st.floats(0.2, 4))


@SETTINGS
@given(profiles(), st.integers(0, 1))
def test_moments_nonnegative(p, order):
    assert moment(p, order) >= 0


@SETTINGS
@given(interactions())
def test_interaction_constraint_and_class(m):
    assert abs(m.a * m.d - m.b * m.c + 1) <= 1e-12
    assert pole_class(m) in (0, 1)


@SETTINGS
@given(zetas)
def test_free_jost_identity(z):
    j = jost(PotentialProfile.zero(), z)
    assert abs(j.w - 1) < 1e-12 and abs(j.wp - 1j * z) < 1e-12
    assert abs(j.wdot) < 1e-12 and abs(j.wpdot - 1j) < 1e-12


@SETTINGS
@given(interactions(), zetas)
def test_free_determinant_is_one(m, z):
    assume(abs(denominator(m, z)) > 1e-6)
    assert abs(det_at(EdgePotentials.free(), m, z).value - 1) < 1e-12


@SETTINGS
@given(profiles(), profiles(), interactions(), zetas, st.floats(-math.pi / 2, math.pi / 2))
def test_phi_never_enters_D(p1, p2, m, z, phi):
    pots = EdgePotentials(p1, p2)
    try:
        a = det_at(pots, m, z).value
    except AtUnperturbedPole:
        return
    assert det_at(pots, m.with_phi(phi), z).value == a


@SETTINGS
@given(profiles(), profiles(), interactions(), st.floats(0.1, 10))
def test_D_real_on_imaginary_axis(p1, p2, m, kappa):
    pots = EdgePotentials(p1, p2)
    try:
        v = det_at(pots, m, 1j * kappa).value
    except AtUnperturbedPole:
        return
    assume(abs(v) < 1e6)
    assert abs(v.imag) < 1e-9 * max(1, abs(v))


@SETTINGS
@given(profiles(), profiles(), interactions(), st.floats(0.5, 4))
def test_trace_rhs_denominator_forms_agree(p1, p2, m, kappa):
    pots = EdgePotentials(p1, p2)
    z = 1j * kappa
    j1, j2 = jost_pair(pots, z)
    assume(abs(j1.w) > 1e-3 and abs(j2.w) > 1e-3 and abs(denominator(m, z)) > 1e-3)
    assume(abs(numerator(j1, j2, m)) > 1e-3)
    a = trace_formula_rhs(pots, m, z)
    b = trace_formula_rhs(pots, m, z, denominator_form="determinant")
    assert abs(a - b) <= 1e-12 * max(1, abs(a))


@SETTINGS
@given(profiles(), zetas, st.floats(0.0, 3.0))
def test_wronskian_constant(p, z, x):
    from specdet.scattering import wronskian_check

    w = jost(p, z).w
    assume(abs(w) > 1e-6)
    assert abs(wronskian_check(p, z, x) - w) < 1e-8 * max(1, abs(w))


@SETTINGS
@given(st.lists(st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False), min_size=5, max_size=5),
       st.lists(st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False), min_size=5, max_size=5))
def test_rank_two_trace_norm(f, g):
    f, g = np.array(f), np.array(g)
    a = np.outer(f, f.conj()) - np.outer(g, g.conj())
    ref = np.sum(np.linalg.svd(a, compute_uv=False))
    assert abs(_rank_two_trace_norm(f, g) - ref) < 1e-8 * max(1, ref)


@settings(max_examples=10, deadline=None)
@given(interactions(), st.floats(-math.pi / 2, math.pi / 2))
def test_oracle_gauge_invariance(m, phi):
    pots = EdgePotentials(PotentialProfile.square_well(-2, 1), PotentialProfile.zero())
    a = np.linalg.eigvalsh(discretize(pots, m.with_phi(0.0), 0.05, 10.0).matrix)
    b = np.linalg.eigvalsh(discretize(pots, m.with_phi(phi), 0.05, 10.0).matrix)
    assert np.max(np.abs(a - b)) < 1e-10 * max(1, np.max(np.abs(a)))
