import math

import numpy as np
import pytest

from specdet.interaction import preset
from specdet.potential import EdgePotentials, PotentialProfile
from specdet.resolvent import discretize, richardson
from specdet.scattering import jost
from specdet.spectrum import (
    find_eigenvalues,
    levinson_check,
    phase_conjugate,
    phase_shift,
    spectral_shift,
    tune_resonance,
    unperturbed_eigenvalues,
    winding_number,
)

WELL_K = (EdgePotentials(PotentialProfile.square_well(-4, 1), PotentialProfile.zero()), preset("kirchhoff"))


def test_free_kirchhoff_has_no_zeros():
    assert find_eigenvalues(EdgePotentials.free(), preset("kirchhoff")) == []


def test_free_delta_pole_not_zero():
    m = preset("delta", -2)
    assert find_eigenvalues(EdgePotentials.free(), m) == []
    shared = find_eigenvalues(EdgePotentials.free(), m, include_cancelled=True)
    assert len(shared) == 1 and shared[0].cancelled and shared[0].kappa == pytest.approx(1.0)
    assert [e.kappa for e in unperturbed_eigenvalues(m)] == pytest.approx([1.0])
    ev = discretize(EdgePotentials.free(), m, 0.01, 30.0).eigenvalues(upper=0.0)
    assert ev[0] == pytest.approx(-1.0, abs=1e-3)


def test_well_eigenvalue_against_oracle():
    ev = find_eigenvalues(*WELL_K)
    assert len(ev) == 1
    assert ev[0].abs_D < 1e-9
    lad = [discretize(*WELL_K, h, 30.0).eigenvalues(upper=0.0) for h in (0.02, 0.01)]
    assert all(x.size == 1 for x in lad)
    oracle = richardson([x[0] for x in lad])
    assert abs(ev[0].energy - oracle) < 1e-4 * abs(oracle)


def test_kappa_max_escalation():
    pots = EdgePotentials(PotentialProfile.square_well(-30, 0.3), PotentialProfile.zero())
    ev = find_eigenvalues(pots, preset("kirchhoff"))
    small = find_eigenvalues(pots, preset("kirchhoff"), kappa_max=1.0)
    assert len(ev) >= 1 and len(small) <= len(ev)


def test_free_phase_is_zero():
    c = phase_shift(EdgePotentials.free(), preset("delta", 1.0), np.linspace(0.1, 5, 20))
    assert np.all(c.eta == 0)


def test_phase_antisymmetry():
    pots = EdgePotentials(PotentialProfile.square_well(-2, 1), PotentialProfile.exponential(0.5, 1))
    m = preset("delta_prime", 1.0)
    ks = [0.3, 1.1, 4.0]
    curve = phase_shift(pots, m, ks, normalize=False)
    wrapped = np.angle(np.exp(1j * curve.eta))
    assert np.allclose(phase_conjugate(pots, m, ks), -wrapped, atol=1e-12)


def test_unwrap_contract():
    c = phase_shift(*WELL_K)
    assert np.all(np.abs(np.diff(c.eta)) < math.pi / 2)
    assert c.eta_inf == 0.0


def test_spectral_shift_examples():
    assert np.all(spectral_shift(EdgePotentials.free(), preset("kirchhoff"), [-3, -1, 0.5, 2]) == 0)
    ev = find_eigenvalues(*WELL_K)
    xi = spectral_shift(*WELL_K, [-10.0, -5.0, -1.0, -0.1], eigen=ev)
    assert xi[0] == 0
    e = ev[0].energy
    assert list(xi) == [0, -1 if -5.0 >= e else 0, -1, -1]


def test_spectral_shift_negative_axis_counts_poles():
    m = preset("delta", -2)
    pots = EdgePotentials(PotentialProfile.square_well(-1, 1), PotentialProfile.zero())
    ev = find_eigenvalues(pots, m, include_cancelled=True)
    lams = np.linspace(-8, -0.05, 200)
    xi = spectral_shift(pots, m, lams, eigen=ev)
    assert set(np.unique(xi)) <= {-1.0, 0.0, 1.0}
    jumps = lams[1:][np.diff(xi) != 0]
    expected = sorted([e.energy for e in ev] + [-1.0])
    assert len(jumps) <= len(expected)
    for j in jumps:
        assert min(abs(j - x) for x in expected) < 0.05


def test_winding_free_and_well():
    assert winding_number(EdgePotentials.free(), preset("kirchhoff"), R=5, eps_radius=0.01).value == 0
    assert winding_number(*WELL_K).value == 1


def test_resonance_tuning():
    p = tune_resonance()
    assert abs(jost(p, 0.0).w) < 1e-8
    assert p.depth == pytest.approx(-(math.pi / 2) ** 2, rel=1e-9)


def test_levinson_free_cases():
    r = levinson_check(EdgePotentials.free(), preset("kirchhoff"))
    assert (r.N, r.constants.P, r.constants.Q) == (0, 1, 1)
    assert r.residual < 1e-10
    r = levinson_check(EdgePotentials.free(), preset("delta", 2))
    assert (r.N, r.constants.P, r.constants.Q, r.levinson_lhs) == (0, 0, 0, 0)


def test_gauge_invariance_of_report():
    pots, m = WELL_K
    a = levinson_check(pots, m, with_winding=False).to_dict()
    b = levinson_check(pots, m.with_phi(0.8), with_winding=False).to_dict()
    assert a == b


def test_boundary_marks_indeterminate():
    # resonance barely missed: w1(0) sits in the warning band
    p = tune_resonance()
    near = PotentialProfile.square_well(p.depth * (1 + 1e-7), 1.0)
    r = levinson_check(EdgePotentials(near, PotentialProfile.zero()), preset("kirchhoff"), with_winding=False)
    assert r.indeterminate
    from specdet.errors import ResonanceBoundary

    with pytest.raises(ResonanceBoundary):
        levinson_check(EdgePotentials(near, PotentialProfile.zero()), preset("kirchhoff"), strict=True)
