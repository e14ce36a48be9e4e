import cmath
import math

import numpy as np
import pytest
from oracles import free_dirichlet_kernel, rank_two_trace_norm_svd, square_well_jost

from specdet.determinant import trace_formula_rhs
from specdet.interaction import InteractionMatrix, preset
from specdet.potential import EdgePotentials, PotentialProfile
from specdet.resolvent import (
    _rank_two_trace_norm,
    dirichlet_kernel,
    discretize,
    free_kernel_correction,
    krein_lambdas,
    load_dump,
    resolvent_kernel,
    richardson,
    trace_difference,
    trace_norm_decay,
)
from specdet.scattering import jost_pair

WELL_K = (EdgePotentials(PotentialProfile.square_well(-4, 1), PotentialProfile.zero()), preset("kirchhoff"))


def test_krein_free_kirchhoff():
    j1, j2 = jost_pair(EdgePotentials.free(), 1j)
    lam = krein_lambdas(j1, j2, preset("kirchhoff"))
    for v in (lam.lambda11, lam.lambda12, lam.lambda21, lam.lambda22):
        assert v == pytest.approx(0.5, abs=1e-14)


@pytest.mark.parametrize("kappa", [0.3, 1.7])
def test_krein_free_delta(kappa):
    alpha = 0.6
    j1, j2 = jost_pair(EdgePotentials.free(), 1j * kappa)
    lam = krein_lambdas(j1, j2, preset("delta", alpha))
    z = 1j * kappa
    assert lam.lambda11 == pytest.approx(-1 / (2j * z - alpha), rel=1e-13)


@pytest.mark.parametrize("phi", [0.0, 0.4, -1.1])
def test_krein_ratio(phi):
    m = InteractionMatrix(phi, 2.0, 1.0, 1.0, 0.0)
    pots = EdgePotentials(PotentialProfile.square_well(-2, 1), PotentialProfile.exponential(1, 1))
    lam = krein_lambdas(*jost_pair(pots, 0.8j + 0.3), m)
    # -(ad - bc) exp(2 i phi); equal entries at phi = 0
    assert lam.lambda12 / lam.lambda21 == pytest.approx(cmath.exp(2j * phi), rel=1e-10)


def test_krein_edge_swap_symmetry():
    p = PotentialProfile.square_well(-1.5, 0.8)
    lam = krein_lambdas(*jost_pair(EdgePotentials(p, p), 1.3j), preset("kirchhoff"))
    assert lam.lambda11 == pytest.approx(lam.lambda22, rel=1e-13)
    assert lam.lambda12 == pytest.approx(lam.lambda21, rel=1e-13)


def test_free_kernel_example():
    v = resolvent_kernel(EdgePotentials.free(), preset("kirchhoff"), 1j, 1.0, 1.0, (1, 1))
    assert v == pytest.approx(math.exp(-1) * math.sinh(1) + math.exp(-2) / 2, rel=1e-10)


@pytest.mark.parametrize("zeta", [0.7j, 1.5j, 0.4 + 1.1j])
def test_krein_identity_square_well(zeta):
    """Correction term against closed-form Jost data; points beyond the well."""
    pots, m = WELL_K
    rng = np.random.default_rng(7)
    w1, wp1 = square_well_jost(-4, 1, zeta)
    w2, wp2 = 1.0, 1j * zeta
    L = wp1 / w1 - (-1) * wp2 / w2
    lam = {(1, 1): -1 / (L * w1 * w1), (1, 2): -1 / (L * w1 * w2), (2, 1): -1 / (L * w1 * w2), (2, 2): -1 / (L * w2 * w2)}
    for _ in range(6):
        x, y = rng.uniform(1.0, 4.0, size=2)
        for edges in lam:
            k = resolvent_kernel(pots, m, zeta, x, y, edges)
            if edges[0] == edges[1]:
                k -= dirichlet_kernel(pots[edges[0] - 1], zeta, x, y)
            expected = lam[edges] * cmath.exp(1j * zeta * (x + y))
            assert abs(k - expected) < 1e-10 * max(1, abs(expected))


def test_free_kernel_correction_and_dirichlet():
    m = preset("delta_prime", 0.8)
    z = 1.2j
    for x, y in [(0.3, 1.1), (2.0, 0.5)]:
        for edges in [(1, 1), (1, 2), (2, 1), (2, 2)]:
            k = resolvent_kernel(EdgePotentials.free(), m, z, x, y, edges)
            if edges[0] == edges[1]:
                k -= free_dirichlet_kernel(z, x, y)
            assert k == pytest.approx(free_kernel_correction(m, z, x, y, edges), rel=1e-10)


def test_kernel_hermitian_with_phase():
    m = preset("delta", -0.5, phi=0.7)
    pots = EdgePotentials(PotentialProfile.square_well(-1, 1), PotentialProfile.exponential(0.5, 1))
    a = resolvent_kernel(pots, m, 1.3j, 0.4, 1.6, (1, 2))
    b = resolvent_kernel(pots, m, 1.3j, 1.6, 0.4, (2, 1))
    assert a == pytest.approx(b.conjugate(), rel=1e-10)


@pytest.mark.parametrize(
    "m", [preset("delta", -0.5, phi=0.7), preset("delta_prime", 1.0), InteractionMatrix(0.3, 2.0, 1.0, 1.0, 0.0)]
)
def test_kernel_against_discretization(m):
    pots = EdgePotentials(PotentialProfile.square_well(-1, 1), PotentialProfile.exponential(0.5, 1))
    op = discretize(pots, m, 0.005, 20.0)
    z = 1.5j
    for (j, x), (l, y) in [((1, 0.5), (1, 1.5)), ((1, 0.5), (2, 1.0)), ((2, 0.3), (2, 2.0))]:
        num = op.kernel_at(z * z, x, y, (j, l))
        ex = resolvent_kernel(pots, m, z, x, y, (j, l))
        assert abs(num - ex) < 1e-4 * abs(ex)


def test_discretize_free_examples():
    ev = discretize(EdgePotentials.free(), preset("kirchhoff"), 1e-3, 30.0).eigenvalues(upper=0.01)
    assert ev.min() >= -1e-6
    ev = discretize(EdgePotentials.free(), preset("delta", -2), 1e-3, 30.0).eigenvalues(upper=0.0)
    assert ev.size == 1 and ev[0] == pytest.approx(-1.0, abs=1e-3)


def test_discretize_step_precondition():
    with pytest.raises(ValueError):
        discretize(EdgePotentials.free(), preset("kirchhoff"), 0.2, 30.0)
    with pytest.raises(ValueError):
        discretize(EdgePotentials.free(), preset("kirchhoff"), 0.013, 10.0)


@pytest.mark.parametrize("config", ["well", "delta_prime", "density"])
def test_second_order_convergence(config):
    pots, m = {
        "well": WELL_K,
        "delta_prime": (EdgePotentials(PotentialProfile.square_well(-3, 1), PotentialProfile.zero()), preset("delta_prime", 2.0)),
        "density": (EdgePotentials(PotentialProfile.exponential(-2, 1), PotentialProfile.zero()), preset("density", 0.5)),
    }[config]
    lam = [discretize(pots, m, h, 20.0).eigenvalues()[0] for h in (0.04, 0.02, 0.01)]
    ratio = (lam[0] - lam[1]) / (lam[1] - lam[2])
    assert 3.5 <= ratio <= 4.5


@pytest.mark.parametrize("m", [preset("kirchhoff"), preset("delta_prime", 1.5), InteractionMatrix(0.0, 2.0, 1.0, 1.0, 0.0)])
def test_gauge_invariance_of_oracle(m):
    pots = EdgePotentials(PotentialProfile.square_well(-3, 1), PotentialProfile.exponential(-1, 2))
    ref = np.linalg.eigvalsh(discretize(pots, m, 0.05, 10.0).matrix)
    for phi in (0.9, -0.4):
        a = discretize(pots, m.with_phi(phi), 0.05, 10.0).matrix
        assert np.allclose(a, a.conj().T)
        assert np.max(np.abs(np.linalg.eigvalsh(a) - ref)) < 1e-10


def test_dump_roundtrip(tmp_path):
    op = discretize(*WELL_K[:1], preset("delta", -1.0, phi=0.3), 0.05, 10.0)
    f = tmp_path / "m.bin"
    op.dump(f)
    a, h = load_dump(f)
    assert h == 0.05 and np.array_equal(a, op.matrix.astype(complex))
    raw = f.read_bytes()
    assert raw[:4] == b"SPDM" and len(raw) == 4 + 16 + 8 + 16 * op.size**2


def test_trace_difference_free_and_sign():
    assert trace_difference(EdgePotentials.free(), preset("delta", 1), 4.0, 0.02, 10.0) == 0.0
    assert trace_difference(*WELL_K, 50.0, 0.02, 10.0) > 0
    dense = trace_difference(*WELL_K, 4.0, 0.05, 10.0, method="dense")
    tri = trace_difference(*WELL_K, 4.0, 0.05, 10.0)
    assert dense == pytest.approx(tri, rel=1e-10)


def test_trace_difference_matches_rhs():
    ladder = [trace_difference(*WELL_K, 4.0, h, 30.0) for h in (0.02, 0.01)]
    rhs = trace_formula_rhs(*WELL_K, 2j).real
    assert abs(richardson(ladder) - rhs) < 1e-3 * abs(rhs)


def test_trace_norm_free():
    fit = trace_norm_decay(EdgePotentials.free(), preset("kirchhoff"), [4, 8, 16])
    assert np.all(fit.norms < 1e-12) and fit.slope is None


def test_rank_two_trace_norm_helper():
    rng = np.random.default_rng(3)
    for _ in range(10):
        f = rng.normal(size=6) + 1j * rng.normal(size=6)
        g = rng.normal(size=6) + 1j * rng.normal(size=6)
        assert _rank_two_trace_norm(f, g) == pytest.approx(rank_two_trace_norm_svd(f, g), rel=1e-10)
