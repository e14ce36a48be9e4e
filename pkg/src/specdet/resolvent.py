"""Krein resolvent kernels and the finite-difference oracle.

Two independent routes to the same objects:

* closed form: Dirichlet half-line kernels plus the rank-structured correction
  ``lambda_jl theta_j(x) theta_l(y)`` built from Jost data;
* a box discretization of H_V^A on [0, X] x 2 with Dirichlet walls at X.

The discretization comes from the quadratic form of the operator. For b != 0
the matching condition is equivalent to the Robin-type relation

    (psi_1'(0), psi_2'(0)) = (1/b) [[d, 1], [1, -a]] (psi_1(0), psi_2(0)),

giving the boundary term psi(0)^T M psi(0); for b = 0 the constraint
psi_1(0) = a psi_2(0) is built into one shared junction unknown and the
boundary term is a c |psi_2(0)|^2. Piecewise-linear elements with a lumped
mass matrix yield a symmetric tridiagonal matrix (edge 1 reversed, junction,
edge 2) whose eigenvalues converge at O(h^2).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .determinant import RESONANT_W, big_L, fit_loglog_slope
from .errors import ResonantDivision, StencilInconsistent
from .interaction import InteractionMatrix
from .potential import EdgePotentials, PotentialProfile
from .scattering import JostData, as_zeta, jost, jost_trace, regular

# ---------------------------------------------------------------------------
# Krein formula
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KreinCoefficients:
    lambda11: complex
    lambda12: complex
    lambda21: complex
    lambda22: complex
    zeta: complex

    def as_matrix(self) -> np.ndarray:
        return np.array([[self.lambda11, self.lambda12], [self.lambda21, self.lambda22]])


def krein_lambdas(j1: JostData, j2: JostData, m: InteractionMatrix) -> KreinCoefficients:
    """Coefficients of the correction term in the Krein resolvent formula.

    Obtained by imposing both matching conditions on the Krein ansatz. The
    (2,1) entry is -exp(-i phi) / (L th1 th2); with that sign the kernel is
    Hermitian at real negative energies.
    """
    if abs(j1.w) < RESONANT_W or abs(j2.w) < RESONANT_W:
        raise ResonantDivision("Krein coefficients need w1, w2 != 0")
    L = big_L(j1, j2, m)
    if abs(L) < RESONANT_W:
        raise ResonantDivision("L(zeta) vanishes: zeta^2 is an eigenvalue")
    t1, t2 = j1.w, j2.w
    r1, r2 = j1.wp / t1, j2.wp / t2
    ph = cmath.exp(1j * m.phi)
    return KreinCoefficients(
        -(m.a + m.b * r2) / (L * t1 * t1),
        (m.a * m.d - m.b * m.c) * ph / (L * t1 * t2),
        -1.0 / (ph * L * t1 * t2),
        -(m.b * r1 - m.d) / (L * t2 * t2),
        j1.zeta,
    )


def dirichlet_kernel(profile: PotentialProfile, zeta, x: float, y: float) -> complex:
    """phi(min(x,y)) theta(max(x,y)) / w for the Dirichlet half-line problem."""
    z = as_zeta(zeta)
    lo, hi = min(x, y), max(x, y)
    th = jost_trace(profile, z, [0.0, hi])
    w = th.theta[0]
    if lo == 0.0:
        return 0j
    ph = regular(profile, z, lo, xs=[0.0, lo])
    return complex(ph.values[-1] * th.theta[-1] / w)


def resolvent_kernel(
    potentials: EdgePotentials,
    m: InteractionMatrix,
    zeta,
    x: float,
    y: float,
    edges: tuple[int, int],
) -> complex:
    """Kernel of (H_V^A - zeta^2)^{-1} between point x on edge j and y on edge l."""
    z = as_zeta(zeta)
    j, l = edges
    pj, pl = potentials[j - 1], potentials[l - 1]
    jd1, jd2 = jost(potentials.v1, z, edge=1), jost(potentials.v2, z, edge=2)
    lam = krein_lambdas(jd1, jd2, m).as_matrix()[j - 1, l - 1]
    th_x = jost_trace(pj, z, [x]).theta[0]
    th_y = jost_trace(pl, z, [y]).theta[0]
    val = lam * th_x * th_y
    if j == l:
        val += dirichlet_kernel(pj, z, x, y)
    return complex(val)


def free_kernel_correction(m: InteractionMatrix, zeta, x, y, edges) -> complex:
    """Correction term for V = 0, where theta_j(x) = exp(i zeta x)."""
    z = as_zeta(zeta)
    den = (m.a - m.d) * 1j * z - (m.b * z * z + m.c)
    j, l = edges
    ph = cmath.exp(1j * m.phi)
    coef = {
        (1, 1): -(m.a + 1j * z * m.b) / den,
        (1, 2): (m.a * m.d - m.b * m.c) * ph / den,
        (2, 1): -1.0 / (ph * den),
        (2, 2): -(1j * z * m.b - m.d) / den,
    }[(j, l)]
    return coef * cmath.exp(1j * z * (x + y))


# ---------------------------------------------------------------------------
# box discretization
# ---------------------------------------------------------------------------


def _hat_loads(profile: PotentialProfile, h: float, n: int) -> np.ndarray:
    """Integrals of V against each nodal hat function on [0, n h] (node n excluded)."""
    gx, gw = np.polynomial.legendre.leggauss(6)
    left = np.arange(n) * h
    s = 0.5 * (gx + 1.0)  # points in [0, 1]
    xs = left[:, None] + h * s[None, :]
    v = profile(xs)
    wq = 0.5 * gw * h
    # element e carries hat_e (falling) and hat_{e+1} (rising)
    fall = (v * (1.0 - s) * wq).sum(axis=1)
    rise = (v * s * wq).sum(axis=1)
    loads = np.zeros(n + 1)
    loads[:-1] += fall
    loads[1:] += rise
    return loads[:n]


@dataclass
class DiscretizedOperator:
    """Symmetric tridiagonal model of H_V^A in the phi = 0 gauge.

    ``diag``/``offdiag`` are the entries of M^{-1/2} K M^{-1/2} (stiffness K,
    lumped mass M), so the matrix acts in an orthonormal basis of the
    discrete L^2 space. ``phi`` is reapplied as a unitary phase on edge-2
    unknowns when the dense matrix is requested.
    """

    grid_step: float
    box: float
    phi: float
    diag: np.ndarray
    offdiag: np.ndarray
    mass: np.ndarray
    edge: np.ndarray
    x: np.ndarray
    junction_scheme: str
    junction: tuple[int, ...] = field(default=())

    @property
    def size(self) -> int:
        return self.diag.size

    @property
    def gauge(self) -> np.ndarray:
        g = np.ones(self.size, complex)
        g[self.edge == 2] = cmath.exp(-1j * self.phi)
        return g

    @property
    def matrix(self) -> np.ndarray:
        a = np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)
        if self.phi == 0.0:
            return a
        g = self.gauge
        return g[:, None] * a * g.conj()[None, :]

    def eigenvalues(self, upper: float | None = None) -> np.ndarray:
        if upper is None:
            return linalg.eigh_tridiagonal(self.diag, self.offdiag, eigvals_only=True)
        lo = -abs(self.diag).max() - 2 * abs(self.offdiag).max() - 1.0
        return linalg.eigh_tridiagonal(
            self.diag, self.offdiag, eigvals_only=True, select="v", select_range=(lo, upper)
        )

    def resolvent(self, z: complex, columns=None) -> np.ndarray:
        """Columns of (A - z)^{-1} in the orthonormal discrete basis.

        Banded solve on the phi = 0 tridiagonal; the phi gauge is a diagonal
        unitary and is conjugated back in afterwards.
        """
        n = self.size
        cols = np.arange(n) if columns is None else np.atleast_1d(np.asarray(columns, int))
        ab = np.zeros((3, n), complex)
        ab[0, 1:] = self.offdiag
        ab[1] = self.diag - z
        ab[2, :-1] = self.offdiag
        rhs = np.zeros((n, cols.size), complex)
        rhs[cols, np.arange(cols.size)] = 1.0
        r = linalg.solve_banded((1, 1), ab, rhs)
        if self.phi != 0.0:
            g = self.gauge
            r = g[:, None] * r * g[cols].conj()[None, :]
        return r

    def kernel(self, z: complex, columns=None) -> np.ndarray:
        """Resolvent kernel samples [(A - z)^{-1}]_ij / sqrt(m_i m_j) for j in ``columns``."""
        cols = np.arange(self.size) if columns is None else np.atleast_1d(np.asarray(columns, int))
        s = 1.0 / np.sqrt(self.mass)
        return s[:, None] * self.resolvent(z, cols) * s[cols][None, :]

    def kernel_at(self, z: complex, x: float, y: float, edges: tuple[int, int]) -> complex:
        i, j = self.index(edges[0], x), self.index(edges[1], y)
        return complex(self.kernel(z, [j])[i, 0])

    def index(self, edge: int, x: float) -> int:
        hits = np.flatnonzero((self.edge == edge) & np.isclose(self.x, x, atol=1e-9 * self.grid_step))
        if hits.size == 0:
            raise KeyError(f"no grid node at x={x} on edge {edge}")
        return int(hits[0])

    def dump(self, path) -> None:
        """Binary dump: b'SPDM', int64 rows, int64 cols, float64 h, complex128 row-major."""
        a = np.ascontiguousarray(self.matrix, dtype=np.complex128)
        with open(path, "wb") as fh:
            fh.write(b"SPDM")
            np.array([a.shape[0], a.shape[1]], dtype="<i8").tofile(fh)
            np.array([self.grid_step], dtype="<f8").tofile(fh)
            a.astype("<c16").tofile(fh)


def load_dump(path) -> tuple[np.ndarray, float]:
    with open(path, "rb") as fh:
        if fh.read(4) != b"SPDM":
            raise ValueError("not a specdet matrix dump")
        rows, cols = np.fromfile(fh, dtype="<i8", count=2)
        h = float(np.fromfile(fh, dtype="<f8", count=1)[0])
        data = np.fromfile(fh, dtype="<c16", count=int(rows * cols))
    return data.reshape(int(rows), int(cols)), h


def discretize(
    potentials: EdgePotentials,
    m: InteractionMatrix,
    h: float,
    X: float = 30.0,
) -> DiscretizedOperator:
    if not h <= X / 200 + 1e-15:
        raise ValueError(f"grid step h={h} must satisfy h <= X/200 (X={X})")
    n = int(round(X / h))
    if abs(n * h - X) > 1e-9 * X:
        raise ValueError("X must be an integer multiple of h")
    xs = np.arange(n) * h  # nodes 0..n-1; node n carries the Dirichlet wall
    loads = [_hat_loads(p, h, n) for p in potentials]
    mass = np.full(n, h)
    mass[0] = 0.5 * h
    # per-edge stiffness + potential, nodes 0..n-1
    kd = [np.full(n, 2.0 / h) + ld for ld in loads]
    for k in kd:
        k[0] = 1.0 / h + (k[0] - 2.0 / h)
    koff = -1.0 / h
    a, b, c, d = m.a, m.b, m.c, m.d

    # assemble in path order: edge1 n-1..1, junction, edge2 1..n-1
    e1 = np.arange(n - 1, 0, -1)
    e2 = np.arange(1, n)
    if abs(b) > 1e-12:
        kj = np.array([kd[0][0] + d / b, kd[1][0] - a / b])
        mj = np.array([mass[0], mass[0]])
        kj_off = np.array([1.0 / b])
        x_j, edge_j, scheme = [0.0, 0.0], [1, 2], "quadratic-form P1, Robin junction (b != 0)"
        jn = (n - 1, n)
    else:
        if abs(a) < 1e-12:
            raise StencilInconsistent("b = 0 requires a != 0 for a shared junction unknown")
        kj = np.array([a * a * kd[0][0] + kd[1][0] + a * c])
        mj = np.array([(a * a + 1.0) * mass[0]])
        kj_off = np.array([])
        x_j, edge_j, scheme = [0.0], [2], "quadratic-form P1, shared junction unknown (b = 0)"
        jn = (n - 1,)
    kdiag = np.concatenate([kd[0][e1], kj, kd[1][e2]])
    mvec = np.concatenate([mass[e1], mj, mass[e2]])
    n1 = e1.size
    off = np.full(kdiag.size - 1, koff)
    if kj.size == 2:
        off[n1 - 1] = koff  # u1 - u0
        off[n1] = kj_off[0]  # u0 - v0
        off[n1 + 1] = koff  # v0 - v1
    else:
        off[n1 - 1] = a * koff  # u1 - s, since u0 = a s
        off[n1] = koff  # s - v1
    s = 1.0 / np.sqrt(mvec)
    diag = kdiag * s * s
    offd = off * s[:-1] * s[1:]
    edge = np.concatenate([np.ones(n1, int), edge_j, np.full(e2.size, 2)])
    x = np.concatenate([xs[e1], x_j, xs[e2]])
    if not (np.all(np.isfinite(diag)) and np.all(np.isfinite(offd))):
        raise StencilInconsistent("non-finite junction entries")
    return DiscretizedOperator(h, X, m.phi, diag, offd, mvec, edge, x, scheme, jn)


def richardson(values, order: int = 2, ratio: float = 2.0) -> float:
    """Extrapolate the last two entries of an h, h/ratio, ... ladder."""
    v = np.asarray(values)
    f = ratio**order
    return (f * v[-1] - v[-2]) / (f - 1.0)


def _trace_resolvent(op: DiscretizedOperator, t: float, method: str) -> float:
    if method == "tridiagonal":
        ev = op.eigenvalues()
        if ev.min() + t <= 0:
            raise ValueError(f"-t={-t} is not below the discrete spectrum (min {ev.min():.4g})")
        return float(np.sum(1.0 / (ev + t)))
    if method == "dense":
        a = op.matrix + t * np.eye(op.size)
        cho = linalg.cho_factor(a)
        return float(np.real(np.trace(linalg.cho_solve(cho, np.eye(op.size)))))
    raise ValueError(f"unknown method {method!r}")


def trace_difference(
    potentials: EdgePotentials,
    m: InteractionMatrix,
    t: float,
    h: float,
    X: float = 30.0,
    *,
    method: str = "tridiagonal",
) -> float:
    """Tr[(A_V + t)^{-1} - (A_0 + t)^{-1}] for the discretized operators."""
    if potentials.is_zero:
        return 0.0
    av = discretize(potentials, m, h, X)
    a0 = discretize(EdgePotentials.free(), m, h, X)
    return _trace_resolvent(av, t, method) - _trace_resolvent(a0, t, method)


@dataclass(frozen=True)
class TraceCheck:
    t: float
    hs: tuple[float, ...]
    ladder: tuple[float, ...]
    extrapolated: float
    analytic: float

    @property
    def relative_deviation(self) -> float:
        return abs(self.extrapolated - self.analytic) / abs(self.analytic)

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "h_ladder": list(self.hs),
            "oracle_ladder": list(self.ladder),
            "oracle_extrapolated": self.extrapolated,
            "analytic": self.analytic,
            "relative_deviation": self.relative_deviation,
        }


def trace_check(
    potentials: EdgePotentials,
    m: InteractionMatrix,
    t: float,
    hs=(0.02, 0.01),
    X: float = 30.0,
) -> TraceCheck:
    """Oracle trace of the resolvent difference against the analytic right-hand side."""
    from .determinant import trace_formula_rhs

    ladder = tuple(trace_difference(potentials, m, t, h, X) for h in hs)
    ext = richardson(ladder) if len(ladder) > 1 else ladder[0]
    rhs = trace_formula_rhs(potentials, m, 1j * math.sqrt(t)).real
    return TraceCheck(t, tuple(hs), ladder, float(ext), float(rhs))


@dataclass(frozen=True)
class TraceNormFit:
    t: np.ndarray
    norms: np.ndarray
    slope: float | None


def resolvent_difference(potentials: EdgePotentials, m: InteractionMatrix, t: float, h: float, X: float) -> np.ndarray:
    av = discretize(potentials, m, h, X)
    a0 = discretize(EdgePotentials.free(), m, h, X)
    eye = np.eye(av.size)
    rv = linalg.cho_solve(linalg.cho_factor(av.matrix + t * eye), eye)
    r0 = linalg.cho_solve(linalg.cho_factor(a0.matrix + t * eye), eye)
    return rv - r0


def nuclear_norm(a: np.ndarray) -> float:
    return float(np.sum(linalg.svdvals(a)))


def trace_norm_decay(
    potentials: EdgePotentials,
    m: InteractionMatrix,
    t_list,
    h: float = 0.01,
    X: float = 8.0,
    *,
    noise_floor: float = 1e-10,
) -> TraceNormFit:
    """Trace norms of the discretized resolvent difference and their log-log slope."""
    ts = np.asarray(sorted(t_list), float)
    if potentials.is_zero:
        return TraceNormFit(ts, np.zeros_like(ts), None)
    norms = np.array([nuclear_norm(resolvent_difference(potentials, m, t, h, X)) for t in ts])
    keep = np.ones(ts.size, bool)
    for i in (-1, -2):
        if norms[i] < noise_floor:
            keep[i] = False
    slope = fit_loglog_slope(ts[keep], norms[keep]) if keep.sum() >= 2 else None
    return TraceNormFit(ts, norms, slope)


def _rank_two_trace_norm(f: np.ndarray, g: np.ndarray) -> float:
    """Trace norm of (., f) f - (., g) g."""
    nf, ng = np.vdot(f, f).real, np.vdot(g, g).real
    return math.sqrt(max((nf + ng) ** 2 - 4.0 * abs(np.vdot(g, f)) ** 2, 0.0))


def functional_trace_difference(
    potentials: EdgePotentials,
    m: InteractionMatrix,
    f,
    support: tuple[float, float],
    hs=(0.02, 0.01),
    X: float = 60.0,
) -> float:
    """Tr f(A_V) - Tr f(A_0) for f supported in ``support``, Richardson in h.

    Only eigenvalues up to the top of the support are computed.
    """
    upper = float(support[1])
    ladder = []
    for h in hs:
        ev = discretize(potentials, m, h, X).eigenvalues(upper=upper)
        ev0 = discretize(EdgePotentials.free(), m, h, X).eigenvalues(upper=upper)
        ladder.append(float(np.sum(f(ev)) - np.sum(f(ev0))))
    return richardson(ladder) if len(ladder) > 1 else ladder[0]
