"""Bound states, phase shift, spectral shift function and the Levinson count.

Zeros of D on the positive imaginary axis are found from the real function
g(kappa) = N(i kappa), the pole-free numerator. D itself also has poles there,
at the negative eigenvalues of the unperturbed operator (roots of the free
denominator). Consequently the winding of D around the contour counts
N_V - N_0, and that net number is the one entering the Levinson identity.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import interpolate, optimize

from .determinant import (
    denominator,
    denominator_derivative,
    det_at,
    levinson_constants,
    numerator,
    numerator_derivative,
    LevinsonConstants,
)
from .errors import ContourTooClose, GridTooCoarse, ResonanceBoundary, UnwrapAmbiguous
from .interaction import InteractionMatrix, parameter_warnings, unperturbed_poles
from .potential import EdgePotentials, PotentialProfile, moment
from .scattering import jost, jost_pair

log = logging.getLogger(__name__)

ZERO_G_TOL = 1e-9
LEVINSON_TOL = 0.05 * math.pi


# ---------------------------------------------------------------------------
# eigenvalues
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Eigenvalue:
    kappa: float
    multiplicity: int
    abs_D: float
    # True when the zero of N coincides with a pole of D, so D itself is regular there
    cancelled: bool = False

    @property
    def energy(self) -> float:
        return -self.kappa * self.kappa


def _g(potentials: EdgePotentials, m: InteractionMatrix, kappa: float) -> float:
    j1, j2 = jost_pair(potentials, 1j * kappa)
    return numerator(j1, j2, m).real


def default_kappa_max(potentials: EdgePotentials) -> float:
    return 3.0 + 2.0 * max(math.sqrt(moment(p, 0)) for p in potentials)


def _scan_grid(kappa_max: float, n_lin: int = 400, n_log: int = 40) -> np.ndarray:
    lo = min(1e-3, 0.01 * kappa_max)
    return np.unique(np.concatenate([np.geomspace(lo, 1.0, n_log), np.linspace(lo, kappa_max, n_lin)]))


def _small_circle_count(potentials, m, center: float, radius: float, n: int = 64) -> int:
    """Winding of N around a circle in the zeta-plane centred at i*center."""
    th = 2 * np.pi * np.arange(n) / n
    total = 0j
    for t in th:
        z = 1j * center + radius * cmath.exp(1j * t)
        j1, j2 = jost_pair(potentials, z)
        total += numerator_derivative(j1, j2, m) / numerator(j1, j2, m) * 1j * radius * cmath.exp(1j * t)
    return int(round((total * 2 * np.pi / n / (2j * np.pi)).real))


def find_eigenvalues(
    potentials: EdgePotentials,
    m: InteractionMatrix,
    kappa_max: float | None = None,
    *,
    n_grid: int = 400,
    include_cancelled: bool = False,
) -> list[Eigenvalue]:
    """Zeros i*kappa of D, i.e. eigenvalues -kappa^2 of the perturbed operator.

    An eigenvalue shared with the unperturbed operator is a zero of the
    numerator and of the denominator at once, so D has neither a zero nor a
    pole there. Such points are dropped unless ``include_cancelled``.

    Sign changes of g are bracketed and refined with Brent's method. Local
    minima of |g| without a sign change are refined too; if they reach the
    zero threshold a small-circle argument principle fixes the multiplicity.
    The upper limit doubles while the deepest zero sits in its top 10%.
    """
    if potentials.is_zero and not unperturbed_poles(m):
        return []
    km = default_kappa_max(potentials) if kappa_max is None else float(kappa_max)
    while True:
        grid = _scan_grid(km, n_grid)
        g = np.array([_g(potentials, m, k) for k in grid])
        scale = np.max(np.abs(g))
        found: list[Eigenvalue] = []
        for i in range(grid.size - 1):
            if g[i] == 0.0:
                found.append(Eigenvalue(float(grid[i]), 1, 0.0))
            elif g[i] * g[i + 1] < 0:
                k = optimize.brentq(lambda t: _g(potentials, m, t), grid[i], grid[i + 1], xtol=1e-15, rtol=1e-15)
                found.append(Eigenvalue(float(k), 1, 0.0))
        for i in range(1, grid.size - 1):
            a, b, c = abs(g[i - 1]), abs(g[i]), abs(g[i + 1])
            if b < a and b < c and g[i - 1] * g[i + 1] > 0 and b < 1e-3 * scale:
                res = optimize.minimize_scalar(
                    lambda t: abs(_g(potentials, m, t)), bracket=(grid[i - 1], grid[i], grid[i + 1]), tol=1e-12
                )
                if res.fun < ZERO_G_TOL * max(scale, 1.0):
                    r = 0.5 * min(grid[i + 1] - grid[i], grid[i] - grid[i - 1])
                    mult = _small_circle_count(potentials, m, float(res.x), r)
                    found.append(Eigenvalue(float(res.x), max(mult, 2), float(res.fun)))
        found.sort(key=lambda e: e.kappa)
        if not found or found[-1].kappa < 0.9 * km or kappa_max is not None:
            break
        km *= 2.0
    poles = unperturbed_poles(m)
    out = []
    for e in found:
        cancelled = any(abs(e.kappa - k0) < 1e-8 * max(1.0, k0) for k0 in poles)
        if cancelled and not include_cancelled:
            continue
        absd = math.nan if cancelled else abs(det_at(potentials, m, 1j * e.kappa).value)
        out.append(Eigenvalue(e.kappa, e.multiplicity, absd, cancelled))
    return out


def unperturbed_eigenvalues(m: InteractionMatrix) -> list[Eigenvalue]:
    """Poles of D on the imaginary axis, the negative spectrum of the free operator."""
    return [Eigenvalue(k, 1, math.inf) for k in unperturbed_poles(m)]


# ---------------------------------------------------------------------------
# phase shift
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PhaseCurve:
    k_grid: np.ndarray
    eta: np.ndarray
    a_k: np.ndarray
    eta0: float
    eta_inf: float

    def at(self, k):
        """Cubic interpolation of eta in log k."""
        spline = interpolate.CubicSpline(np.log(self.k_grid), self.eta)
        return spline(np.log(np.asarray(k, float)))

    def to_rows(self):
        for k, e, a in zip(self.k_grid, self.eta, self.a_k):
            yield float(k), float(e), float(a)


def default_k_grid(k_min: float = 1e-3, k_max: float = 30.0) -> np.ndarray:
    return np.unique(np.concatenate([np.geomspace(k_min, 1.0, 60), np.linspace(1.0, k_max, 300)]))


def _det_real(potentials, m, k: float) -> complex:
    j1, j2 = jost_pair(potentials, k)
    return numerator(j1, j2, m) / denominator(m, k)


def _unwrap_from_top(args: np.ndarray) -> np.ndarray:
    return np.unwrap(args[::-1])[::-1]


def phase_shift(
    potentials: EdgePotentials,
    m: InteractionMatrix,
    k_grid=None,
    *,
    normalize: bool = True,
) -> PhaseCurve:
    """Continuous branch of arg D(k) on k > 0.

    Unwrapping runs downward from the largest k, where the principal value
    is used. eta(inf) comes from a fit eta ~ eta_inf + c1/k + c2/k^2 on the
    top of the grid and eta(0+) from a linear fit on the bottom. With
    ``normalize`` the curve is shifted so that eta(inf) = 0.
    """
    ks = default_k_grid() if k_grid is None else np.asarray(k_grid, float)
    if np.any(ks <= 0) or np.any(np.diff(ks) <= 0):
        raise ValueError("k_grid must be positive and increasing")
    if potentials.is_zero:
        # D = 1 identically
        return PhaseCurve(ks, np.zeros_like(ks), np.ones_like(ks), 0.0, 0.0)
    vals = np.array([_det_real(potentials, m, k) for k in ks])
    arg = np.angle(vals)
    jumps = np.abs(np.diff(_unwrap_from_top(arg)))
    if np.any(jumps >= math.pi / 2):
        # one refinement round: insert midpoints around offending intervals
        bad = np.flatnonzero(jumps >= math.pi / 2)
        mids = 0.5 * (ks[bad] + ks[bad + 1])
        ks = np.sort(np.concatenate([ks, mids]))
        vals = np.array([_det_real(potentials, m, k) for k in ks])
        arg = np.angle(vals)
        if np.any(np.abs(np.diff(_unwrap_from_top(arg))) >= math.pi / 2):
            raise UnwrapAmbiguous("adjacent phase samples differ by >= pi/2 after refinement")
    eta = _unwrap_from_top(arg)
    top = ks >= 0.5 * ks[-1]
    if top.sum() >= 3:
        A = np.vstack([np.ones(top.sum()), 1 / ks[top], 1 / ks[top] ** 2]).T
        eta_inf = float(np.linalg.lstsq(A, eta[top], rcond=None)[0][0])
    else:
        eta_inf = float(eta[-1])
    low = ks[:4]
    eta0 = float(np.polyval(np.polyfit(low, eta[:4], 1), 0.0))
    if normalize:
        eta = eta - eta_inf
        eta0 -= eta_inf
        eta_inf = 0.0
    return PhaseCurve(ks, eta, np.abs(vals), eta0, eta_inf)


def phase_conjugate(potentials: EdgePotentials, m: InteractionMatrix, ks) -> np.ndarray:
    """arg D(-k) for the given k > 0, principal branch (D(-k) = conj D(k))."""
    return np.array([cmath.phase(_det_real(potentials, m, -k)) for k in ks])


# ---------------------------------------------------------------------------
# spectral shift function
# ---------------------------------------------------------------------------


def _count_below(energies, lam: float) -> int:
    return sum(1 for e in energies if e <= lam)


def spectral_shift(
    potentials: EdgePotentials,
    m: InteractionMatrix,
    lambda_grid,
    *,
    eigen: list[Eigenvalue] | None = None,
    phase: PhaseCurve | None = None,
) -> np.ndarray:
    """xi(lambda): eta(sqrt(lambda))/pi above 0, an integer count below."""
    lams = np.asarray(lambda_grid, float)
    ev = find_eigenvalues(potentials, m, include_cancelled=True) if eigen is None else eigen
    ev_v = [e.energy for e in ev]
    ev_0 = [-k * k for k in unperturbed_poles(m)]
    for lam in lams[lams < 0]:
        near = [e for e in ev_v + ev_0 if abs(e - lam) < 1e-6]
        if near:
            log.warning("lambda=%g within 1e-6 of an eigenvalue; xi is one-sided there", lam)
    out = np.empty_like(lams)
    neg = lams < 0
    out[neg] = [-_count_below(ev_v, lam) + _count_below(ev_0, lam) for lam in lams[neg]]
    pos = ~neg
    if pos.any():
        if potentials.is_zero:
            out[pos] = 0.0
        else:
            if phase is None:
                kq = np.sqrt(lams[pos])
                kmin = min(1e-3, float(kq[kq > 0].min()) if np.any(kq > 0) else 1e-3)
                phase = phase_shift(potentials, m, default_k_grid(kmin, max(30.0, float(kq.max()))))
            kq = np.sqrt(np.maximum(lams[pos], phase.k_grid[0]))
            out[pos] = phase.at(kq) / math.pi
    return out


def ssf_pairing(
    potentials: EdgePotentials,
    m: InteractionMatrix,
    fprime,
    support: tuple[float, float],
    *,
    eigen: list[Eigenvalue] | None = None,
    phase: PhaseCurve | None = None,
) -> float:
    """Integral of xi(lambda) f'(lambda) over ``support`` for compactly supported f.

    Below zero xi is piecewise constant, so that part is integrated exactly
    through f; above zero the substitution lambda = k^2 is used with the
    interpolated phase.
    """
    from scipy import integrate

    lo, hi = support
    ev = find_eigenvalues(potentials, m, include_cancelled=True) if eigen is None else eigen
    total = 0.0
    if lo < 0:
        # xi = sum_0 H(l - E0) - sum_V H(l - EV) on (lo, 0)
        f_int = lambda a, b: integrate.quad(fprime, a, b, epsabs=1e-12, limit=200)[0]  # noqa: E731
        for e in (-k * k for k in unperturbed_poles(m)):
            if e < 0:
                total += f_int(max(e, lo), 0.0)
        for e in ev:
            total -= f_int(max(e.energy, lo), 0.0)
    if hi > 0 and not potentials.is_zero:
        if phase is None:
            phase = phase_shift(potentials, m, default_k_grid(1e-3, max(30.0, math.sqrt(hi) * 1.2)))
        k_lo = math.sqrt(max(lo, 0.0))
        k_hi = math.sqrt(hi)
        k0 = phase.k_grid[0]
        eta = lambda k: float(phase.at(max(k, k0)))  # noqa: E731
        val, _ = integrate.quad(
            lambda k: eta(k) / math.pi * fprime(k * k) * 2 * k, k_lo, k_hi, epsabs=1e-10, limit=400
        )
        total += val
    return float(total)


# ---------------------------------------------------------------------------
# argument principle
# ---------------------------------------------------------------------------


def _log_derivative(potentials, m, z: complex, which: str) -> complex:
    j1, j2 = jost_pair(potentials, z)
    g = numerator_derivative(j1, j2, m) / numerator(j1, j2, m)
    if which == "D":
        g -= denominator_derivative(m, z) / denominator(m, z)
    return g


def _trapezoid_piece(f, n0: int, rtol: float = 1e-4, n_max: int = 4096):
    """Trapezoid on [0, 1] for a smooth integrand, doubling n until stable."""
    n = n0
    t = np.linspace(0.0, 1.0, n + 1)
    vals = np.array([f(x) for x in t])
    prev = np.trapezoid(vals, t) if hasattr(np, "trapezoid") else np.trapz(vals, t)
    while n < n_max:
        mid = (np.arange(n) + 0.5) / n
        mv = np.array([f(x) for x in mid])
        t = np.sort(np.concatenate([t, mid]))
        merged = np.empty(2 * n + 1, complex)
        merged[0::2] = vals
        merged[1::2] = mv
        vals = merged
        n *= 2
        cur = vals[1:-1].sum() / n + 0.5 * (vals[0] + vals[-1]) / n
        if abs(cur - prev) < rtol * max(1.0, abs(cur)):
            return cur
        prev = cur
    return prev


@dataclass(frozen=True)
class WindingResult:
    value: int
    raw: complex
    R: float
    eps_radius: float
    which: str

    @property
    def residue(self) -> float:
        return abs(self.raw.real - self.value) + abs(self.raw.imag)


def winding_number(
    potentials: EdgePotentials,
    m: InteractionMatrix,
    R: float | None = None,
    eps_radius: float = 0.01,
    *,
    which: str = "D",
    tol: float = 0.05,
) -> WindingResult:
    """(1/2 pi i) times the contour integral of the log-derivative over Gamma_{R,eps}.

    ``which="D"`` counts zeros minus poles of D (perturbed minus unperturbed
    bound states); ``which="numerator"`` counts zeros of N only. The two
    real-axis segments are folded together using D(-k) = conj D(k).
    """
    if which not in ("D", "numerator"):
        raise ValueError("which must be 'D' or 'numerator'")
    if R is None:
        R = max(default_kappa_max(potentials), 2.0 * max(unperturbed_poles(m), default=0.0) + 1.0)
    eps = float(eps_radius)
    ld = lambda z: _log_derivative(potentials, m, z, which)  # noqa: E731

    # real segment [eps, R] in s = ln k
    ls = math.log(R / eps)

    def seg(u):
        k = eps * math.exp(u * ls)
        return ld(k) * k * ls

    I_real = _trapezoid_piece(seg, 64)
    real_part = 2j * I_real.imag

    def arc(u, rad, t0, t1):
        th = t0 + (t1 - t0) * u
        z = rad * cmath.exp(1j * th)
        return ld(z) * 1j * z * (t1 - t0)

    big = _trapezoid_piece(lambda u: arc(u, R, 0.0, math.pi), 64)
    small = _trapezoid_piece(lambda u: arc(u, eps, math.pi, 0.0), 32)
    raw = (real_part + big + small) / (2j * math.pi)
    value = int(round(raw.real))
    res = WindingResult(value, complex(raw), float(R), eps, which)
    if res.residue >= tol:
        raise ContourTooClose(f"winding {raw:.4f} is not near an integer (residue {res.residue:.3g})")
    return res


# ---------------------------------------------------------------------------
# Levinson
# ---------------------------------------------------------------------------


@dataclass
class SpectralReport:
    eigenvalues: list[Eigenvalue]
    unperturbed: list[Eigenvalue]
    constants: LevinsonConstants
    phase: PhaseCurve | None
    eta0: float
    eta_inf: float
    winding: int | None = None
    warnings: list[str] = field(default_factory=list)

    @property
    def N_V(self) -> int:
        return sum(e.multiplicity for e in self.eigenvalues)

    @property
    def N_0(self) -> int:
        return len(self.unperturbed)

    @property
    def N(self) -> int:
        return self.N_V - self.N_0

    @property
    def levinson_lhs(self) -> float:
        return self.eta_inf - self.eta0

    @property
    def levinson_rhs(self) -> float | None:
        X = self.constants.X
        return None if X is None else math.pi * (self.N + (X - self.constants.P) / 2)

    @property
    def residual(self) -> float | None:
        rhs = self.levinson_rhs
        return None if rhs is None else abs(self.levinson_lhs - rhs)

    @property
    def indeterminate(self) -> bool:
        return self.constants.indeterminate or bool(self.warnings)

    @property
    def passed(self) -> bool:
        return self.residual is not None and self.residual < LEVINSON_TOL

    def to_dict(self) -> dict:
        lc = self.constants
        return {
            "eigenvalues": [
                {"kappa": e.kappa, "energy": e.energy, "multiplicity": e.multiplicity, "abs_D": e.abs_D,
                 "shared_with_unperturbed": e.cancelled}
                for e in self.eigenvalues
            ],
            "unperturbed_eigenvalues": [{"kappa": e.kappa, "energy": e.energy} for e in self.unperturbed],
            "N_V": self.N_V,
            "N_0": self.N_0,
            "N": self.N,
            "winding": self.winding,
            "eta0": self.eta0,
            "eta_inf": self.eta_inf,
            "levinson_lhs": self.levinson_lhs,
            "levinson_rhs": self.levinson_rhs,
            "residual": self.residual,
            "passed": self.passed,
            "indeterminate": self.indeterminate,
            "warnings": list(self.warnings) + list(lc.boundary),
            "ledger": lc.ledger(),
        }


def levinson_check(
    potentials: EdgePotentials,
    m: InteractionMatrix,
    *,
    k_grid=None,
    with_winding: bool = True,
    strict: bool = False,
) -> SpectralReport:
    """Assemble eta(inf) - eta(0) against pi (N + (X - P)/2).

    Classifier quantities inside the warning band mark the report as
    indeterminate; with ``strict`` that raises ResonanceBoundary instead.
    """
    lc = levinson_constants(potentials, m)
    notes = parameter_warnings(m)
    if strict and (notes or lc.boundary):
        raise ResonanceBoundary("; ".join(notes + list(lc.boundary)))
    ev = find_eigenvalues(potentials, m, include_cancelled=True)
    ev0 = unperturbed_eigenvalues(m)
    if potentials.is_zero:
        curve, eta0, eta_inf = None, 0.0, 0.0
    else:
        curve = phase_shift(potentials, m, k_grid)
        eta0, eta_inf = curve.eta0, curve.eta_inf
    rep = SpectralReport(ev, ev0, lc, curve, eta0, eta_inf, warnings=notes)
    if with_winding:
        w = winding_number(potentials, m)
        rep.winding = w.value
        if w.value != rep.N:
            raise GridTooCoarse(f"winding {w.value} differs from bisection count N_V - N_0 = {rep.N}")
    return rep


# ---------------------------------------------------------------------------
# resonance tuning
# ---------------------------------------------------------------------------


def tune_resonance(width: float = 1.0, bracket=(-3.0, -2.0), tol: float = 1e-14) -> PotentialProfile:
    """Square well whose zero-energy Jost value w(0) vanishes, by bisection on the depth."""
    f = lambda depth: jost(PotentialProfile.square_well(depth, width), 0.0).w.real  # noqa: E731
    depth = optimize.brentq(f, *bracket, xtol=tol, rtol=1e-15)
    return PotentialProfile.square_well(depth, width)
