"""Jost and regular solutions of -u'' + V u = zeta**2 u on one half-line.

The Jost solution is integrated backwards from ``x_max`` in the factored form
``theta(x) = exp(i zeta x) m(x)``, where

    m'' + 2 i zeta m' = V m,        m(x_max) = 1, m'(x_max) = 0.

This keeps the state O(1) for any zeta in the closed upper half-plane (the
second solution exp(-2 i zeta x) of the m-equation decays in the backward
direction), so large ``Im zeta`` and long supports do not overflow. The
zeta-derivative comes from the variational system

    mdot'' + 2 i zeta mdot' = V mdot - 2 i m',   mdot(x_max) = mdot'(x_max) = 0,

integrated jointly, which is the factored form of starting the derivative at
d/dzeta exp(i zeta x) = i x exp(i zeta x).
"""

from __future__ import annotations

import cmath
import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import ode

from .errors import TailNotConverged
from .potential import PotentialProfile, moment

log = logging.getLogger(__name__)

RTOL = 1e-12
ATOL = 1e-14
FLUSH = 1e-100
TOL_TAIL = 1e-8


@dataclass(frozen=True)
class Wavenumber:
    """zeta = sqrt(z) on the branch Im zeta >= 0."""

    value: complex

    def __post_init__(self):
        object.__setattr__(self, "value", complex(self.value))
        if self.value.imag < 0:
            raise ValueError(f"zeta={self.value} lies in the lower half-plane")

    @classmethod
    def from_energy(cls, z: complex) -> Wavenumber:
        s = cmath.sqrt(complex(z))
        return cls(-s if s.imag < 0 else s)

    @property
    def branch_note(self) -> str:
        return "Im zeta > 0" if self.value.imag > 0 else "real axis"

    def __complex__(self):
        return self.value


def as_zeta(zeta) -> complex:
    value = complex(zeta.value if isinstance(zeta, Wavenumber) else zeta)
    if value.imag < 0:
        raise ValueError(f"zeta={value} lies in the lower half-plane")
    return value


@dataclass(frozen=True)
class JostData:
    """Boundary values of the Jost solution and its zeta-derivative at x=0."""

    w: complex
    wp: complex
    wdot: complex
    wpdot: complex
    edge: int
    zeta: complex

    @property
    def log_derivative(self) -> complex:
        return self.wp / self.w


@dataclass(frozen=True)
class SolutionTrace:
    """Samples of a solution and its x-derivative on an increasing grid."""

    grid: np.ndarray
    values: np.ndarray
    derivatives: np.ndarray
    kind: str = "jost"

    @property
    def theta(self) -> np.ndarray:
        return self.values

    @property
    def theta_prime(self) -> np.ndarray:
        return self.derivatives

    def to_rows(self):
        for x, u, du in zip(self.grid, self.values, self.derivatives):
            yield float(x), complex(u), complex(du)


def default_x_max(profile: PotentialProfile, zeta: complex) -> float:
    return float(profile.support_hint) + 10.0 / max(zeta.imag, 0.1)


def _segments(profile: PotentialProfile, x_max: float):
    """Descending breakpoint-free intervals covering [0, x_max]."""
    cuts = sorted({0.0, x_max, *[b for b in profile.breakpoints if 0.0 < b < x_max]})
    return [(cuts[i + 1], cuts[i]) for i in range(len(cuts) - 2, -1, -1)]


def _flushed(vf):
    # |V| below 1e-100 cannot move the solution at rtol 1e-12, but values near
    # 1e-160 make dop853's squared error norm underflow and the step collapse
    return lambda x: 0.0 if abs(v := vf(x)) < FLUSH else v


def _clamped(vf, lo, hi):
    # keep RK stages evaluated on a segment endpoint on the correct side of a jump
    eps = 1e-13 * max(1.0, hi)
    lo_in, hi_in = lo + eps, hi - eps
    return lambda x: vf(lo_in if x < lo_in else hi_in if x > hi_in else x)


def _run(rhs, y0, segments, stops, rtol, atol, clamp_profile=None):
    """Integrate a real-split system across segments, recording states at stops.

    ``segments`` are (start, end) pairs traversed in order; ``stops`` must be
    sorted in the direction of travel.
    """
    y = np.asarray(y0, dtype=float)
    out = {}
    pending = list(stops)
    for start, end in segments:
        f = rhs(start, end)
        r = ode(f).set_integrator("dop853", rtol=rtol, atol=atol, nsteps=10**7)
        r.set_initial_value(y, start)
        # NSTIFF < 0 switches off dop853's stiffness test, which misfires on
        # long oscillatory runs at real zeta (the problem is not stiff)
        r._integrator.iwork[3] = -1
        lo, hi = min(start, end), max(start, end)
        while pending and lo <= pending[0] <= hi:
            x = pending.pop(0)
            if x == start:
                out[x] = y.copy()
                continue
            r.integrate(x)
            if not r.successful():
                raise RuntimeError(f"ODE integration failed at x={x}")
            out[x] = r.y.copy()
        # r.t can land an ulp short of a stop that coincides with ``end``;
        # a second integrate over that sliver makes dop853 fail
        if abs(r.t - end) > 1e-12 * max(1.0, abs(end)):
            r.integrate(end)
            if not r.successful():
                raise RuntimeError(f"ODE integration failed on [{lo}, {hi}]")
        y = r.y.copy()
    return y, out


def _jost_system(vf, zeta, has_breaks):
    tz = 2j * zeta

    def make(start, end):
        v = _clamped(vf, min(start, end), max(start, end)) if has_breaks else vf

        def f(x, y):
            m = complex(y[0], y[1])
            mp = complex(y[2], y[3])
            md = complex(y[4], y[5])
            mdp = complex(y[6], y[7])
            vx = v(x)
            a = vx * m - tz * mp
            b = vx * md - tz * mdp - 2j * mp
            return [y[2], y[3], a.real, a.imag, y[6], y[7], b.real, b.imag]

        return f

    return make


@lru_cache(maxsize=8192)
def _jost_cached(profile, zeta, x_max, rtol, stops):
    if profile.is_zero:
        states = {x: np.array([1.0, 0, 0, 0, 0, 0, 0, 0]) for x in stops}
        return np.array([1.0, 0, 0, 0, 0, 0, 0, 0]), states
    make = _jost_system(_flushed(profile.scalar()), zeta, bool(profile.breakpoints))
    return _run(make, [1.0, 0, 0, 0, 0, 0, 0, 0], _segments(profile, x_max), sorted(stops, reverse=True), rtol, ATOL)


def _unpack_jost(y, zeta, x):
    m, mp = complex(y[0], y[1]), complex(y[2], y[3])
    md, mdp = complex(y[4], y[5]), complex(y[6], y[7])
    e = cmath.exp(1j * zeta * x)
    theta = e * m
    theta_p = e * (1j * zeta * m + mp)
    thetadot = e * (1j * x * m + md)
    thetadot_p = e * (1j * x * (1j * zeta * m + mp) + 1j * m + 1j * zeta * md + mdp)
    return theta, theta_p, thetadot, thetadot_p


def jost(
    profile: PotentialProfile,
    zeta,
    *,
    edge: int = 1,
    x_max: float | None = None,
    rtol: float = RTOL,
    check_tail: bool = False,
    tol_tail: float = TOL_TAIL,
) -> JostData:
    """Jost function data theta(0), theta'(0) and their zeta-derivatives.

    With ``check_tail`` the integration is repeated from ``1.5 * x_max`` and
    TailNotConverged is raised if w moves by more than ``tol_tail``.
    """
    z = as_zeta(zeta)
    if z == 0 and not profile.is_zero:
        moment(profile, 1)  # zero energy needs (1 + x)|V| integrable
    else:
        moment(profile, 0)
    xm = default_x_max(profile, z) if x_max is None else float(x_max)
    y, _ = _jost_cached(profile, z, xm, rtol, ())
    w, wp, wd, wpd = _unpack_jost(y, z, 0.0)
    if check_tail and not profile.is_zero:
        y2, _ = _jost_cached(profile, z, 1.5 * xm, rtol, ())
        w2 = complex(y2[0], y2[1])
        if abs(w2 - w) > tol_tail * max(1.0, abs(w)):
            raise TailNotConverged(
                f"w changed by {abs(w2 - w):.3g} when x_max grew {xm:g} -> {1.5 * xm:g}"
            )
    return JostData(w, wp, wd, wpd, edge, z)


def jost_trace(profile: PotentialProfile, zeta, xs, *, x_max: float | None = None, rtol: float = RTOL) -> SolutionTrace:
    """theta(x), theta'(x) sampled at the points ``xs`` (0 <= x <= x_max)."""
    z = as_zeta(zeta)
    grid = np.unique(np.asarray(xs, dtype=float))
    xm = default_x_max(profile, z) if x_max is None else float(x_max)
    xm = max(xm, float(grid[-1]))
    _, states = _jost_cached(profile, z, xm, rtol, tuple(grid.tolist()))
    th = np.empty(grid.size, complex)
    thp = np.empty(grid.size, complex)
    for i, x in enumerate(grid):
        th[i], thp[i], _, _ = _unpack_jost(states[float(x)], z, float(x))
    return SolutionTrace(grid, th, thp, "jost")


def regular(profile: PotentialProfile, zeta, x_max: float, *, n_samples: int = 201, xs=None, rtol: float = RTOL) -> SolutionTrace:
    """Regular solution phi(0)=0, phi'(0)=1 integrated forward to ``x_max``."""
    if not x_max > 0:
        raise ValueError("x_max must be positive")
    z = as_zeta(zeta)
    grid = np.linspace(0.0, x_max, n_samples) if xs is None else np.unique(np.asarray(xs, float))
    x_end = max(float(x_max), float(grid[-1]))
    vf = _flushed(profile.scalar())
    z2 = z * z
    has_breaks = bool(profile.breakpoints)

    def make(start, end):
        v = _clamped(vf, start, end) if has_breaks else vf

        def f(x, y):
            u = complex(y[0], y[1])
            a = (v(x) - z2) * u
            return [y[2], y[3], a.real, a.imag]

        return f

    cuts = sorted({0.0, x_end, *[b for b in profile.breakpoints if 0.0 < b < x_end]})
    segs = list(zip(cuts[:-1], cuts[1:]))
    _, states = _run(make, [0.0, 0.0, 1.0, 0.0], segs, grid.tolist(), rtol, ATOL)
    vals = np.array([complex(states[x][0], states[x][1]) for x in grid.tolist()])
    ders = np.array([complex(states[x][2], states[x][3]) for x in grid.tolist()])
    return SolutionTrace(grid, vals, ders, "regular")


def wronskian_check(profile: PotentialProfile, zeta, x: float) -> complex:
    """theta(x) phi'(x) - theta'(x) phi(x); equals w(zeta) for every x."""
    th = jost_trace(profile, zeta, [x])
    ph = regular(profile, zeta, max(x, 1e-12), xs=[0.0, x])
    i = -1
    return complex(th.theta[0] * ph.derivatives[i] - th.theta_prime[0] * ph.values[i])


def jost_pair(potentials, zeta, **kw) -> tuple[JostData, JostData]:
    return (
        jost(potentials.v1, zeta, edge=1, **kw),
        jost(potentials.v2, zeta, edge=2, **kw),
    )
