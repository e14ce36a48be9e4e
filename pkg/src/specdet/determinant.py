"""Perturbation determinant, trace-formula right-hand side and Levinson constants.

The determinant is always assembled from the pole-free numerator

    N = a th1' th2 - d th1 th2' + b th1' th2' - c th1 th2        (at x = 0)

over the free denominator  Den = (a - d) i zeta - (b zeta^2 + c),  so that
Jost-function zeros (zero-energy resonances, bound states of the Dirichlet
half-line problems) never produce 0/0. The quotient form L * w1 * w2 is kept
as a cross-check.
"""

from __future__ import annotations

import cmath
import logging
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AtUnperturbedPole,
    ExponentMismatch,
    MomentCondition,
    NearSingularLog,
    NonIntegrable,
    ResonantDivision,
)
from .interaction import InteractionMatrix, pole_class
from .potential import EdgePotentials, moment
from .scattering import JostData, as_zeta, jost, jost_pair

log = logging.getLogger(__name__)

RESONANT_W = 1e-13
POLE_TOL = 1e-13
LOG_TOL = 1e-12
RESONANCE_TOL = 1e-8
# zero test for numerically computed classifier quantities (L(0), alphas)
NUMERIC_ZERO_TOL = 1e-8
WARN_BAND = 1e-6
PARAM_ZERO = 1e-12


@dataclass(frozen=True)
class DeterminantValue:
    zeta: complex
    numerator: complex
    denominator: complex
    value: complex
    L: complex | None

    @property
    def pole_of_L(self) -> bool:
        return self.L is None


def numerator(j1: JostData, j2: JostData, m: InteractionMatrix) -> complex:
    return (
        m.a * j1.wp * j2.w
        - m.d * j1.w * j2.wp
        + m.b * j1.wp * j2.wp
        - m.c * j1.w * j2.w
    )


def numerator_derivative(j1: JostData, j2: JostData, m: InteractionMatrix) -> complex:
    return (
        m.a * (j1.wpdot * j2.w + j1.wp * j2.wdot)
        - m.d * (j1.wdot * j2.wp + j1.w * j2.wpdot)
        + m.b * (j1.wpdot * j2.wp + j1.wp * j2.wpdot)
        - m.c * (j1.wdot * j2.w + j1.w * j2.wdot)
    )


def denominator(m: InteractionMatrix, zeta: complex) -> complex:
    return (m.a - m.d) * 1j * zeta - (m.b * zeta * zeta + m.c)


def denominator_derivative(m: InteractionMatrix, zeta: complex) -> complex:
    return (m.a - m.d) * 1j - 2.0 * m.b * zeta


def big_L(j1: JostData, j2: JostData, m: InteractionMatrix) -> complex:
    """Quotient form a r1 - d r2 + b r1 r2 - c with r_j = theta_j'(0)/theta_j(0)."""
    if abs(j1.w) < RESONANT_W or abs(j2.w) < RESONANT_W:
        raise ResonantDivision(f"Jost function vanishes (|w1|={abs(j1.w):.2e}, |w2|={abs(j2.w):.2e})")
    r1, r2 = j1.wp / j1.w, j2.wp / j2.w
    return m.a * r1 - m.d * r2 + m.b * r1 * r2 - m.c


def big_L_derivative(j1: JostData, j2: JostData, m: InteractionMatrix) -> complex:
    if abs(j1.w) < RESONANT_W or abs(j2.w) < RESONANT_W:
        raise ResonantDivision("Jost function vanishes")
    r1, r2 = j1.wp / j1.w, j2.wp / j2.w
    r1d = (j1.wpdot * j1.w - j1.wp * j1.wdot) / j1.w**2
    r2d = (j2.wpdot * j2.w - j2.wp * j2.wdot) / j2.w**2
    return m.a * r1d - m.d * r2d + m.b * (r1d * r2 + r1 * r2d)


def det_value(j1: JostData, j2: JostData, m: InteractionMatrix) -> DeterminantValue:
    zeta = j1.zeta
    den = denominator(m, zeta)
    if abs(den) < POLE_TOL:
        raise AtUnperturbedPole(f"zeta={zeta} is a root of the free denominator")
    num = numerator(j1, j2, m)
    try:
        L = big_L(j1, j2, m)
    except ResonantDivision:
        L = None
    return DeterminantValue(zeta, num, den, num / den, L)


def det_at(potentials: EdgePotentials, m: InteractionMatrix, zeta, **kw) -> DeterminantValue:
    j1, j2 = jost_pair(potentials, as_zeta(zeta), **kw)
    return det_value(j1, j2, m)


def log_derivative(j1: JostData, j2: JostData, m: InteractionMatrix) -> complex:
    """d/dzeta ln D(zeta) via the pole-free numerator."""
    z = j1.zeta
    return numerator_derivative(j1, j2, m) / numerator(j1, j2, m) - denominator_derivative(
        m, z
    ) / denominator(m, z)


def trace_formula_rhs(
    potentials: EdgePotentials,
    m: InteractionMatrix,
    zeta,
    *,
    route: str = "quotient",
    denominator_form: str = "rotated",
    jost_data: tuple[JostData, JostData] | None = None,
) -> complex:
    """-(1/(2 zeta)) d/dzeta ln( w1 w2 L / ((a-d) zeta + (b zeta^2 + c) i) ).

    ``route="quotient"`` differentiates w1, w2 and L separately;
    ``route="numerator"`` uses N'/N with N = L w1 w2. ``denominator_form``
    picks (a-d) zeta + (b zeta^2 + c) i ("rotated") or the determinant's
    (a-d) i zeta - (b zeta^2 + c) ("determinant"); they differ by the constant i.
    """
    z = as_zeta(zeta)
    if z.imag <= 0:
        raise ValueError("trace formula needs Im zeta > 0")
    j1, j2 = jost_data if jost_data is not None else jost_pair(potentials, z)
    if denominator_form == "rotated":
        den = (m.a - m.d) * z + (m.b * z * z + m.c) * 1j
        den_d = m.a - m.d + 2j * z * m.b
    elif denominator_form == "determinant":
        den, den_d = denominator(m, z), denominator_derivative(m, z)
    else:
        raise ValueError(f"unknown denominator_form {denominator_form!r}")
    if abs(den) < LOG_TOL:
        raise NearSingularLog(f"free denominator {abs(den):.2e} at zeta={z}")
    if route == "quotient":
        for label, v in (("w1", j1.w), ("w2", j2.w)):
            if abs(v) < LOG_TOL:
                raise NearSingularLog(f"{label} vanishes at zeta={z}")
        L = big_L(j1, j2, m)
        if abs(L) < LOG_TOL:
            raise NearSingularLog(f"L vanishes at zeta={z}")
        total = j1.wdot / j1.w + j2.wdot / j2.w + big_L_derivative(j1, j2, m) / L
    elif route == "numerator":
        num = numerator(j1, j2, m)
        if abs(num) < LOG_TOL:
            raise NearSingularLog(f"numerator vanishes at zeta={z}")
        total = numerator_derivative(j1, j2, m) / num
    else:
        raise ValueError(f"unknown route {route!r}")
    return -(total - den_d / den) / (2.0 * z)


# --------------------------------------------------------------------------
# zero energy
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class LevinsonConstants:
    """Zero-energy data entering the Levinson case tables.

    ``alpha3`` is the quantity N(0) in the case w2(0) = 0, which decides S;
    ``alpha3_alt`` is the alternative coefficient (c th2 + d th2') th1dot,
    kept for diagnostics only. ``numerator_slope``
    is dN/dzeta at 0, the true linear coefficient when both w_j(0) != 0.
    """

    j1: JostData
    j2: JostData
    resonant: tuple[bool, bool]
    resonance_confirmed: tuple[bool, bool]
    L0: complex | None
    alpha1: complex | None
    alpha2: complex
    alpha3: complex
    alpha3_alt: complex
    alpha4: complex
    numerator_slope: complex
    P: int
    Q: int | None
    R: int
    S: int
    T: int | None
    boundary: tuple[str, ...] = field(default=())

    @property
    def case(self) -> str:
        return {(False, False): "Q", (True, False): "R", (False, True): "S", (True, True): "T"}[
            self.resonant
        ]

    @property
    def X(self) -> int | None:
        return getattr(self, self.case)

    @property
    def predicted_exponent(self) -> int | None:
        return None if self.X is None else self.X - self.P

    @property
    def indeterminate(self) -> bool:
        return bool(self.boundary) or self.X is None

    def ledger(self) -> dict:
        c = lambda v: None if v is None else [v.real, v.imag]  # noqa: E731
        return {
            "P": self.P,
            "Q": self.Q,
            "R": self.R,
            "S": self.S,
            "T": self.T,
            "case": self.case,
            "X": self.X,
            "w1_0": c(self.j1.w),
            "w2_0": c(self.j2.w),
            "resonant": list(self.resonant),
            "resonance_confirmed": list(self.resonance_confirmed),
            "L0": c(self.L0),
            "alpha1": c(self.alpha1),
            "alpha2": c(self.alpha2),
            "alpha3": c(self.alpha3),
            "alpha3_alt": c(self.alpha3_alt),
            "alpha4": c(self.alpha4),
            "numerator_slope": c(self.numerator_slope),
            "boundary": list(self.boundary),
        }


def _sign_flip_confirms(profile, perturbation=1e-6) -> bool:
    w_lo = jost(profile.scaled(1.0 - perturbation), 0.0).w.real
    w_hi = jost(profile.scaled(1.0 + perturbation), 0.0).w.real
    return w_lo * w_hi < 0


def levinson_constants(
    potentials: EdgePotentials,
    m: InteractionMatrix,
    *,
    resonance_tol: float = RESONANCE_TOL,
    zero_tol: float = NUMERIC_ZERO_TOL,
    warn_band: float = WARN_BAND,
) -> LevinsonConstants:
    for p in potentials:
        try:
            moment(p, 1)
        except NonIntegrable as exc:
            raise MomentCondition(f"first moment of {p.family} potential diverges") from exc
    j1, j2 = jost_pair(potentials, 0.0)
    t1, t1p, t1d = j1.w.real, j1.wp.real, j1.wdot
    t2, t2p, t2d = j2.w.real, j2.wp.real, j2.wdot
    a, b, c, d = m.a, m.b, m.c, m.d
    resonant = (abs(t1) < resonance_tol, abs(t2) < resonance_tol)
    confirmed = tuple(
        r and _sign_flip_confirms(p) for r, p in zip(resonant, potentials)
    )
    boundary = []
    for label, v in (("w1(0)", t1), ("w2(0)", t2)):
        if resonance_tol <= abs(v) < warn_band:
            boundary.append(f"{label}={v:.3g} near a zero-energy resonance")
    for j, (r, ok) in enumerate(zip(resonant, confirmed), start=1):
        if r and not ok:
            log.warning("w%d(0) below resonance_tol but no sign change under depth perturbation", j)

    def vanishes(label, v, applies=True):
        if applies and zero_tol <= abs(v) < warn_band:
            boundary.append(f"classifier quantity {label}={abs(v):.3g} in warning band")
        return abs(v) < zero_tol

    L0 = alpha1 = None
    if not any(resonant):
        L0 = a * t1p / t1 - d * t2p / t2 + b * t1p * t2p / (t1 * t2) - c
        alpha1 = (b * (t1p / t2 + t2p / t1) - a * t2 / t1 + d * t1 / t2) * 1j
    alpha2 = a * t1p * t2 + b * t1p * t2p
    alpha3 = b * t1p * t2p - d * t1 * t2p
    alpha3_alt = (c * t2 + d * t2p) * t1d
    alpha4 = a * t1p * t2d - d * t1d * t2p
    slope = numerator_derivative(j1, j2, m)

    P = pole_class(m)
    case = {(False, False): "Q", (True, False): "R", (False, True): "S", (True, True): "T"}[resonant]
    b_nonzero, c_nonzero = abs(b) > PARAM_ZERO, abs(c) > PARAM_ZERO
    Q = None
    if case == "Q":
        if not vanishes("L(0)", L0):
            Q = 0
        elif not vanishes("alpha1", alpha1):
            Q = 1
        elif b_nonzero:
            Q = 2
        if abs(L0) < zero_tol and (abs(alpha1) < zero_tol) != (abs(slope) < zero_tol):
            log.warning("alpha1 and dN/dzeta(0) disagree on vanishing; Q may be misclassified")
    R = 1 if vanishes("alpha2", alpha2, case == "R") else 0
    S = 1 if vanishes("alpha3", alpha3, case == "S") else 0
    if b_nonzero:
        T = 0
    elif not vanishes("alpha4", alpha4, case == "T"):
        T = 1
    else:
        T = 2 if c_nonzero else None
    return LevinsonConstants(
        j1, j2, resonant, confirmed, L0, alpha1, alpha2, alpha3, alpha3_alt, alpha4,
        slope, P, Q, R, S, T, tuple(boundary),
    )


@dataclass(frozen=True)
class ExponentFit:
    predicted: int | None
    empirical: float
    kappas: np.ndarray
    abs_D: np.ndarray

    @property
    def mismatch(self) -> float:
        return math.inf if self.predicted is None else abs(self.empirical - self.predicted)


def fit_loglog_slope(x, y) -> float:
    x, y = np.asarray(x, float), np.asarray(y, float)
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def low_energy_exponent(
    potentials: EdgePotentials,
    m: InteractionMatrix,
    kappas=None,
    *,
    constants: LevinsonConstants | None = None,
) -> ExponentFit:
    """Predicted zero-energy order X - P of D against a log-log fit of |D(i kappa)|."""
    if kappas is None:
        kappas = np.logspace(-4, -2, 9)
    kappas = np.asarray(kappas, float)
    lc = constants if constants is not None else levinson_constants(potentials, m)
    absd = np.array([abs(det_at(potentials, m, 1j * k).value) for k in kappas])
    fit = ExponentFit(lc.predicted_exponent, fit_loglog_slope(kappas, absd), kappas, absd)
    if fit.mismatch > 0.1:
        warnings.warn(
            f"low-energy exponent: predicted {fit.predicted}, fitted {fit.empirical:.3f}",
            ExponentMismatch,
            stacklevel=2,
        )
    return fit


@dataclass(frozen=True)
class HighEnergyFit:
    kappas: np.ndarray
    deviations: np.ndarray
    exponent: float | None


def high_energy_check(potentials: EdgePotentials, m: InteractionMatrix, kappa_list) -> HighEnergyFit:
    """|D(i kappa) - 1| along the imaginary axis with a fitted power law."""
    kappas = np.asarray(kappa_list, float)
    if np.any(np.diff(kappas) <= 0):
        raise ValueError("kappa values must be increasing")
    dev = np.array([abs(det_at(potentials, m, 1j * k).value - 1.0) for k in kappas])
    exponent = None
    if np.all(dev > 1e-13):
        exponent = fit_loglog_slope(kappas, dev)
    return HighEnergyFit(kappas, dev, exponent)


def finite_difference_rhs(potentials: EdgePotentials, m: InteractionMatrix, zeta, h: float = 1e-5) -> complex:
    """-(1/(2 zeta)) (ln D(zeta+h) - ln D(zeta-h)) / (2h), branch taken locally."""
    z = as_zeta(zeta)
    dp = det_at(potentials, m, z + h).value
    dm = det_at(potentials, m, z - h).value
    return -cmath.log(dp / dm) / (2 * h) / (2 * z)
