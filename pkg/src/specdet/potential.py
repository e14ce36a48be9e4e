"""Edge potentials V_1, V_2 on the two half-lines and their decay moments.

Each half-line carries a real potential from a small set of families. Besides
pointwise evaluation, the profiles expose what the ODE and quadrature layers
need: a fast scalar callable, discontinuity locations, and a support hint
beyond which |V| is negligible.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable

import numpy as np
from scipy import integrate, special

from .errors import InvalidPotential, NonIntegrable

FAMILIES = ("zero", "square_well", "exponential", "gaussian", "tabulated")

QUAD_ABS_TOL = 1e-10
# moment() refuses profiles whose neglected tail exceeds this
TAIL_BOUND = 1e-6


@dataclass(frozen=True)
class PotentialProfile:
    """One half-line potential.

    Only the fields belonging to ``family`` are meaningful:

    * ``square_well``: ``depth`` (the value of V inside) and ``width``
    * ``exponential``: ``amplitude * exp(-rate * x)``
    * ``gaussian``: ``amplitude * exp(-(x - center)**2 / (2 sigma**2))``
    * ``tabulated``: samples ``grid_x``, ``grid_v``; linear inside, zero outside
    """

    family: str = "zero"
    depth: float = 0.0
    width: float = 0.0
    amplitude: float = 0.0
    rate: float = 0.0
    center: float = 0.0
    sigma: float = 0.0
    grid_x: tuple[float, ...] = ()
    grid_v: tuple[float, ...] = ()
    support_hint: float | None = field(default=None)

    def __post_init__(self):
        problems = validate_profile(self)
        if problems:
            raise InvalidPotential("; ".join(problems))
        if self.support_hint is None:
            object.__setattr__(self, "support_hint", _default_support(self))

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls) -> PotentialProfile:
        return cls("zero")

    @classmethod
    def square_well(cls, depth: float, width: float) -> PotentialProfile:
        return cls("square_well", depth=float(depth), width=float(width))

    @classmethod
    def exponential(cls, amplitude: float, rate: float) -> PotentialProfile:
        return cls("exponential", amplitude=float(amplitude), rate=float(rate))

    @classmethod
    def gaussian(cls, amplitude: float, center: float, sigma: float) -> PotentialProfile:
        return cls("gaussian", amplitude=float(amplitude), center=float(center), sigma=float(sigma))

    @classmethod
    def tabulated(cls, x, v) -> PotentialProfile:
        return cls(
            "tabulated",
            grid_x=tuple(float(t) for t in x),
            grid_v=tuple(float(t) for t in v),
        )

    @classmethod
    def from_csv(cls, path: str | Path) -> PotentialProfile:
        """Load a two-column (x, V) table; a non-numeric first row is a header."""
        xs, vs = [], []
        with open(path, newline="") as fh:
            for row in csv.reader(fh):
                if not row or row[0].lstrip().startswith("#"):
                    continue
                try:
                    x, v = float(row[0]), float(row[1])
                except ValueError:
                    if not xs:
                        continue
                    raise InvalidPotential(f"{path}: malformed row {row!r}")
                xs.append(x)
                vs.append(v)
        return cls.tabulated(xs, vs)

    # -- evaluation ---------------------------------------------------------
    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.family == "zero":
            return np.zeros_like(x)
        if self.family == "square_well":
            return np.where(x < self.width, self.depth, 0.0)
        if self.family == "exponential":
            return self.amplitude * np.exp(-self.rate * x)
        if self.family == "gaussian":
            return self.amplitude * np.exp(-0.5 * ((x - self.center) / self.sigma) ** 2)
        gx = np.asarray(self.grid_x)
        return np.interp(x, gx, np.asarray(self.grid_v), left=0.0, right=0.0)

    def scalar(self) -> Callable[[float], float]:
        """Plain-float V(x) for ODE right-hand sides (avoids numpy overhead)."""
        if self.family == "zero":
            return lambda x: 0.0
        if self.family == "square_well":
            depth, width = self.depth, self.width
            return lambda x: depth if x < width else 0.0
        if self.family == "exponential":
            amp, rate, exp = self.amplitude, self.rate, math.exp
            return lambda x: amp * exp(-rate * x)
        if self.family == "gaussian":
            amp, c, s, exp = self.amplitude, self.center, self.sigma, math.exp
            return lambda x: amp * exp(-0.5 * ((x - c) / s) ** 2)
        gx, gv = np.asarray(self.grid_x), np.asarray(self.grid_v)
        lo, hi = gx[0], gx[-1]

        def tab(x):
            if x < lo or x > hi:
                return 0.0
            return float(np.interp(x, gx, gv))

        return tab

    @property
    def is_zero(self) -> bool:
        if self.family == "zero":
            return True
        if self.family == "square_well":
            return self.depth == 0.0
        if self.family in ("exponential", "gaussian"):
            return self.amplitude == 0.0
        return not any(self.grid_v)

    @property
    def breakpoints(self) -> tuple[float, ...]:
        """Points where V jumps; ODE integration restarts there."""
        if self.family == "square_well":
            return (self.width,)
        if self.family == "tabulated":
            pts = []
            if self.grid_v[0] != 0.0 and self.grid_x[0] > 0.0:
                pts.append(self.grid_x[0])
            if self.grid_v[-1] != 0.0:
                pts.append(self.grid_x[-1])
            return tuple(pts)
        return ()

    @property
    def sup_abs(self) -> float:
        if self.family == "zero":
            return 0.0
        if self.family == "square_well":
            return abs(self.depth)
        if self.family in ("exponential", "gaussian"):
            return abs(self.amplitude)
        return max(abs(v) for v in self.grid_v)

    def scaled(self, factor: float) -> PotentialProfile:
        """Same shape with the coupling multiplied by ``factor``."""
        if self.family == "square_well":
            return replace(self, depth=self.depth * factor)
        if self.family in ("exponential", "gaussian"):
            return replace(self, amplitude=self.amplitude * factor)
        if self.family == "tabulated":
            return replace(self, grid_v=tuple(v * factor for v in self.grid_v))
        return self

    def to_dict(self) -> dict:
        keys = {
            "zero": (),
            "square_well": ("depth", "width"),
            "exponential": ("amplitude", "rate"),
            "gaussian": ("amplitude", "center", "sigma"),
            "tabulated": (),
        }[self.family]
        out = {"family": self.family, **{k: getattr(self, k) for k in keys}}
        if self.family == "tabulated":
            out["n_samples"] = len(self.grid_x)
        out["support_hint"] = self.support_hint
        return out


@dataclass(frozen=True)
class EdgePotentials:
    v1: PotentialProfile
    v2: PotentialProfile

    def __iter__(self):
        return iter((self.v1, self.v2))

    def __getitem__(self, j: int) -> PotentialProfile:
        return (self.v1, self.v2)[j]

    @property
    def is_zero(self) -> bool:
        return self.v1.is_zero and self.v2.is_zero

    @classmethod
    def free(cls) -> EdgePotentials:
        return cls(PotentialProfile.zero(), PotentialProfile.zero())


def validate_profile(p: PotentialProfile) -> list[str]:
    """Return human-readable invariant violations (empty when valid)."""
    if p.family not in FAMILIES:
        return [f"unknown potential family {p.family!r}"]
    numbers = [p.depth, p.width, p.amplitude, p.rate, p.center, p.sigma]
    if not all(math.isfinite(v) for v in numbers):
        return ["non-finite potential parameter"]
    problems = []
    if p.family == "square_well" and not p.width > 0:
        problems.append("square_well width must be positive")
    if p.family == "exponential" and not p.rate > 0:
        problems.append("exponential rate must be positive")
    if p.family == "gaussian" and not p.sigma > 0:
        problems.append("gaussian sigma must be positive")
    if p.family == "tabulated":
        xs, vs = p.grid_x, p.grid_v
        if len(xs) < 2 or len(xs) != len(vs):
            problems.append("tabulated grid needs at least two (x, V) samples")
        elif not all(math.isfinite(t) for t in xs + vs):
            problems.append("non-finite tabulated sample")
        else:
            if xs[0] < 0:
                problems.append("tabulated grid must satisfy x >= 0")
            if any(b <= a for a, b in zip(xs, xs[1:])):
                problems.append("grid not increasing")
    if p.support_hint is not None and not (math.isfinite(p.support_hint) and p.support_hint > 0):
        problems.append("support_hint must be positive and finite")
    return problems


def _default_support(p: PotentialProfile) -> float:
    if p.family == "square_well":
        return p.width
    if p.family == "exponential":
        return 40.0 / p.rate
    if p.family == "gaussian":
        return max(p.center + 10.0 * p.sigma, 10.0 * p.sigma)
    if p.family == "tabulated":
        return p.grid_x[-1]
    return 1.0


def evaluate(p: PotentialProfile, x: float) -> float:
    """V(x) for x >= 0."""
    if x < 0:
        raise ValueError("potential is defined on x >= 0 only")
    return float(p(x))


def _tail(p: PotentialProfile, order: int, s: float) -> float:
    """Closed-form integral of x**order * |V(x)| over [s, inf)."""
    if p.family == "exponential":
        amp, r = abs(p.amplitude), p.rate
        e = math.exp(-r * s)
        return amp * e / r if order == 0 else amp * e * (s / r + 1.0 / r**2)
    if p.family == "gaussian":
        amp, c, sg = abs(p.amplitude), p.center, p.sigma
        u = (s - c) / (sg * math.sqrt(2.0))
        base = sg * math.sqrt(math.pi / 2.0) * special.erfc(u)
        if order == 0:
            return amp * base
        return amp * (sg**2 * math.exp(-u * u) + c * base)
    return 0.0


def moment(p: PotentialProfile, order: int = 0, *, tail_bound: float = TAIL_BOUND) -> float:
    """Integral of x**order * |V(x)| over the half-line.

    Adaptive quadrature up to the support hint plus an analytic tail for the
    exponential and gaussian families.
    """
    if order not in (0, 1):
        raise ValueError("moment order must be 0 or 1")
    if p.is_zero:
        return 0.0
    s = float(p.support_hint)
    if p.family == "square_well":
        # exact, no quadrature needed for a constant on [0, width]
        w = p.width
        return abs(p.depth) * (w if order == 0 else 0.5 * w * w)
    f = lambda x: x**order * abs(p(x)) if order else abs(p(x))  # noqa: E731
    pts = None
    if p.family == "tabulated":
        pts = [x for x in p.grid_x if 0 < x < s][:48] or None
    elif p.family == "gaussian" and 0 < p.center < s:
        pts = [p.center]
    val, err = integrate.quad(f, 0.0, s, points=pts, epsabs=QUAD_ABS_TOL, epsrel=1e-12, limit=500)
    tail = _tail(p, order, s)
    if not (math.isfinite(val) and math.isfinite(tail)) or tail > tail_bound:
        raise NonIntegrable(
            f"{p.family}: tail beyond support_hint={s:g} is {tail:.3g} (bound {tail_bound:g})"
        )
    return float(val + tail)
