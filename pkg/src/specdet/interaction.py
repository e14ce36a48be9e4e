"""Generalized point interaction at the junction of the two half-lines.

The matching condition is

    (psi_1(0), psi_1'(0))^T = exp(i phi) [[a, b], [c, d]] (psi_2(0), psi_2'(0))^T,

with real a, b, c, d and ad - bc = -1. Any such matrix is accepted; no further
"properly connecting" test is applied.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .errors import InvalidInteraction, SingularPreset, UnclassifiablePole

DET_TOL = 1e-12
ZERO_TOL = 1e-12
# classifier inputs inside (ZERO_TOL, WARN_BAND) make the Levinson integers fragile
WARN_BAND = 1e-6


@dataclass(frozen=True)
class InteractionMatrix:
    phi: float
    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        problems = interaction_problems(self)
        if problems:
            raise InvalidInteraction("; ".join(problems))

    @property
    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    def with_phi(self, phi: float) -> InteractionMatrix:
        return InteractionMatrix(phi, self.a, self.b, self.c, self.d)

    def to_dict(self) -> dict:
        return asdict(self)


def interaction_problems(m) -> list[str]:
    vals = (m.phi, m.a, m.b, m.c, m.d)
    if not all(math.isfinite(v) for v in vals):
        return ["non-finite interaction parameter"]
    problems = []
    if not -math.pi / 2 - 1e-15 <= m.phi <= math.pi / 2 + 1e-15:
        problems.append(f"phi={m.phi} outside [-pi/2, pi/2]")
    if abs(m.a * m.d - m.b * m.c + 1.0) > DET_TOL:
        problems.append(f"determinant-constraint violated: ad-bc={m.a * m.d - m.b * m.c!r} != -1")
    return problems


def preset(name: str, *params: float, phi: float = 0.0) -> InteractionMatrix:
    """Named interaction families.

    ``delta(alpha)``, ``delta_prime(beta)``, ``kirchhoff``, ``density(sigma)``
    for -D(1 + sigma delta)D, and ``delta_delta1(sigma1, sigma2)`` for
    sigma1 delta + sigma2 delta^(1).
    """
    key = name.lower().replace("-", "_").replace("'", "_prime")
    expected = {"kirchhoff": 0, "delta": 1, "delta_prime": 1, "density": 1, "delta_delta1": 2}
    if key not in expected:
        raise InvalidInteraction(f"unknown preset {name!r}")
    if len(params) != expected[key]:
        raise InvalidInteraction(f"preset {key} takes {expected[key]} parameter(s), got {len(params)}")
    p = [float(v) for v in params]
    if key == "kirchhoff":
        return InteractionMatrix(phi, 1.0, 0.0, 0.0, -1.0)
    if key == "delta":
        return InteractionMatrix(phi, 1.0, 0.0, p[0], -1.0)
    if key == "delta_prime":
        return InteractionMatrix(phi, -1.0, p[0], 0.0, 1.0)
    if key == "density":
        return InteractionMatrix(phi, 1.0, -p[0], 0.0, -1.0)
    s1, s2 = p
    if abs(abs(s2) - 2.0) < ZERO_TOL:
        raise SingularPreset(f"singular preset: delta_delta1 needs |sigma2| != 2, got {s2}")
    return InteractionMatrix(
        phi,
        (2.0 + s2) / (2.0 - s2),
        0.0,
        4.0 * s1 / (4.0 - s2 * s2),
        -(2.0 - s2) / (2.0 + s2),
    )


def is_zero(value: complex, tol: float = ZERO_TOL) -> bool:
    return abs(value) <= tol


def in_warning_band(value: complex, tol: float = ZERO_TOL, band: float = WARN_BAND) -> bool:
    return tol < abs(value) < band


def pole_class(m: InteractionMatrix) -> int:
    """Order P of the pole of the determinant denominator at zeta = 0."""
    if not is_zero(m.c):
        return 0
    if not is_zero(m.a - m.d):
        return 1
    if not is_zero(m.b):
        return 2
    raise UnclassifiablePole("c = 0, a - d = 0 and b = 0 cannot satisfy ad - bc = -1")


def parameter_warnings(m: InteractionMatrix) -> list[str]:
    """Classifier inputs of P that are nearly, but not exactly, zero."""
    out = []
    for label, v in (("c", m.c), ("a-d", m.a - m.d), ("b", m.b)):
        if in_warning_band(v):
            out.append(f"classifier quantity {label}={v:.3g} in warning band")
    return out


def unperturbed_poles(m: InteractionMatrix) -> list[float]:
    """kappa > 0 with (a-d) i zeta - (b zeta^2 + c) = 0 at zeta = i kappa.

    These are the negative eigenvalues -kappa^2 of the free operator, i.e.
    the poles of the perturbation determinant on the imaginary axis.
    """
    # b k^2 - (a - d) k - c = 0
    A, B, C = m.b, -(m.a - m.d), -m.c
    if is_zero(A):
        if is_zero(B):
            return []
        roots = [-C / B]
    else:
        disc = B * B - 4 * A * C
        if disc < 0:
            return []
        s = math.sqrt(disc)
        # stable quadratic roots
        q = -0.5 * (B + math.copysign(s, B)) if B != 0 else 0.5 * s
        roots = [q / A, C / q] if q != 0 else [s / (2 * A), -s / (2 * A)]
    return sorted(r for r in roots if r > 0)
