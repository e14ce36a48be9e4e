"""Perturbation determinants, trace formulas and Levinson counting for two
half-lines joined by a generalized point interaction."""

from .determinant import (
    DeterminantValue,
    LevinsonConstants,
    big_L,
    det_at,
    det_value,
    high_energy_check,
    levinson_constants,
    low_energy_exponent,
    trace_formula_rhs,
)
from .interaction import InteractionMatrix, pole_class, preset, unperturbed_poles
from .potential import EdgePotentials, PotentialProfile, evaluate, moment
from .resolvent import (
    DiscretizedOperator,
    KreinCoefficients,
    discretize,
    krein_lambdas,
    resolvent_kernel,
    trace_difference,
    trace_norm_decay,
)
from .scattering import JostData, SolutionTrace, Wavenumber, jost, regular, wronskian_check
from .spectrum import (
    PhaseCurve,
    SpectralReport,
    find_eigenvalues,
    levinson_check,
    phase_shift,
    spectral_shift,
    tune_resonance,
    winding_number,
)

__all__ = [name for name in dir() if not name.startswith("_")]
