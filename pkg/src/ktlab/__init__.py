"""ktlab: decay rates of operator semigroups on exactly solvable models.

The package computes resolvent norms, the decay observable
``||T(t) A R(1, A)||``, the functional calculus ``hat_mu(T)`` for bounded
measures, minimal dominating functions and their inverses, and checks the
corresponding rate bounds numerically.
"""

from ._kernels import backend
from .dominating import (
    FrequencyGrid,
    SampledMonotoneFunction,
    TimeGrid,
    minimal_m,
    minimal_omega,
    omega_star,
    right_inverse,
)
from .measures import (
    BoundedMeasure,
    convolve,
    dirac,
    exp_density,
    fourier,
    kt_measure,
    laplace,
    parse_measure,
    total_variation,
)
from .operators import (
    DiagonalOperator,
    MatrixOperator,
    hat_mu,
    kt_observable,
    mu_observable,
    polynomial_profile,
    propagator_norm,
    resolvent_norm,
)
from .verify import RateFitReport

__version__ = "0.1.0"

__all__ = [
    "backend", "FrequencyGrid", "TimeGrid", "SampledMonotoneFunction", "minimal_m",
    "minimal_omega", "omega_star", "right_inverse", "BoundedMeasure", "convolve", "dirac",
    "exp_density", "fourier", "kt_measure", "laplace", "parse_measure", "total_variation",
    "DiagonalOperator", "MatrixOperator", "hat_mu", "kt_observable", "mu_observable",
    "polynomial_profile", "propagator_norm", "resolvent_norm", "RateFitReport",
]
