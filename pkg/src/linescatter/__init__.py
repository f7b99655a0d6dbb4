"""Exact two-dimensional scattering by delta-function potentials supported on a line."""

from .errors import (
    GrazingMode,
    IncommensurateFrequencies,
    InvalidPotential,
    InvalidWave,
    NotConverged,
    ScatteringError,
    SingularMatrix,
    SpectralSingularity,
)
from .foldy import closed_form_double, closed_form_single, determinant_scan, solve_amplitude
from .fourier import comb_beams, solve_beams
from .geometry import reduce
from .numerics import bessel_j0, solve_dense
from .potentials import (
    DeltaLineArray,
    FourierLinePotential,
    GeneralLinePotential,
    IncidentWave,
    PeriodicComb,
    comb_to_fourier,
    required_truncation,
    validate,
)

__version__ = "0.1.0"
