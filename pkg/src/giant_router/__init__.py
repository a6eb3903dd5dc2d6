"""Single-photon scattering through a driven giant atom joining semi-infinite
coupled-resonator waveguides: closed-form amplitudes, an exact lattice
solver, and spectrum analysis."""
from .analytic import (
    PhasePrediction,
    ScatteringSolution,
    amplitudes,
    offset_coupling_amplitudes,
    phase_prediction,
    three_channel_amplitudes,
    two_channel_amplitudes,
)
from .core import (
    LabFrameParams,
    ModeCoordinate,
    RouterConfig,
    Transition,
    WaveguideSpec,
    dispersion_energy,
    effective_potentials,
    reduce_to_rotating_frame,
    wavenumber_from_energy,
)
from .errors import (
    AnalyticAssumptionError,
    BandEdgeError,
    ConfigError,
    FluxViolationError,
    NumericalDegeneracyError,
    RouterError,
    SingularPotentialError,
)

__version__ = "0.1.0"
