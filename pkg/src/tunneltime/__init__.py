"""Tunnelling-time observables of wave packets crossing 1D barriers.

Units have hbar = 1. Typical use::

    from tunneltime import make_rectangular, transmission_amplitudes, tunneling_times
    b = make_rectangular(1.0, 2.0)
    amps = transmission_amplitudes(b, 1.0, np.linspace(0.5, 1.5, 2001))
    tt = tunneling_times(amps, 1.0)
"""

from .errors import (
    ConfigurationError,
    GridTooCoarseError,
    InvalidParameterError,
    NormalizationError,
    NotAsymptoticError,
    OutOfRangeError,
    ResolutionError,
    TunnelTimeError,
    UnderflowError,
)
from .potential import Barrier, evaluate, make_piecewise, make_rectangular, make_sampled
from .scattering import (
    ScatteringAmplitudes,
    amplitude,
    default_kappa_grid,
    rectangular_closed_form,
    transmission_amplitudes,
)
from .times import TunnelingTimes, tunneling_times
from .wigner import (
    GaussianWignerState,
    StepTestDistribution,
    first_moment,
    free_marginal,
    moments,
    phase_space_grid,
)
from .asymptotics import (
    Propagator,
    ShiftObservables,
    TransmittedDistribution,
    gaussian_first_order,
    half_height_shift,
    peak_position,
    shift_observables,
    sign_change_time,
    transmission_propagator,
    transmitted_exact,
    transmitted_first_order,
)
from .oracle import (
    EvolutionSetup,
    evolve,
    free_evolution,
    momentum_resolved_transmission,
    transmitted_observables,
)

__version__ = "0.1.0"
