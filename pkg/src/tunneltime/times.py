"""Energy derivatives of the transmission amplitude as time parameters."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import OutOfRangeError, UnderflowError
from .scattering import ScatteringAmplitudes, log_amplitude

__all__ = ["TunnelingTimes", "tunneling_times", "central_derivative"]

_UNDERFLOW_LOG = np.log(1e-300)


@dataclass(frozen=True)
class TunnelingTimes:
    """Phase time, amplitude time and their complex combination at kappa0.

    ``tau_w = d(arg A)/d eps`` and ``tau_a = d(ln|A|)/d eps`` with
    ``d eps = v d kappa``. A positive ``tau_w`` delays the transmitted
    packet, a negative one advances it.
    """

    kappa0: float
    epsilon0: float
    tau_w: float
    tau_a: float
    v0: float

    @property
    def tau_c(self) -> complex:
        return complex(self.tau_w, -self.tau_a)

    @property
    def tau_bl(self) -> float:
        return float(np.hypot(self.tau_w, self.tau_a))

    @classmethod
    def free(cls, kappa0: float, mass: float) -> "TunnelingTimes":
        return cls(kappa0=kappa0, epsilon0=0.5 * kappa0**2 / mass, tau_w=0.0,
                   tau_a=0.0, v0=kappa0 / mass)


def central_derivative(f_m2, f_m1, f_p1, f_p2, h, richardson=True):
    """First derivative from a symmetric 5-point stencil.

    Plain central difference with step ``h`` if ``richardson`` is false,
    otherwise one Richardson step combining steps ``h`` and ``2h``.
    """
    d1 = (f_p1 - f_m1) / (2.0 * h)
    if not richardson:
        return d1
    d2 = (f_p2 - f_m2) / (4.0 * h)
    return (4.0 * d1 - d2) / 3.0


def _stencil_from_grid(amps, i):
    k = amps.kappa
    h = k[i + 1] - k[i]
    offsets = k[i - 2:i + 3] - k[i]
    if not np.allclose(offsets, h * np.arange(-2, 3), rtol=1e-9, atol=0):
        return None
    logs = _log_abs(amps, slice(i - 2, i + 3))
    phase = amps.phase[i - 2:i + 3]
    return h, logs, phase


def _log_abs(amps, sl):
    if amps.log_abs_A is not None:
        la = np.asarray(amps.log_abs_A[sl])
    else:
        with np.errstate(divide="ignore"):
            la = np.log(np.abs(amps.A[sl]))
    return la


def tunneling_times(amps: ScatteringAmplitudes, kappa0: float,
                    richardson: bool = True) -> TunnelingTimes:
    """tau_w and tau_a at ``kappa0`` from tabulated amplitudes.

    The stencil step is the local grid spacing. When ``kappa0`` is a grid
    node the tabulated phase and ``ln|A|`` are used directly; between nodes
    the stencil is re-evaluated from the barrier.
    """
    k = amps.kappa
    m = amps.mass
    if not (k[2] <= kappa0 <= k[-3]):
        raise OutOfRangeError(
            f"kappa0={kappa0} must lie in [{k[2]}, {k[-3]}] (two grid points on each side)"
        )
    i = int(np.argmin(np.abs(k - kappa0)))
    on_grid = abs(k[i] - kappa0) <= 1e-12 * max(abs(kappa0), 1.0)
    stencil = _stencil_from_grid(amps, i) if on_grid and 2 <= i <= k.size - 3 else None

    if stencil is None:
        if amps.barrier is None:
            raise OutOfRangeError(
                "kappa0 is not a node of a locally uniform grid and no barrier is attached"
            )
        j = min(max(i, 1), k.size - 2)
        h = 0.5 * (k[j + 1] - k[j - 1])
        ks = kappa0 + h * np.arange(-2, 3)
        logs, wrapped = log_amplitude(amps.barrier, m, ks)
        phase = np.unwrap(wrapped)
    else:
        h, logs, phase = stencil

    if logs[2] < _UNDERFLOW_LOG and amps.log_abs_A is None:
        raise UnderflowError(
            f"|A({kappa0})| is below 1e-300; supply log-scale amplitudes (log_abs_A)"
        )
    if not np.all(np.isfinite(logs)):
        raise UnderflowError(f"ln|A| is not finite near kappa0={kappa0}; supply log_abs_A")

    v0 = kappa0 / m
    dphase = central_derivative(phase[0], phase[1], phase[3], phase[4], h, richardson)
    dlog = central_derivative(logs[0], logs[1], logs[3], logs[4], h, richardson)
    return TunnelingTimes(kappa0=float(kappa0), epsilon0=0.5 * kappa0**2 / m,
                          tau_w=float(dphase / v0), tau_a=float(dlog / v0), v0=float(v0))
