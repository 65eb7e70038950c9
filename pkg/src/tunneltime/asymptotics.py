"""Large-time transmitted distributions and their shift observables.

The transmission propagator is

    T(r, p) = int dsigma / (2 pi) exp(-i sigma r) A(p + sigma/2) conj(A(p - sigma/2))

with the 1/(2 pi) that makes the free limit an exact delta function. For
large ``|sigma|`` the integrand tends to ``1 - 4 i W / sigma`` with
``W = m * int V dq``, i.e. ``T`` contains ``delta(r)`` plus a jump at
``r = 0``. Both are removed analytically before the FFT (the jump through
the causal model ``-4 W exp(-2 W r)``, ``r > 0``); only a remainder that
decays like ``sigma**-3`` is transformed numerically.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .errors import InvalidParameterError, OutOfRangeError, ResolutionError
from .scattering import ScatteringAmplitudes
from .times import TunnelingTimes, tunneling_times
from .wigner import GaussianWignerState, StepTestDistribution

__all__ = [
    "Propagator",
    "TransmittedDistribution",
    "ShiftObservables",
    "transmission_propagator",
    "transmitted_exact",
    "transmitted_first_order",
    "gaussian_first_order",
    "shift_observables",
    "half_height_shift",
    "sign_change_time",
    "peak_position",
]

_MAX_FFT = 1 << 22


@dataclass(frozen=True, eq=False)
class Propagator:
    """T(r, p) sampled on a uniform r grid; the delta at r = 0 sits in one bin."""

    p: float
    r: np.ndarray
    values: np.ndarray
    sigma_max: float
    imag_residue: float

    @property
    def dr(self) -> float:
        return float(self.r[1] - self.r[0])

    def integral(self) -> float:
        return float(np.sum(self.values) * self.dr)


@dataclass(frozen=True, eq=False)
class TransmittedDistribution:
    t: float
    q: np.ndarray
    values: np.ndarray
    method: str
    abs_a2: float
    times: TunnelingTimes

    def integral(self) -> float:
        return float(np.trapezoid(self.values, self.q))

    def peak(self) -> float:
        return peak_position(self.q, self.values)

    def mean(self) -> float:
        return float(np.trapezoid(self.q * self.values, self.q) / self.integral())

    def variance(self) -> float:
        mu = self.mean()
        return float(np.trapezoid((self.q - mu) ** 2 * self.values, self.q) / self.integral())


@dataclass(frozen=True)
class ShiftObservables:
    t: float
    tau0: float
    zeta: float
    delta_q_peak: float
    tau_h: float
    half_height_shift: float


def peak_position(q, values) -> float:
    """Location of the maximum, refined by a parabola through three points."""
    q = np.asarray(q, dtype=float)
    y = np.asarray(values, dtype=float)
    i = int(np.argmax(y))
    if i == 0 or i == y.size - 1:
        return float(q[i])
    y0, y1, y2 = y[i - 1], y[i], y[i + 1]
    curv = y0 - 2.0 * y1 + y2
    if curv == 0:
        return float(q[i])
    h = q[i + 1] - q[i]
    return float(q[i] + 0.5 * h * (y0 - y2) / curv)


# -- propagator --------------------------------------------------------


def _default_sigma_max(amps, p):
    b = amps.barrier
    w = amps.mass * b.area()
    return 400.0 * max(1.0, w, np.sqrt(2.0 * amps.mass * b.v_max), abs(p))


def _propagator_on_window(amps, p, sigma_max, r_max):
    dr = 2.0 * np.pi / sigma_max
    n = 1 << int(np.ceil(np.log2(max(2.0 * r_max / dr, 1024))))
    if n > _MAX_FFT:
        raise ResolutionError(
            f"{n} FFT points needed for sigma_max={sigma_max:g}, r_max={r_max:g}",
            required_sigma_max=sigma_max,
        )
    j = np.arange(n) - n // 2
    dsigma = sigma_max / n
    sigma = j * dsigma
    r = j * dr

    G = amps.evaluate(p + 0.5 * sigma) * np.conj(amps.evaluate(p - 0.5 * sigma))
    w = amps.mass * amps.barrier.area()
    model = -4j * w / (sigma + 2j * w) if w > 0 else np.zeros(n)
    res = G - 1.0 - model
    # the unpaired -sigma_max/2 sample: keep only its Hermitian part
    res[0] = res[0].real

    T = np.fft.fftshift(np.fft.fft(np.fft.ifftshift(res))) * dsigma / (2.0 * np.pi)
    imag = float(np.max(np.abs(T.imag)))
    T = T.real.copy()
    centre = n // 2
    if w > 0:
        pos = r > 0
        tail = -4.0 * w * np.exp(-2.0 * w * r[pos])
        T[pos] += tail
        # r = 0 bin carries the rest of the model's integral (which is -2)
        T[centre] += (-2.0 - tail.sum() * dr) / dr
    T[centre] += 1.0 / dr
    return r, T, imag


def transmission_propagator(amps: ScatteringAmplitudes, p: float, *,
                            sigma_max: Optional[float] = None,
                            r_max: Optional[float] = None,
                            dr: Optional[float] = None,
                            tail_tol: float = 1e-10) -> Propagator:
    """T(r, p) on ``r = k * 2 pi / sigma_max``, ``|r| <= r_max``.

    ``dr`` requests an r resolution; it must not be finer than
    ``2 pi / sigma_max``. Without ``r_max`` the window doubles until the
    tail of T drops below ``tail_tol`` times its maximum.
    """
    if amps.barrier is None:
        raise InvalidParameterError("the propagator needs amplitudes built from a barrier")
    k = amps.kappa
    if not (k[0] <= p <= k[-1]):
        raise OutOfRangeError(f"p={p} is outside the momentum grid [{k[0]}, {k[-1]}]")
    if dr is not None:
        if sigma_max is None:
            sigma_max = 2.0 * np.pi / dr
        elif dr < 2.0 * np.pi / sigma_max * (1.0 - 1e-12):
            raise ResolutionError(
                f"dr={dr:g} is finer than 2*pi/sigma_max={2 * np.pi / sigma_max:g}; "
                f"needs sigma_max >= {2 * np.pi / dr:g}",
                required_sigma_max=2.0 * np.pi / dr,
            )
    if sigma_max is None:
        sigma_max = _default_sigma_max(amps, p)

    if r_max is not None:
        r, T, imag = _propagator_on_window(amps, p, sigma_max, r_max)
    else:
        r_try = 64.0
        while True:
            r, T, imag = _propagator_on_window(amps, p, sigma_max, r_try)
            edge = r > 0.9 * r[-1]
            if np.max(np.abs(T[edge])) < tail_tol * np.max(np.abs(T)):
                break
            if 2 * r.size > _MAX_FFT:
                warnings.warn("propagator tail did not decay inside the largest r window",
                              stacklevel=2)
                break
            r_try *= 2.0
    rel_imag = imag / np.max(np.abs(T))
    return Propagator(p=float(p), r=r, values=T, sigma_max=float(sigma_max),
                      imag_residue=float(rel_imag))


# -- exact transmitted distribution --------------------------------------


def _check_packet_on_grid(amps, s):
    lo, hi = s.p0 - 8.0 * s.dp0, s.p0 + 8.0 * s.dp0
    if lo < amps.kappa[0] or hi > amps.kappa[-1]:
        raise OutOfRangeError(
            f"packet momenta [{lo:g}, {hi:g}] are not covered by the grid "
            f"[{amps.kappa[0]:g}, {amps.kappa[-1]:g}]"
        )


def _warn_if_early(s, t):
    if t <= s.clearing_time():
        warnings.warn(
            f"t={t:g} is before the clearing time {s.clearing_time():g}; "
            "the asymptotic distribution may not apply yet", stacklevel=3)


def _abs_a2(amps, p0):
    return float(np.abs(amps.evaluate(np.array([p0]))[0]) ** 2)


def _exact_values(amps, s, t, q, refine=1.0):
    m = s.mass
    q = np.asarray(q, dtype=float)
    Q = s.center(t)
    dq = s.width(t)
    # sigma: exp(-sigma^2 dq0^2 / 2) is below 1e-19 at the cutoff
    sig_cut = 9.5 / s.dq0 * (1.0 + 0.25 * (refine - 1.0))
    span = float(np.max(np.abs(q - Q))) + 12.0 * dq
    dsig = np.pi / span / refine
    ns = int(np.ceil(sig_cut / dsig))
    sigma = np.arange(0, ns + 1) * dsig
    # p: Gaussian cut at 9.5 dp0; step resolves exp(-i sigma p t / m)
    p_cut = 9.5 * s.dp0 * (1.0 + 0.25 * (refine - 1.0))
    dp = min(s.dp0 / 6.0, 2.0 * np.pi / (sig_cut * t / m + 20.0 / s.dp0)) / refine
    npts = int(np.ceil(p_cut / dp))
    p = s.p0 + np.arange(-npts, npts + 1) * dp
    wp = s.momentum_density(p) * dp

    S, P = np.meshgrid(sigma, p, indexing="ij")
    G = amps.evaluate(P + 0.5 * S) * np.conj(amps.evaluate(P - 0.5 * S))
    H = np.sum(G * wp[None, :] * np.exp(-1j * S * (P * t / m + s.q0)), axis=1)
    H *= np.exp(-0.5 * (sigma * s.dq0) ** 2) * dsig / (2.0 * np.pi)
    # integrand is Hermitian in sigma: fold the negative half onto the positive one
    weights = np.full(sigma.size, 2.0)
    weights[0] = 1.0
    return (np.exp(1j * np.outer(q, sigma)) @ (weights * H)).real


def transmitted_exact(amps: ScatteringAmplitudes, s: GaussianWignerState, t: float, q,
                      check_tol: Optional[float] = None) -> TransmittedDistribution:
    """Asymptotic transmitted coordinate distribution by direct quadrature.

    The r integral of ``T(r, p) rho0(q - v t + r, p)`` is carried out
    analytically against the Gaussian's coordinate profile, which leaves a
    smooth (sigma, p) double integral evaluated by the trapezoid rule on
    grids that avoid aliasing over the requested ``q`` range. With
    ``check_tol`` the quadrature is repeated on refined grids and a
    relative change above the tolerance raises ``ResolutionError``.
    """
    if not isinstance(s, GaussianWignerState):
        raise InvalidParameterError("transmitted_exact supports Gaussian states only")
    if amps.barrier is None:
        raise InvalidParameterError("transmitted_exact needs amplitudes built from a barrier")
    if t < 0:
        raise InvalidParameterError("t must be >= 0")
    _check_packet_on_grid(amps, s)
    _warn_if_early(s, t)
    q = np.asarray(q, dtype=float)
    values = _exact_values(amps, s, t, q)
    if check_tol is not None:
        finer = _exact_values(amps, s, t, q, refine=1.5)
        change = np.max(np.abs(finer - values)) / np.max(np.abs(finer))
        if change > check_tol:
            raise ResolutionError(f"quadrature changed by {change:.2e} on refinement")
    times = tunneling_times(amps, s.p0)
    return TransmittedDistribution(t=float(t), q=q, values=values, method="exact",
                                   abs_a2=_abs_a2(amps, s.p0), times=times)


# -- first-order expansion ---------------------------------------------

State = Union[GaussianWignerState, StepTestDistribution]


def transmitted_first_order(times: TunnelingTimes, a2: float, s: State, t: float, q):
    """``|A|^2 [P0 + v0 tau_w dP0/dq + 2 v0 tau_a M]`` for any state with free-motion closed forms.

    Values may go negative far from the peak, where the expansion is not
    meaningful; they are returned unclipped.
    """
    if t < 0:
        raise InvalidParameterError("t must be >= 0")
    v0 = times.v0
    return a2 * (s.free_marginal(t, q)
                 + v0 * times.tau_w * s.free_marginal_dq(t, q)
                 + 2.0 * v0 * times.tau_a * s.first_moment(t, q))


def _tau0(times, s, t):
    return 2.0 * t * times.tau_a * s.dp0**2 / s.mass - times.tau_w


def gaussian_first_order(s: GaussianWignerState, times: TunnelingTimes, t: float, q, a2: float):
    """First-order distribution of a Gaussian packet, ``|A|^2 P0 [1 + v0 tau0 (q - Q) / dq^2]``."""
    if t < 0:
        raise InvalidParameterError("t must be >= 0")
    x = np.asarray(q, dtype=float) - s.center(t)
    dq = s.width(t)
    return a2 * s.free_marginal(t, q) * (1.0 + times.v0 * _tau0(times, s, t) * x / dq**2)


def shift_observables(times: TunnelingTimes, s: GaussianWignerState, t: float) -> ShiftObservables:
    """Peak advance of the first-order distribution and the half-height shift.

    ``delta_q_peak = 2 v0 tau0 / (sqrt(1 + zeta^2) + 1)`` with
    ``zeta = 2 v0 tau0 / dq``; positive values are an advance over the free
    peak. It tends to ``v0 tau0`` for ``zeta -> 0`` and to ``dq`` (the
    packet width) for ``zeta -> +inf``.
    """
    if t < 0:
        raise InvalidParameterError("t must be >= 0")
    speed_up = t * times.tau_a * s.dp0**2 / s.mass
    tau0 = 2.0 * speed_up - times.tau_w
    tau_h = speed_up - times.tau_w
    v0 = times.v0
    zeta = 2.0 * v0 * tau0 / s.width(t)
    dQ = 2.0 * v0 * tau0 / (np.sqrt(1.0 + zeta**2) + 1.0)
    return ShiftObservables(t=float(t), tau0=float(tau0), zeta=float(zeta),
                            delta_q_peak=float(dQ), tau_h=float(tau_h),
                            half_height_shift=float(v0 * tau_h))


def half_height_shift(step: StepTestDistribution, times: TunnelingTimes, t: float) -> float:
    """Shift ``v0 * tau_h`` of the half-height point of a step profile."""
    if t < 0:
        raise InvalidParameterError("t must be >= 0")
    tau_h = t * times.tau_a * step.dp0**2 / step.mass - times.tau_w
    return float(times.v0 * tau_h)


def sign_change_time(times: TunnelingTimes, s: GaussianWignerState) -> Optional[float]:
    """Time at which tau0 (and the peak shift) changes sign, if it does for t > 0."""
    if times.tau_a == 0:
        return None
    t_star = s.mass * times.tau_w / (2.0 * times.tau_a * s.dp0**2)
    return float(t_star) if t_star > 0 else None
