"""Initial phase-space distributions and their free evolution.

Under free motion a phase-space point moves as ``q -> q + p t / m``, so
the coordinate marginal at time ``t`` is ``int dp rho0(q - p t / m, p)``.
For the Gaussian state both this marginal and its first momentum moment
have closed forms; the step test distribution has erf-type ones.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from .errors import InvalidParameterError, NormalizationError
from .potential import Barrier

__all__ = [
    "GaussianWignerState",
    "StepTestDistribution",
    "moments",
    "free_marginal",
    "first_moment",
    "phase_space_grid",
]

_SQRT2PI = np.sqrt(2.0 * np.pi)


def _gauss(x, sigma):
    return np.exp(-0.5 * (x / sigma) ** 2) / (_SQRT2PI * sigma)


@dataclass(frozen=True)
class GaussianWignerState:
    """Gaussian Wigner function centred at ``(q0, p0)`` with widths ``dq0``, ``dp0``.

    ``dq0 * dp0 = 1/2`` is a pure minimum-uncertainty state; larger products
    describe mixed states.
    """

    p0: float
    q0: float
    dp0: float
    dq0: float
    mass: float = 1.0

    def __post_init__(self):
        if not (self.dp0 > 0 and self.dq0 > 0):
            raise InvalidParameterError("dp0 and dq0 must be positive")
        if not self.mass > 0:
            raise InvalidParameterError("mass must be positive")
        if self.dp0 * self.dq0 < 0.5 * (1.0 - 1e-12):
            raise InvalidParameterError(
                f"dq0*dp0 = {self.dp0 * self.dq0:.6g} violates the uncertainty bound 1/2"
            )
        ratio = self.dp0 / abs(self.p0) if self.p0 != 0 else np.inf
        if ratio >= 0.25:
            raise InvalidParameterError(
                f"dp0/|p0| = {ratio:.3g}; the small-dispersion analysis needs < 0.25"
            )
        if ratio > 0.1:
            warnings.warn(f"dp0/|p0| = {ratio:.3g} > 0.1; first-order results degrade",
                          stacklevel=2)

    @classmethod
    def pure(cls, p0, q0, dq0, mass=1.0):
        return cls(p0=p0, q0=q0, dp0=0.5 / dq0, dq0=dq0, mass=mass)

    @property
    def norm_constant(self) -> float:
        return 1.0 / (2.0 * np.pi * self.dp0 * self.dq0)

    @property
    def v0(self) -> float:
        return self.p0 / self.mass

    @property
    def is_pure(self) -> bool:
        return abs(self.dp0 * self.dq0 - 0.5) < 1e-12

    def center(self, t):
        """Freely moving centre Q(t) = q0 + v0 t."""
        return self.q0 + self.v0 * t

    def width(self, t):
        """Coordinate spread at time t, including free spreading."""
        return np.sqrt(self.dq0**2 + (t * self.dp0 / self.mass) ** 2)

    def clearing_time(self) -> float:
        """Time after which the transmitted packet has left the barrier."""
        return 2.0 * abs(self.q0) * self.mass / abs(self.p0)

    def density(self, q, p):
        """rho0(q, p)."""
        q = np.asarray(q, dtype=float)
        p = np.asarray(p, dtype=float)
        return self.norm_constant * np.exp(
            -0.5 * ((p - self.p0) / self.dp0) ** 2 - 0.5 * ((q - self.q0) / self.dq0) ** 2
        )

    def momentum_density(self, p):
        return _gauss(np.asarray(p, dtype=float) - self.p0, self.dp0)

    def check_prepared(self, barrier: Barrier) -> None:
        """Raise unless the packet starts outside the barrier's range."""
        gap = abs(self.q0 - barrier.center) - self.dq0
        if not gap > barrier.support_radius:
            raise InvalidParameterError(
                f"|q0 - c| - dq0 = {gap:.6g} must exceed the support radius "
                f"{barrier.support_radius:.6g}: prepare the packet in free space"
            )

    # free evolution ----------------------------------------------------

    def free_marginal(self, t, q):
        return _gauss(np.asarray(q, dtype=float) - self.center(t), self.width(t))

    def free_marginal_dq(self, t, q):
        """Coordinate derivative of the free marginal."""
        x = np.asarray(q, dtype=float) - self.center(t)
        s = self.width(t)
        return -x / s**2 * _gauss(x, s)

    def first_moment(self, t, q):
        x = np.asarray(q, dtype=float) - self.center(t)
        s = self.width(t)
        return t * x * self.dp0**2 / (self.mass * s**2) * _gauss(x, s)


@dataclass(frozen=True)
class StepTestDistribution:
    """Indicator of ``q < q0`` times a Gaussian momentum profile.

    Not a valid quantum state (it is not normalizable and has no
    uncertainty-compatible width); useful only as a test profile for the
    first-order transmitted formula. ``smoothing`` replaces the sharp edge
    by an error function of that width.
    """

    p0: float
    q0: float
    dp0: float
    mass: float = 1.0
    smoothing: float = 0.0

    def __post_init__(self):
        if not (self.dp0 > 0 and self.mass > 0 and self.smoothing >= 0):
            raise InvalidParameterError("dp0, mass must be > 0 and smoothing >= 0")

    @property
    def v0(self) -> float:
        return self.p0 / self.mass

    def center(self, t):
        return self.q0 + self.v0 * t

    def _edge_width(self, t):
        return np.sqrt((t * self.dp0 / self.mass) ** 2 + self.smoothing**2)

    def density(self, q, p):
        q = np.asarray(q, dtype=float)
        if self.smoothing > 0:
            prof = 0.5 * erfc((q - self.q0) / (np.sqrt(2.0) * self.smoothing))
        else:
            prof = (q < self.q0).astype(float)
        return prof * _gauss(np.asarray(p, dtype=float) - self.p0, self.dp0)

    def free_marginal(self, t, q):
        x = np.asarray(q, dtype=float) - self.center(t)
        s = self._edge_width(t)
        if s == 0:
            return (x < 0).astype(float)
        return 0.5 * erfc(x / (np.sqrt(2.0) * s))

    def free_marginal_dq(self, t, q):
        x = np.asarray(q, dtype=float) - self.center(t)
        s = self._edge_width(t)
        if s == 0:
            raise InvalidParameterError("the sharp step has no derivative at t = 0")
        return -_gauss(x, s)

    def first_moment(self, t, q):
        x = np.asarray(q, dtype=float) - self.center(t)
        s = self._edge_width(t)
        if s == 0:
            return np.zeros_like(x)
        return self.dp0**2 * (t / self.mass) * _gauss(x, s)


def free_marginal(s: GaussianWignerState, t, q):
    """Coordinate distribution of the freely moving, spreading packet."""
    if np.any(np.asarray(t) < 0):
        raise InvalidParameterError("t must be >= 0")
    return s.free_marginal(t, q)


def first_moment(s: GaussianWignerState, t, q):
    """``int dp (p - p0) rho0(q - p t / m, p)`` in closed form."""
    if np.any(np.asarray(t) < 0):
        raise InvalidParameterError("t must be >= 0")
    return s.first_moment(t, q)


def phase_space_grid(s: GaussianWignerState, n_q: int = 401, n_p: int = 401, extent: float = 8.0):
    """Uniform (q, p) axes spanning ``extent`` standard deviations each way."""
    q = np.linspace(s.q0 - extent * s.dq0, s.q0 + extent * s.dq0, n_q)
    p = np.linspace(s.p0 - extent * s.dp0, s.p0 + extent * s.dp0, n_p)
    return q, p


def moments(q, p, rho, tol: float = 1e-6):
    """(p0, dp0, q0, dq0) of a distribution sampled on a tensor grid.

    ``rho[i, j]`` is the value at ``(q[i], p[j])``; integrals use the
    trapezoid rule.
    """
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    rho = np.asarray(rho, dtype=float)
    if rho.shape != (q.size, p.size):
        raise InvalidParameterError(f"rho has shape {rho.shape}, expected {(q.size, p.size)}")

    def integ(f):
        return np.trapezoid(np.trapezoid(f, p, axis=1), q)

    norm = integ(rho)
    if abs(norm - 1.0) > tol:
        raise NormalizationError(f"distribution integrates to {norm:.10g}, not 1", integral=norm)
    qq = q[:, None]
    pp = p[None, :]
    P0 = integ(pp * rho)
    Q0 = integ(qq * rho)
    dp = np.sqrt(integ((pp - P0) ** 2 * rho))
    dq = np.sqrt(integ((qq - Q0) ** 2 * rho))
    return P0, dp, Q0, dq
