"""Stationary scattering amplitudes from the transfer-matrix method.

The wave function on each constant slab is propagated in the
``(psi, psi')`` basis, where a slab of width ``d`` and local wave number
``k`` contributes the real unimodular matrix

    [[cos kd,      sin(kd)/k],
     [-k sin kd,   cos kd   ]]

Evanescent slabs use the hyperbolic continuation scaled by ``exp(-|k| d)``;
the scale factors are accumulated as a logarithm so that ``|A|`` can be far
below the double-precision range without overflow in the products.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import GridTooCoarseError, InvalidParameterError
from .potential import Barrier

__all__ = [
    "ScatteringAmplitudes",
    "transfer_matrix",
    "amplitude",
    "log_amplitude",
    "transmission_amplitudes",
    "rectangular_closed_form",
    "default_kappa_grid",
]


@dataclass(frozen=True, eq=False)
class ScatteringAmplitudes:
    """A(kappa), B(kappa) tabulated on a strictly increasing momentum grid.

    ``log_abs_A`` holds ``ln|A|`` computed without forming ``|A|``; it stays
    finite where ``A`` itself underflows. ``phase`` is the continuously
    unwrapped ``arg A``. ``barrier`` is kept (when known) so that callers
    can evaluate the amplitude off the grid.
    """

    mass: float
    kappa: np.ndarray
    A: np.ndarray
    B: Optional[np.ndarray]
    phase: np.ndarray
    log_abs_A: Optional[np.ndarray] = None
    barrier: Optional[Barrier] = None

    @property
    def spacing(self) -> np.ndarray:
        return np.diff(self.kappa)

    def evaluate(self, kappa) -> np.ndarray:
        """A at arbitrary real momenta (needs the barrier)."""
        if self.barrier is None:
            raise InvalidParameterError("off-grid evaluation needs amplitudes built from a barrier")
        return amplitude(self.barrier, self.mass, kappa)

    @classmethod
    def from_values(cls, kappa, A, mass, B=None, max_phase_step=np.pi / 2):
        """Wrap externally computed amplitudes (e.g. a closed form or a CSV)."""
        kappa = np.asarray(kappa, dtype=float)
        A = np.asarray(A, dtype=complex)
        _check_grid(kappa, mass)
        phase = _unwrap_from_top(np.angle(A), kappa, max_phase_step)
        with np.errstate(divide="ignore"):
            log_abs = np.log(np.abs(A))
        return cls(mass=float(mass), kappa=kappa, A=A,
                   B=None if B is None else np.asarray(B, dtype=complex),
                   phase=phase, log_abs_A=log_abs)


def _slab_matrices(kappa, mass, edges, heights):
    """Scaled total transfer matrix and its log scale for kappa > 0."""
    kappa = np.asarray(kappa, dtype=float)
    eps = 0.5 * kappa**2 / mass
    M = np.broadcast_to(np.eye(2), kappa.shape + (2, 2)).copy()
    log_scale = np.zeros(kappa.shape)
    for d, v in zip(np.diff(edges), heights):
        k2 = 2.0 * mass * (eps - v)
        osc = k2 >= 0
        k = np.sqrt(np.abs(k2))
        x = k * d
        # oscillatory slab; sinc removes the 0/0 at k = 0
        c = np.cos(x)
        s_over_k = d * np.sinc(x / np.pi)
        k_s = k * np.sin(x)
        # evanescent slab, everything multiplied by exp(-x)
        e = -np.expm1(-2.0 * x)
        ch = 1.0 - 0.5 * e
        safe_x = np.where(x > 0, x, 1.0)
        sh_over_k = d * np.where(x > 0, e / (2.0 * safe_x), 1.0)
        k_sh = 0.5 * k * e

        S = np.empty(kappa.shape + (2, 2))
        S[..., 0, 0] = np.where(osc, c, ch)
        S[..., 1, 1] = S[..., 0, 0]
        S[..., 0, 1] = np.where(osc, s_over_k, sh_over_k)
        S[..., 1, 0] = np.where(osc, -k_s, k_sh)
        M = S @ M
        norm = np.max(np.abs(M), axis=(-2, -1))
        M /= norm[..., None, None]
        log_scale += np.where(osc, 0.0, x) + np.log(norm)
    return M, log_scale


def transfer_matrix(barrier: Barrier, mass: float, kappa):
    """Total ``(psi, psi')`` transfer matrix across the barrier.

    Returns ``(M_scaled, log_scale)`` with ``M = exp(log_scale) * M_scaled``.
    """
    edges, heights = barrier.trimmed()
    return _slab_matrices(kappa, mass, edges, heights)


def _positive_amplitudes(barrier, mass, kappa):
    """(log|A|, arg A wrapped, B) for kappa > 0."""
    edges, heights = barrier.trimmed()
    if heights.size == 0:
        return np.zeros(kappa.shape), np.zeros(kappa.shape), np.zeros(kappa.shape, complex)
    M, s = _slab_matrices(kappa, mass, edges, heights)
    m11, m12, m21, m22 = M[..., 0, 0], M[..., 0, 1], M[..., 1, 0], M[..., 1, 1]
    length = edges[-1] - edges[0]
    denom = m11 + m22 + 1j * (m21 / kappa - kappa * m12)
    log_abs = np.log(2.0) - s - np.log(np.abs(denom))
    arg = np.angle(np.exp(-1j * kappa * length) * np.conj(denom))
    B = np.exp(2j * kappa * edges[0]) * (m22 - m11 - 1j * kappa * m12 - 1j * m21 / kappa) / denom
    return log_abs, arg, B


def log_amplitude(barrier: Barrier, mass: float, kappa):
    """``(ln|A|, arg A)`` for kappa > 0, with arg A in (-pi, pi]."""
    kappa = np.asarray(kappa, dtype=float)
    if np.any(kappa <= 0):
        raise InvalidParameterError("log_amplitude needs kappa > 0")
    log_abs, arg, _ = _positive_amplitudes(barrier, mass, kappa)
    return log_abs, arg


def amplitude(barrier: Barrier, mass: float, kappa) -> np.ndarray:
    """Transmission amplitude A at any real momentum.

    Negative momenta use ``A(-k) = conj(A(k))``; ``A(0) = 0`` unless the
    barrier vanishes.
    """
    kappa = np.asarray(kappa, dtype=float)
    out = np.ones(kappa.shape, dtype=complex)
    if barrier.is_free:
        return out
    nz = kappa != 0
    ka = np.abs(kappa[nz])
    log_abs, arg, _ = _positive_amplitudes(barrier, mass, ka)
    a = np.exp(log_abs + 1j * arg)
    out[nz] = np.where(kappa[nz] > 0, a, np.conj(a))
    out[~nz] = 0.0
    return out


def rectangular_closed_form(v0: float, width: float, mass: float, kappa):
    """Textbook transmission amplitude of a single rectangular slab.

    Uses the complex wave number inside the slab, so one expression covers
    tunnelling, the degenerate point eps = V0 and over-barrier energies.
    """
    kappa = np.asarray(kappa, dtype=float)
    if np.any(kappa <= 0) or v0 < 0 or width <= 0:
        raise InvalidParameterError("need kappa > 0, v0 >= 0, width > 0")
    k = np.sqrt(kappa**2 - 2.0 * mass * v0 + 0j)
    sin_over_k = width * np.sinc(k * width / np.pi)
    denom = np.cos(k * width) - 0.5j * (k**2 + kappa**2) / kappa * sin_over_k
    return np.exp(-1j * kappa * width) / denom


def _check_grid(kappa, mass):
    if not mass > 0:
        raise InvalidParameterError(f"mass must be > 0, got {mass}")
    if kappa.ndim != 1 or kappa.size < 2:
        raise InvalidParameterError("kappa grid must be 1D with at least two points")
    if np.any(kappa <= 0):
        raise InvalidParameterError(f"kappa grid must be positive, min is {kappa.min()}")
    if np.any(np.diff(kappa) <= 0):
        raise InvalidParameterError("kappa grid must be strictly increasing")


def _unwrap_from_top(wrapped, kappa, max_step, top_value=None):
    """Unwrap downward from the last grid point.

    ``top_value`` fixes the branch at the top point; by default the
    principal value is kept there.
    """
    rev = np.unwrap(wrapped[::-1])
    if top_value is not None:
        rev = rev + 2.0 * np.pi * np.round((top_value - rev[0]) / (2.0 * np.pi))
    phase = rev[::-1]
    jumps = np.abs(np.diff(phase))
    bad = np.flatnonzero(jumps > max_step)
    if bad.size:
        i = bad[-1]
        raise GridTooCoarseError(
            f"arg A changes by {jumps[i]:.3f} rad between kappa={kappa[i]:.6g} and "
            f"kappa={kappa[i + 1]:.6g}; refine the momentum grid",
            interval=(float(kappa[i]), float(kappa[i + 1])),
        )
    return phase


def _high_energy_branch(barrier, mass, k_top, arg_top):
    """Branch of arg A at k_top continued from high energy, where A -> 1."""
    edges, heights = barrier.trimmed()
    length = edges[-1] - edges[0]
    w = mass * barrier.area()
    k_far = max(4.0 * k_top, 2.0 * w, 50.0 * np.sqrt(2.0 * mass * barrier.v_max))
    if k_far <= k_top:
        return arg_top
    step = 0.1 / max(length, 1.0 / k_top)
    n = int(min(max(np.ceil((k_far - k_top) / step), 64), 400_000))
    ks = np.linspace(k_top, k_far, n + 1)
    _, arg = log_amplitude(barrier, mass, ks)
    # arg A ~ -m * area / kappa near k_far, well inside (-pi, pi]
    rev = np.unwrap(arg[::-1])
    return rev[-1]


def transmission_amplitudes(barrier: Barrier, mass: float, kappa_grid,
                            max_phase_step: float = np.pi / 2) -> ScatteringAmplitudes:
    """Tabulate A, B, ln|A| and the unwrapped phase of A on ``kappa_grid``.

    The branch of the phase is fixed by continuing arg A from the top of
    the grid to high energy, where A -> 1. Adjacent phase differences above
    ``max_phase_step`` raise :class:`GridTooCoarseError`.
    """
    kappa = np.asarray(kappa_grid, dtype=float)
    _check_grid(kappa, mass)
    if barrier.is_free:
        n = kappa.size
        return ScatteringAmplitudes(mass=float(mass), kappa=kappa, A=np.ones(n, complex),
                                    B=np.zeros(n, complex), phase=np.zeros(n),
                                    log_abs_A=np.zeros(n), barrier=barrier)
    log_abs, arg, B = _positive_amplitudes(barrier, mass, kappa)
    top = _high_energy_branch(barrier, mass, kappa[-1], arg[-1])
    phase = _unwrap_from_top(arg, kappa, max_phase_step, top_value=top)
    A = np.exp(log_abs + 1j * arg)
    return ScatteringAmplitudes(mass=float(mass), kappa=kappa, A=A, B=B, phase=phase,
                                log_abs_A=log_abs, barrier=barrier)


def default_kappa_grid(p0: float, dp0: float, sigma_max: float, n: int = 2048) -> np.ndarray:
    """Uniform grid over ``p0 +- (8 dp0 + sigma_max / 2)``, clipped to kappa > 0."""
    half = 8.0 * dp0 + 0.5 * sigma_max
    lo = p0 - half
    hi = p0 + half
    if lo <= 0:
        lo = hi / n
    return np.linspace(lo, hi, n)
