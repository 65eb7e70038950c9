"""Experiment configuration files.

Configs are TOML documents written with dotted keys, one per line::

    experiment.kind = "distribution"
    barrier.kind = "rectangular"
    barrier.v0 = 1.0
    barrier.width = 2.0
    packet.p0 = 1.0
    run.times = [430.0, 860.0]

Every value is validated before anything runs; errors carry the dotted key
path of the offending entry.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import InvalidParameterError, TunnelTimeError
from .potential import Barrier, make_piecewise, make_rectangular, make_sampled
from .wigner import GaussianWignerState, StepTestDistribution

EXPERIMENTS = {
    "amplitudes": "A(kappa), B(kappa) on the momentum grid -> amplitudes.csv",
    "times": "phase, amplitude and Buttiker-Landauer times per reference momentum -> times.csv",
    "propagator": "transmission propagator T(r, p) -> propagator.csv",
    "distribution": "exact vs first-order transmitted distributions -> distribution_<i>.csv, observables.csv",
    "oracle-compare": "split-operator oracle vs first-order peak shift and transmission -> oracle.csv "
                      "(oracle_snapshot.csv with oracle.snapshot = true)",
    "shift-sweep": "peak and half-height shift observables over a time sweep -> shift_sweep.csv",
}


class ConfigParseError(TunnelTimeError):
    pass


class ConfigValidationError(TunnelTimeError, ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass
class ExperimentConfig:
    kind: str
    barrier: Barrier
    packet: Any
    mass: float
    kappa0: list[float]
    times: list[float]
    n_kappa: int = 2048
    kappa_range: Optional[tuple[float, float]] = None
    n_q: int = 801
    q_span: float = 6.0
    propagator_p: list[float] = field(default_factory=list)
    propagator_sigma_max: Optional[float] = None
    propagator_r_out: float = 20.0
    oracle_dx: Optional[float] = None
    oracle_dt: Optional[float] = None
    oracle_t_final: Optional[float] = None
    tol_oracle_peak: float = 0.1
    tol_transmission: Optional[float] = None
    oracle_snapshot: bool = False
    raw: dict = field(default_factory=dict, repr=False)


def load(path) -> dict:
    """Parse a config file into a nested dict (ConfigParseError on failure)."""
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except OSError as exc:
        raise ConfigParseError(f"cannot read {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigParseError(f"{path}: {exc}") from exc


_MISSING = object()


def _get(d, dotted, default=_MISSING):
    cur = d
    for part in dotted.split("."):
        if not isinstance(cur, dict) or part not in cur:
            if default is _MISSING:
                raise ConfigValidationError(dotted, "required key is missing")
            return default
        cur = cur[part]
    return cur


def _num(d, key, default=_MISSING, positive=False, nonneg=False):
    v = _get(d, key, default)
    if v is None:
        return None
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigValidationError(key, f"expected a number, got {v!r}")
    v = float(v)
    if not np.isfinite(v):
        raise ConfigValidationError(key, "must be finite")
    if positive and not v > 0:
        raise ConfigValidationError(key, f"must be > 0, got {v}")
    if nonneg and not v >= 0:
        raise ConfigValidationError(key, f"must be >= 0, got {v}")
    return v


def _num_list(d, key, default=_MISSING, nonneg=False):
    v = _get(d, key, default)
    if v is None:
        return None
    if not isinstance(v, list):
        v = [v]
    out = []
    for i, x in enumerate(v):
        if isinstance(x, bool) or not isinstance(x, (int, float)):
            raise ConfigValidationError(f"{key}[{i}]", f"expected a number, got {x!r}")
        if nonneg and x < 0:
            raise ConfigValidationError(f"{key}[{i}]", f"must be >= 0, got {x}")
        out.append(float(x))
    return out


def _barrier(d) -> Barrier:
    kind = _get(d, "barrier.kind", "rectangular")
    try:
        if kind == "rectangular":
            return make_rectangular(_num(d, "barrier.v0", nonneg=True),
                                    _num(d, "barrier.width", positive=True),
                                    _num(d, "barrier.center", 0.0))
        if kind in ("piecewise", "piecewise-constant"):
            segs = _get(d, "barrier.segments")
            if not isinstance(segs, list) or not all(isinstance(s, list) for s in segs):
                raise ConfigValidationError("barrier.segments", "expected a list of [left, right, height]")
            return make_piecewise(segs)
        if kind == "sampled":
            return make_sampled(_num_list(d, "barrier.q"), _num_list(d, "barrier.heights"))
    except InvalidParameterError as exc:
        raise ConfigValidationError("barrier", str(exc)) from exc
    raise ConfigValidationError("barrier.kind", f"unknown kind {kind!r}")


def _packet(d):
    kind = _get(d, "packet.kind", "gaussian")
    mass = _num(d, "packet.mass", 1.0, positive=True)
    p0 = _num(d, "packet.p0")
    q0 = _num(d, "packet.q0")
    dp0 = _num(d, "packet.dp0", None, positive=True)
    try:
        if kind == "gaussian":
            dq0 = _num(d, "packet.dq0", None, positive=True)
            if dp0 is None and dq0 is None:
                raise ConfigValidationError("packet.dq0", "give packet.dq0 and/or packet.dp0")
            if dp0 is None:
                dp0 = 0.5 / dq0
            if dq0 is None:
                dq0 = 0.5 / dp0
            return GaussianWignerState(p0=p0, q0=q0, dp0=dp0, dq0=dq0, mass=mass)
        if kind == "step":
            if dp0 is None:
                raise ConfigValidationError("packet.dp0", "required for a step packet")
            return StepTestDistribution(p0=p0, q0=q0, dp0=dp0, mass=mass,
                                        smoothing=_num(d, "packet.smoothing", 0.0, nonneg=True))
    except InvalidParameterError as exc:
        raise ConfigValidationError("packet", str(exc)) from exc
    raise ConfigValidationError("packet.kind", f"unknown kind {kind!r}")


def _sweep_times(d):
    if _get(d, "sweep", None) is None:
        return None
    t_min = _num(d, "sweep.t_min", 0.0, nonneg=True)
    t_max = _num(d, "sweep.t_max", positive=True)
    n = _get(d, "sweep.n", 51)
    if not isinstance(n, int) or n < 2:
        raise ConfigValidationError("sweep.n", "must be an integer >= 2")
    if not t_max > t_min:
        raise ConfigValidationError("sweep.t_max", "must exceed sweep.t_min")
    return list(np.linspace(t_min, t_max, n))


def build(d: dict) -> ExperimentConfig:
    """Validate a parsed config and build the model objects it describes."""
    kind = _get(d, "experiment.kind")
    if kind not in EXPERIMENTS:
        raise ConfigValidationError("experiment.kind",
                                    f"unknown experiment {kind!r}; one of {sorted(EXPERIMENTS)}")
    barrier = _barrier(d)
    packet = _packet(d)
    mass = packet.mass

    kappa0 = _num_list(d, "reference.kappa0", [packet.p0])
    for i, k in enumerate(kappa0):
        if not k > 0:
            raise ConfigValidationError(f"reference.kappa0[{i}]", "must be > 0")

    times = _sweep_times(d) if kind == "shift-sweep" else None
    if times is None:
        times = _num_list(d, "run.times", [], nonneg=True)
    if kind in ("distribution", "shift-sweep") and not times:
        raise ConfigValidationError("run.times", f"experiment {kind!r} needs at least one time")

    n_kappa = _get(d, "grid.n_kappa", 2048)
    if not isinstance(n_kappa, int) or n_kappa < 16:
        raise ConfigValidationError("grid.n_kappa", "must be an integer >= 16")
    k_lo = _num(d, "grid.kappa_min", None, positive=True)
    k_hi = _num(d, "grid.kappa_max", None, positive=True)
    if (k_lo is None) != (k_hi is None):
        raise ConfigValidationError("grid.kappa_max", "give both grid.kappa_min and grid.kappa_max")
    if k_lo is not None and not k_hi > k_lo:
        raise ConfigValidationError("grid.kappa_max", "must exceed grid.kappa_min")
    n_q = _get(d, "grid.n_q", 801)
    if not isinstance(n_q, int) or n_q < 3:
        raise ConfigValidationError("grid.n_q", "must be an integer >= 3")

    if kind in ("distribution", "oracle-compare") and not isinstance(packet, GaussianWignerState):
        raise ConfigValidationError("packet.kind", f"experiment {kind!r} needs a gaussian packet")
    if kind == "oracle-compare":
        if not packet.is_pure:
            raise ConfigValidationError("packet.dq0", "the oracle needs a pure state (dq0 * dp0 = 1/2)")
        try:
            packet.check_prepared(barrier)
        except InvalidParameterError as exc:
            raise ConfigValidationError("packet.q0", str(exc)) from exc

    snapshot = _get(d, "oracle.snapshot", False)
    if not isinstance(snapshot, bool):
        raise ConfigValidationError("oracle.snapshot", "must be true or false")

    return ExperimentConfig(
        kind=kind,
        barrier=barrier,
        packet=packet,
        mass=mass,
        kappa0=kappa0,
        times=times,
        n_kappa=n_kappa,
        kappa_range=None if k_lo is None else (k_lo, k_hi),
        n_q=n_q,
        q_span=_num(d, "grid.q_span", 6.0, positive=True),
        propagator_p=_num_list(d, "propagator.p", [packet.p0]),
        propagator_sigma_max=_num(d, "propagator.sigma_max", None, positive=True),
        propagator_r_out=_num(d, "propagator.r_out", 20.0, positive=True),
        oracle_dx=_num(d, "oracle.dx", None, positive=True),
        oracle_dt=_num(d, "oracle.dt", None, positive=True),
        oracle_t_final=_num(d, "oracle.t_final", None, positive=True),
        tol_oracle_peak=_num(d, "tolerance.oracle_peak", 0.1, positive=True),
        tol_transmission=_num(d, "tolerance.transmission", None, positive=True),
        oracle_snapshot=snapshot,
        raw=d,
    )


def load_config(path) -> ExperimentConfig:
    return build(load(Path(path)))
