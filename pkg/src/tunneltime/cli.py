"""Experiment runner: ``tunneltime run|validate|list-experiments``.

Exit codes: 0 success, 1 I/O failure, 2 config parse error, 3 validation
error, 4 numerical error. ``TUNNELTIME_THREADS`` sets the number of worker
threads used for independent items of one experiment (times, momenta);
results are merged in input order so output does not depend on it.
"""

from __future__ import annotations

import argparse
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import __version__
from .asymptotics import (
    gaussian_first_order,
    peak_position,
    shift_observables,
    sign_change_time,
    transmission_propagator,
    transmitted_exact,
    transmitted_first_order,
)
from .config import (
    EXPERIMENTS,
    ConfigParseError,
    ConfigValidationError,
    ExperimentConfig,
    build,
    load,
)
from .errors import ConfigurationError, InvalidParameterError, OutOfRangeError, TunnelTimeError
from .oracle import EvolutionSetup, evolve, momentum_resolved_transmission, transmitted_observables
from .reports import (
    AMPLITUDE_COLUMNS,
    ORACLE_COLUMNS,
    PROPAGATOR_COLUMNS,
    TIMES_COLUMNS,
    amplitudes_table,
    times_table,
    write_csv,
    write_text,
)
from .scattering import transmission_amplitudes
from .times import tunneling_times

EXIT_OK = 0
EXIT_IO = 1
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_NUMERICAL = 4


def thread_count() -> int:
    raw = os.environ.get("TUNNELTIME_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigValidationError("TUNNELTIME_THREADS", f"expected an integer, got {raw!r}")
    if n < 1:
        raise ConfigValidationError("TUNNELTIME_THREADS", "must be >= 1")
    return n


def map_ordered(fn: Callable, items: Sequence, threads: int) -> list:
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


class Summary:
    """Collects the human-readable summary, one observable per line."""

    def __init__(self, cfg: ExperimentConfig, config_path: Path):
        self.lines = [
            f"tunneltime {__version__} experiment={cfg.kind}",
            f"config: {config_path.name}",
            f"barrier: kind={cfg.barrier.kind} edges={list(map(float, cfg.barrier.edges))} "
            f"heights={list(map(float, cfg.barrier.heights))}",
            f"packet: {cfg.packet!r}",
            "",
        ]
        self.failed = 0

    def add(self, name: str, value, source: str):
        if isinstance(value, (float, np.floating)):
            value = f"{float(value):.10g}"
        self.lines.append(f"{name} = {value}    [{source}]")

    def check(self, name: str, deviation: float, tol: float, source: str):
        ok = deviation <= tol
        if not ok:
            self.failed += 1
        self.lines.append(f"{'PASS' if ok else 'FAIL'} {name}: {deviation:.4g} <= {tol:.4g}    [{source}]")

    def note(self, text: str):
        self.lines.append(f"note: {text}")

    def text(self) -> str:
        return "\n".join(self.lines) + "\n"


# -- momentum grids ------------------------------------------------------


def _dp0(cfg):
    return cfg.packet.dp0


def _kappa_grid(cfg: ExperimentConfig, extra=()) -> np.ndarray:
    n = cfg.n_kappa
    if cfg.kappa_range is not None:
        return np.linspace(cfg.kappa_range[0], cfg.kappa_range[1], n)
    p0, dp0 = cfg.packet.p0, _dp0(cfg)
    if cfg.kind == "amplitudes":
        hi = 5.0 * max(abs(p0), np.sqrt(2.0 * cfg.mass * cfg.barrier.v_max), 1.0)
        return np.linspace(hi / n, hi, n)
    pts = [p0 - 10.0 * dp0, p0 + 10.0 * dp0, *cfg.kappa0, *extra]
    lo, hi = min(pts), max(pts)
    pad = 0.05 * (hi - lo) + 5.0 * dp0
    lo, hi = lo - pad, hi + pad
    if lo <= 0:
        lo = hi / n
    return np.linspace(lo, hi, n)


def _amplitudes(cfg, extra=()):
    return transmission_amplitudes(cfg.barrier, cfg.mass, _kappa_grid(cfg, extra))


# -- experiments ----------------------------------------------------------


def run_amplitudes(cfg, out: Path, summary: Summary, threads: int):
    amps = _amplitudes(cfg)
    write_csv(out / "amplitudes.csv", AMPLITUDE_COLUMNS, amplitudes_table(amps))
    unit = np.abs(amps.A) ** 2 + np.abs(amps.B) ** 2
    summary.add("n_kappa", amps.kappa.size, "momentum grid")
    summary.add("kappa_range", f"[{amps.kappa[0]:.10g}, {amps.kappa[-1]:.10g}]", "momentum grid")
    summary.add("max_unitarity_defect", float(np.max(np.abs(unit - 1.0))),
                "max | |A|^2 + |B|^2 - 1 |, transfer-matrix amplitudes")
    summary.add("phase_at_top", float(amps.phase[-1]),
                "arg A unwrapped from the high-energy limit A -> 1")


def run_times(cfg, out, summary, threads):
    amps = _amplitudes(cfg)
    res = map_ordered(lambda k: tunneling_times(amps, k), cfg.kappa0, threads)
    write_csv(out / "times.csv", TIMES_COLUMNS, times_table(res))
    for tt in res:
        tag = f"kappa0={tt.kappa0:.10g}"
        summary.add(f"tau_w[{tag}]", tt.tau_w, "phase time: d arg A / d epsilon, Richardson central difference")
        summary.add(f"tau_a[{tag}]", tt.tau_a, "amplitude time: d ln|A| / d epsilon, Richardson central difference")
        summary.add(f"tau_bl[{tag}]", tt.tau_bl, "|tau_w - i tau_a|")


def _causality_ratio(prop):
    neg = prop.r < -prop.dr - 1e-12
    return float(np.max(np.abs(prop.values[neg])) / np.max(np.abs(prop.values)))


def run_propagator(cfg, out, summary, threads):
    amps = _amplitudes(cfg, extra=cfg.propagator_p)
    props = map_ordered(
        lambda p: transmission_propagator(amps, p, sigma_max=cfg.propagator_sigma_max),
        cfg.propagator_p, threads)
    rows = []
    for prop in props:
        sel = np.abs(prop.r) <= cfg.propagator_r_out
        rows.extend((prop.p, r, v) for r, v in zip(prop.r[sel], prop.values[sel]))
        a2 = float(np.abs(amps.evaluate(np.array([prop.p]))[0]) ** 2)
        tag = f"p={prop.p:.10g}"
        summary.add(f"sigma_max[{tag}]", prop.sigma_max, "sigma cutoff of the Fourier integral")
        summary.add(f"integral_T[{tag}]", prop.integral(), "sum T dr over the full r window")
        summary.add(f"abs_A2[{tag}]", a2, "|A(p)|^2")
        summary.add(f"normalization_defect[{tag}]", abs(prop.integral() - a2),
                    "|int T dr - |A(p)|^2|")
        summary.add(f"causality_ratio[{tag}]", _causality_ratio(prop),
                    "max_{r < -dr} |T| / max |T|, should vanish")
        summary.add(f"imag_residue[{tag}]", prop.imag_residue, "max |Im T| / max |T| before discarding Im T")
    write_csv(out / "propagator.csv", PROPAGATOR_COLUMNS, rows)


def run_distribution(cfg, out, summary, threads):
    s = cfg.packet
    amps = _amplitudes(cfg)
    tt = tunneling_times(amps, s.p0)
    a2 = float(np.abs(amps.evaluate(np.array([s.p0]))[0]) ** 2)
    summary.add("tau_w", tt.tau_w, "phase time at p0")
    summary.add("tau_a", tt.tau_a, "amplitude time at p0")
    summary.add("abs_A2", a2, "|A(p0)|^2")

    def one(t):
        Q, dq = s.center(t), s.width(t)
        q = np.linspace(Q - cfg.q_span * dq, Q + cfg.q_span * dq, cfg.n_q)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            exact = transmitted_exact(amps, s, t, q)
        first = transmitted_first_order(tt, a2, s, t, q)
        free = a2 * s.free_marginal(t, q)
        return q, exact, first, free, [str(w.message) for w in caught]

    results = map_ordered(one, cfg.times, threads)
    obs_rows = []
    for i, (t, (q, exact, first, free, msgs)) in enumerate(zip(cfg.times, results)):
        write_csv(out / f"distribution_{i}.csv",
                  ("q", "p_exact", "p_first_order", "p_free_scaled"),
                  zip(q, exact.values, first, free))
        so = shift_observables(tt, s, t)
        peak_exact = exact.peak() - s.center(t)
        closed_check = gaussian_first_order(s, tt, t, q, a2)
        peak_first = peak_position(q, closed_check) - s.center(t)
        obs_rows.append((t, so.tau0, so.zeta, so.delta_q_peak, so.tau_h, peak_exact, peak_first))
        tag = f"t={t:.10g}"
        for m in msgs:
            summary.note(f"{tag}: {m}")
        summary.add(f"integral_exact[{tag}]", exact.integral(), "trapezoid integral of the exact distribution")
        summary.add(f"peak_shift_exact[{tag}]", peak_exact,
                    "peak of the exact distribution (sigma, p quadrature of T against rho0) minus Q(t)")
        summary.add(f"peak_shift_first_order[{tag}]", so.delta_q_peak,
                    "2 v0 tau0 / (sqrt(1 + zeta^2) + 1), tau0 = 2 t tau_a dp0^2 / m - tau_w")
        summary.add(f"max_deviation_exact_vs_first_order[{tag}]",
                    float(np.max(np.abs(exact.values - first))),
                    "max |exact - (|A|^2 [P0 + v0 tau_w dP0/dq + 2 v0 tau_a M])|")
    write_csv(out / "observables.csv",
              ("t", "tau0", "zeta", "delta_q_peak", "tau_h", "peak_shift_exact", "peak_shift_first_order_numeric"),
              obs_rows)


def run_oracle(cfg, out, summary, threads):
    s = cfg.packet
    t_final = cfg.oracle_t_final if cfg.oracle_t_final is not None else 1.05 * s.clearing_time()
    setup = EvolutionSetup.auto(cfg.barrier, s.p0, s.q0, s.dq0, t_final, mass=cfg.mass,
                                dx=cfg.oracle_dx, dt=cfg.oracle_dt)
    amps = _amplitudes(cfg)
    tt = tunneling_times(amps, s.p0)
    a2 = float(np.abs(amps.evaluate(np.array([s.p0]))[0]) ** 2)
    evo = evolve(setup)
    obs = transmitted_observables(evo, cfg.barrier)
    write_csv(out / "oracle.csv", ORACLE_COLUMNS,
              [(obs.t, obs.transmission, obs.peak_q, obs.half_height_q, obs.variance)])
    if cfg.oracle_snapshot:
        write_csv(out / "oracle_snapshot.csv", ("q", "density"), zip(evo.x, evo.density))

    so = shift_observables(tt, s, obs.t)
    advance = obs.peak_q - s.center(obs.t)
    t_ref = momentum_resolved_transmission(cfg.barrier, s.p0, s.dq0, cfg.mass)
    summary.add("grid", f"n={setup.n_points} dx={setup.dx:.10g} dt={setup.dt:.10g}",
                "split-operator grid")
    summary.add("norm_drift", evo.norm_drift, "|norm(T) - norm(0)|")
    summary.add("t_final", obs.t, "oracle end time")
    summary.add("transmission_oracle", obs.transmission, "int_{q > c + D} |psi|^2")
    summary.add("abs_A2", a2, "|A(p0)|^2")
    summary.add("transmission_momentum_resolved", t_ref, "int |A(p)|^2 |phi(p)|^2 dp")
    summary.add("peak_advance_oracle", advance, "oracle transmitted peak minus Q(t)")
    summary.add("peak_advance_first_order", so.delta_q_peak,
                "2 v0 tau0 / (sqrt(1 + zeta^2) + 1)")
    rel = abs(advance - so.delta_q_peak) / abs(so.delta_q_peak)
    summary.check("peak_advance_relative_deviation", rel, cfg.tol_oracle_peak,
                  "first-order vs oracle")
    tol_t = cfg.tol_transmission
    if tol_t is None:
        tol_t = 2.0 * (s.dp0 / abs(s.p0)) ** 2 + 1e-4
    summary.check("transmission_deviation", abs(obs.transmission - a2), tol_t,
                  "|oracle transmission - |A(p0)|^2|")


def run_sweep(cfg, out, summary, threads):
    s = cfg.packet
    amps = _amplitudes(cfg)
    tt = tunneling_times(amps, s.p0)
    rows = []
    for t in cfg.times:
        so = shift_observables(tt, s, t)
        rows.append((t, so.tau0, so.zeta, so.delta_q_peak, so.tau_h, so.half_height_shift))
    write_csv(out / "shift_sweep.csv",
              ("t", "tau0", "zeta", "delta_q_peak", "tau_h", "half_height_shift"), rows)
    summary.add("tau_w", tt.tau_w, "phase time at p0")
    summary.add("tau_a", tt.tau_a, "amplitude time at p0")
    t_star = sign_change_time(tt, s)
    summary.add("t_star_predicted", "none" if t_star is None else f"{t_star:.10g}",
                "m tau_w / (2 tau_a dp0^2), where tau0 = 0")
    dq = np.array([r[3] for r in rows])
    flips = np.flatnonzero(np.sign(dq[:-1]) * np.sign(dq[1:]) < 0)
    if flips.size:
        j = int(flips[0])
        summary.add("sign_change_observed", f"between t={rows[j][0]:.10g} and t={rows[j + 1][0]:.10g}",
                    "first sign change of delta_q_peak along the sweep")
    else:
        summary.add("sign_change_observed", "none", "delta_q_peak along the sweep")
    rel = max(abs((r[4] + tt.tau_w) - 0.5 * (r[1] + tt.tau_w)) for r in rows)
    summary.add("max_half_height_identity_defect", rel,
                "max |(tau_h + tau_w) - (tau0 + tau_w) / 2| over the sweep")


RUNNERS = {
    "amplitudes": run_amplitudes,
    "times": run_times,
    "propagator": run_propagator,
    "distribution": run_distribution,
    "oracle-compare": run_oracle,
    "shift-sweep": run_sweep,
}


# -- entry points -----------------------------------------------------------


def _fail(code: int, message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _load_and_build(path: Path) -> ExperimentConfig:
    try:
        return build(load(path))
    except (InvalidParameterError, OutOfRangeError, ConfigurationError) as exc:
        if isinstance(exc, ConfigValidationError):
            raise
        raise ConfigValidationError("config", str(exc)) from exc


def cmd_validate(args) -> int:
    path = Path(args.config)
    try:
        cfg = _load_and_build(path)
    except ConfigParseError as exc:
        return _fail(EXIT_PARSE, str(exc))
    except ConfigValidationError as exc:
        return _fail(EXIT_VALIDATION, str(exc))
    print(f"ok: {path.name} describes a valid {cfg.kind!r} experiment")
    return EXIT_OK


def cmd_run(args) -> int:
    path = Path(args.config)
    out = Path(args.output)
    try:
        cfg = _load_and_build(path)
        threads = thread_count()
    except ConfigParseError as exc:
        return _fail(EXIT_PARSE, str(exc))
    except ConfigValidationError as exc:
        return _fail(EXIT_VALIDATION, str(exc))
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        return _fail(EXIT_IO, f"cannot create output directory {out}: {exc}")

    summary = Summary(cfg, path)
    try:
        RUNNERS[cfg.kind](cfg, out, summary, threads)
    except (InvalidParameterError, OutOfRangeError, ConfigurationError) as exc:
        return _fail(EXIT_VALIDATION, f"{type(exc).__name__}: {exc}")
    except (TunnelTimeError, ArithmeticError) as exc:
        return _fail(EXIT_NUMERICAL, f"{type(exc).__name__}: {exc}")
    except OSError as exc:
        return _fail(EXIT_IO, str(exc))
    write_text(out / "summary.txt", summary.text())
    print(summary.text(), end="")
    return EXIT_OK


def cmd_list(args) -> int:
    for name, desc in EXPERIMENTS.items():
        print(f"{name:16s} {desc}")
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tunneltime", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the experiment described by a config file")
    p_run.add_argument("config")
    p_run.add_argument("-o", "--output", required=True, help="output directory")
    p_run.set_defaults(func=cmd_run)

    p_val = sub.add_parser("validate", help="parse and validate a config file")
    p_val.add_argument("config")
    p_val.set_defaults(func=cmd_validate)

    p_list = sub.add_parser("list-experiments", help="list the experiment kinds")
    p_list.set_defaults(func=cmd_list)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
