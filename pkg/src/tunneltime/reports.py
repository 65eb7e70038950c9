"""CSV and summary writers used by the experiment runner.

Numbers are written in scientific notation with 17 significant digits so
that a float survives a write/read round trip unchanged. Files are written
to a temporary name in the target directory and renamed into place.
"""

from __future__ import annotations

import csv
import io
import os
import tempfile
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

__all__ = ["format_number", "write_csv", "write_text", "amplitudes_table", "times_table"]


def format_number(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return f"{float(x):.16e}"


def write_text(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([format_number(v) for v in row])
    return write_text(path, buf.getvalue())


AMPLITUDE_COLUMNS = ("kappa", "re_A", "im_A", "abs_A", "arg_A_unwrapped", "re_B", "im_B")
TIMES_COLUMNS = ("kappa0", "tau_w", "tau_a", "tau_bl")
DISTRIBUTION_COLUMNS = ("q", "p_exact", "p_first_order", "p_free_scaled")
OBSERVABLE_COLUMNS = ("t", "tau0", "zeta", "delta_q_peak", "tau_h")
ORACLE_COLUMNS = ("t_final", "transmission", "peak_q", "half_height_q", "variance")
PROPAGATOR_COLUMNS = ("p", "r", "T")


def amplitudes_table(amps):
    B = amps.B if amps.B is not None else np.full(amps.kappa.shape, np.nan + 0j)
    abs_a = np.exp(amps.log_abs_A) if amps.log_abs_A is not None else np.abs(amps.A)
    return zip(amps.kappa, amps.A.real, amps.A.imag, abs_a, amps.phase, B.real, B.imag)


def times_table(times_list):
    return [(t.kappa0, t.tau_w, t.tau_a, t.tau_bl) for t in times_list]
