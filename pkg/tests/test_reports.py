import csv

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from tunneltime.reports import format_number, write_csv, write_text


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_round_trip(x):
    assert float(format_number(x)) == x


def test_integers_stay_integers():
    assert format_number(3) == "3"
    assert format_number(np.int64(7)) == "7"
    assert format_number(2.0) == "2.0000000000000000e+00"


def test_csv_layout(tmp_path):
    path = write_csv(tmp_path / "sub" / "a.csv", ("x", "y"), [(1.5, -2e-300), (0.1, 3)])
    text = path.read_text()
    assert text.splitlines()[0] == "x,y"
    rows = list(csv.reader(text.splitlines()[1:]))
    assert [float(v) for v in rows[0]] == [1.5, -2e-300]
    assert rows[1] == ["1.0000000000000001e-01", "3"]


def test_atomic_write_leaves_no_temporaries(tmp_path):
    write_text(tmp_path / "s.txt", "one\n")
    write_text(tmp_path / "s.txt", "two\n")
    assert (tmp_path / "s.txt").read_text() == "two\n"
    assert [p.name for p in tmp_path.iterdir()] == ["s.txt"]
