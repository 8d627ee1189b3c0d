import pandas as pd
import pytest

from app.core.errors import IoError
from app.scattering.sweep_engine import SweepRecord
from app.storage.csv_storage import format_number, write_sweep_csv
from app.storage.sweep_types import COLUMNS_BY_MODE, MODE_COUPLED, MODE_SELFADJOINT

ROW = {
    "rank": 1,
    "det_re": -1.0,
    "det_im": 0.0,
    "ssf": 0.5,
    "residual_bk": 0.0,
    "residual_det_ratio": 0.0,
    "unitarity": 0.0,
}


def test_format_number():
    assert format_number(3) == "3"
    assert format_number(2.0) == "2"
    assert format_number(-0.0) == "0"
    assert format_number(0.1) == "0.1"
    assert format_number(1e-20) == "1e-20"
    assert format_number(True) == "1"


def test_header_only_for_empty_sweep(tmp_path):
    destination = tmp_path / "empty.csv"
    write_sweep_csv([], destination, MODE_COUPLED)
    assert destination.read_text(encoding="utf-8") == ",".join(COLUMNS_BY_MODE[MODE_COUPLED]) + "\n"


def test_rows_and_skipped_points(tmp_path):
    destination = tmp_path / "out" / "sweep.csv"
    records = [SweepRecord(lam=1.0, row=ROW), SweepRecord.skip(2.5, "SingularError: singular")]
    write_sweep_csv(records, destination, MODE_SELFADJOINT)
    lines = destination.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "lambda,rank,det_re,det_im,ssf,residual_bk,residual_det_ratio,unitarity,skipped"
    assert lines[1] == "1,1,-1,0,0.5,0,0,0,0"
    assert lines[2] == "2.5,,,,,,,,1"


def test_table_reads_back_with_pandas(tmp_path):
    destination = tmp_path / "sweep.csv"
    write_sweep_csv([SweepRecord(lam=0.25, row=ROW)], destination, MODE_SELFADJOINT)
    frame = pd.read_csv(destination)
    assert list(frame.columns) == COLUMNS_BY_MODE[MODE_SELFADJOINT]
    assert frame.loc[0, "ssf"] == 0.5


def test_unwritable_destination(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x", encoding="utf-8")
    with pytest.raises(IoError):
        write_sweep_csv([], blocker / "sweep.csv", MODE_SELFADJOINT)
