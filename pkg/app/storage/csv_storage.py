"""
CSV SWEEP STORAGE

Sweep tables are the output boundary of the lab: one row per grid point,
in grid order, with a header row.

Format:
- "," separator, "\n" line ends, "." decimal point
- integer-valued numbers without a fraction, other floats in shortest
  round-trip form (repr)
- skipped points keep their lambda, leave numeric fields empty and set skipped=1

Column layouts per sweep mode live in app.storage.sweep_types.
"""

import csv
import logging
import math
import threading
from pathlib import Path
from typing import Dict, List, Union

from app.core.errors import IoError
from app.scattering.sweep_engine import SweepRecord
from app.storage.sweep_types import COLUMNS_BY_MODE, LAMBDA_COLUMN, SKIPPED_COLUMN

logger = logging.getLogger(__name__)

# Single writer at a time
_csv_lock = threading.Lock()


def format_number(value) -> str:
    """Locale-independent shortest round-trip text of a number."""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    value = float(value)
    if math.isfinite(value) and value.is_integer():
        return str(int(value))
    return repr(value)


def record_to_row(record: SweepRecord, columns: List[str]) -> Dict[str, str]:
    row = {column: "" for column in columns}
    row[LAMBDA_COLUMN] = format_number(record.lam)
    row[SKIPPED_COLUMN] = "1" if record.skipped else "0"
    if not record.skipped:
        for column in columns:
            if column in (LAMBDA_COLUMN, SKIPPED_COLUMN):
                continue
            row[column] = format_number(record.row[column])
    return row


# ══════════════════════════════════════════════════════════════
# SWEEP TABLES
# ══════════════════════════════════════════════════════════════

def write_sweep_csv(records: List[SweepRecord], destination: Union[str, Path], mode: str) -> None:
    """
    Write a sweep table, replacing any existing file.

    Raises:
        IoError: the destination cannot be created or written
    """
    columns = COLUMNS_BY_MODE[mode]
    path = Path(destination)
    with _csv_lock:
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, 'w', newline='', encoding='utf-8') as f:
                writer = csv.DictWriter(f, fieldnames=columns, lineterminator="\n")
                writer.writeheader()
                for record in records:
                    writer.writerow(record_to_row(record, columns))
        except OSError as exc:
            raise IoError(f"cannot write sweep table to {path}: {exc}") from exc
    logger.info(f"wrote {len(records)} rows to {path}")
