"""CSV and JSON input/output.

Quarterly dates are written ``YYYYQn`` and mapped onto an integer clock
with 1964Q2 at index 0, so 1976Q3 is 49 and 1986Q2 is 88.
"""

from __future__ import annotations

import csv
import io
import json
import re
from typing import Iterable, Mapping, Sequence

import numpy as np

from .coefficients import table_path
from .errors import ConfigError, DataError

QUARTER_ORIGIN = (1964, 2)
_QUARTER = re.compile(r"^\s*(\d{4})\s*[Qq]\s*([1-4])\s*$")


def parse_quarter(text: str) -> int:
    """``"1976Q3"`` -> 49."""
    m = _QUARTER.match(str(text))
    if not m:
        raise DataError(f"not a quarterly date: {text!r}")
    year, quarter = int(m.group(1)), int(m.group(2))
    return 4 * (year - QUARTER_ORIGIN[0]) + quarter - QUARTER_ORIGIN[1]


def format_quarter(index: int) -> str:
    total = 4 * QUARTER_ORIGIN[0] + QUARTER_ORIGIN[1] - 1 + int(index)
    return f"{total // 4}Q{total % 4 + 1}"


def parse_date(text) -> int:
    """Quarterly ``YYYYQn`` or a plain integer index."""
    s = str(text).strip()
    if _QUARTER.match(s):
        return parse_quarter(s)
    try:
        return int(s)
    except ValueError:
        raise DataError(f"unrecognised date {text!r}; use YYYYQn or an integer") from None


def _rows(path: str):
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            rows = [r for r in reader if r and any(c.strip() for c in r)]
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if header is None:
        raise DataError(f"{path} is empty")
    return [h.strip().lower() for h in header], rows


def read_series_csv(path: str):
    """Read a ``date,value`` file.

    Returns ``(times, values, quarterly)``; times must be consecutive.
    """
    header, rows = _rows(path)
    if len(header) < 2:
        raise DataError(f"{path}: expected columns date,value")
    di = header.index("date") if "date" in header else 0
    vi = header.index("value") if "value" in header else 1
    if not rows:
        raise DataError(f"{path} has no data rows")
    try:
        times = np.array([parse_date(r[di]) for r in rows], dtype=int)
        values = np.array([float(r[vi]) for r in rows])
    except (IndexError, ValueError) as exc:
        raise DataError(f"{path}: bad row ({exc})") from exc
    if np.any(np.diff(times) != 1):
        raise DataError(f"{path}: dates must be consecutive without gaps")
    if not np.all(np.isfinite(values)):
        raise DataError(f"{path}: values must be finite")
    quarterly = bool(_QUARTER.match(rows[0][di]))
    return times, values, quarterly


def read_custom_table(csv_path: str, name: str = "custom_table"):
    """Coefficient path from columns ``t, phi1..phip, theta1..thetaq, drift, sigma2``.

    Missing ``drift`` defaults to zero and missing ``sigma2`` to one.
    """
    header, rows = _rows(csv_path)
    if "t" not in header:
        raise ConfigError(f"{csv_path}: custom table needs a 't' column")
    if not rows:
        raise ConfigError(f"{csv_path}: custom table has no rows")

    def numbered(prefix):
        cols = sorted((int(h[len(prefix):]), i) for i, h in enumerate(header)
                      if h.startswith(prefix) and h[len(prefix):].isdigit())
        if [k for k, _ in cols] != list(range(1, len(cols) + 1)):
            raise ConfigError(f"{csv_path}: {prefix} columns must be numbered 1..n")
        return [i for _, i in cols]

    ar_cols, ma_cols = numbered("phi"), numbered("theta")
    try:
        data = np.array([[float(c) for c in r] for r in rows])
    except ValueError as exc:
        raise ConfigError(f"{csv_path}: non-numeric entry ({exc})") from exc
    if data.shape[1] != len(header):
        raise ConfigError(f"{csv_path}: ragged rows")
    col = {h: data[:, i] for i, h in enumerate(header)}
    return table_path(
        col["t"].astype(int),
        ar=data[:, ar_cols] if ar_cols else None,
        ma=data[:, ma_cols] if ma_cols else None,
        drift=col.get("drift"),
        sigma2=col.get("sigma2"),
        name=name,
    )


def load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: malformed JSON: {exc}") from exc


def dumps_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if value is None:
        return ""
    return str(value)


def dumps_csv(columns: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def records_to_csv(records: Sequence[Mapping]) -> str:
    """CSV from a list of flat dicts sharing keys; column order from the first."""
    if not records:
        return ""
    columns = list(records[0])
    return dumps_csv(columns, ([r.get(c) for c in columns] for r in records))


def write_text(path: str | None, text: str) -> None:
    """Write to ``path``, or standard output when ``path`` is None or ``-``."""
    if path in (None, "-"):
        import sys

        sys.stdout.write(text)
        return
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise ConfigError(f"cannot write {path}: {exc}") from exc
