"""Reading series and writing result records as CSV or JSON.

Numbers are written with 17 significant digits so that every float
survives a write/read cycle bit for bit; infinities are written as
``+inf`` / ``-inf`` (quoted strings in JSON).
"""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

from .errors import EmptyInputError, ParseError
from .spectrogram import TimeSeries

FORMATS = ("csv", "json")


def infer_format(path, default: str = "csv") -> str:
    suffix = Path(path).suffix.lower().lstrip(".") if path else ""
    return suffix if suffix in FORMATS else default


def _parse_float(text, row):
    try:
        x = float(text)
    except (TypeError, ValueError):
        raise ParseError(row, f"not a number: {text!r}") from None
    if not math.isfinite(x):
        raise ParseError(row, f"non-finite value {text!r}")
    return x


def _read_csv(text: str) -> TimeSeries:
    reader = csv.reader(io.StringIO(text))
    rows = [(n, r) for n, r in enumerate(reader, start=1) if r and any(c.strip() for c in r)]
    if not rows:
        raise EmptyInputError("input file is empty")
    _, header = rows[0]
    header = [c.strip().lower() for c in header]
    if header == ["value"]:
        has_time = False
    elif header == ["time", "value"]:
        has_time = True
    else:
        raise ParseError(rows[0][0], f"header must be 'value' or 'time,value', got {','.join(header)!r}")
    times, values = [], []
    for line, r in rows[1:]:
        if len(r) != len(header):
            raise ParseError(line, f"expected {len(header)} field(s), got {len(r)}")
        if has_time:
            times.append(_parse_float(r[0], line))
        values.append(_parse_float(r[-1], line))
    if not values:
        raise EmptyInputError("input file has a header but no data rows")
    return _series(values, times if has_time else None)


def _read_json(text: str) -> TimeSeries:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise ParseError(err.lineno, err.msg) from None
    if not isinstance(data, list):
        raise ParseError(1, "top level must be an array")
    if not data:
        raise EmptyInputError("input array is empty")
    times, values = [], []
    records = isinstance(data[0], dict)
    for pos, item in enumerate(data, start=1):
        if records:
            if not isinstance(item, dict) or "value" not in item:
                raise ParseError(pos, "expected an object with a 'value' key")
            if "time" in item:
                times.append(_parse_float(item["time"], pos))
            values.append(_parse_float(item["value"], pos))
        else:
            if isinstance(item, (bool, dict, list)) or item is None:
                raise ParseError(pos, f"expected a number, got {item!r}")
            values.append(_parse_float(item, pos))
    if times and len(times) != len(values):
        raise ParseError(1, "either every record or none must carry 'time'")
    return _series(values, times or None)


def _series(values, times):
    try:
        return TimeSeries(values, timestamps=times)
    except ValueError as err:
        raise ParseError(1, str(err)) from None


def read_series(path, fmt: str | None = None) -> TimeSeries:
    """Load a series from CSV (``value`` or ``time,value`` header) or JSON.

    JSON may be an array of numbers or of ``{"time": .., "value": ..}``
    objects.  :class:`ParseError` rows are file line numbers for CSV and
    1-based element positions for JSON.
    """
    fmt = fmt or infer_format(path)
    text = Path(path).read_text()
    if fmt == "csv":
        return _read_csv(text)
    if fmt == "json":
        return _read_json(text)
    raise ValueError(f"unknown input format {fmt!r}")


def format_number(x) -> str:
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, int):
        return str(x)
    x = float(x)
    if math.isinf(x):
        return "+inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return f"{x:.17g}"


def _json_value(v) -> str:
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, float) and not math.isfinite(v):
        return json.dumps(format_number(v))
    return format_number(v)


def _json_object(record: dict) -> str:
    return "{" + ", ".join(f"{json.dumps(k)}: {_json_value(v)}" for k, v in record.items()) + "}"


def dumps_records(records: list[dict], fmt: str, single: bool = False) -> str:
    """Serialize flat records; ``single`` writes JSON as one object, not an array."""
    if fmt == "json":
        if single:
            return _json_object(records[0]) + "\n"
        body = ",\n".join("  " + _json_object(r) for r in records)
        return "[\n" + body + "\n]\n" if records else "[]\n"
    if fmt == "csv":
        buf = io.StringIO()
        keys = list(records[0]) if records else []
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(keys)
        for r in records:
            writer.writerow([v if isinstance(v, str) else format_number(v) for v in r.values()])
        return buf.getvalue()
    raise ValueError(f"unknown output format {fmt!r}")


def _coerce(text):
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        return text
    if text in ("+inf", "inf"):
        return math.inf
    if text == "-inf":
        return -math.inf
    try:
        return int(text)
    except (TypeError, ValueError):
        pass
    try:
        return float(text)
    except (TypeError, ValueError):
        return text


def loads_records(text: str, fmt: str) -> list[dict]:
    """Inverse of :func:`dumps_records`: numbers and ``±inf`` come back as numbers."""
    if fmt == "json":
        data = json.loads(text)
        data = [data] if isinstance(data, dict) else data
        return [{k: _coerce(v) for k, v in r.items()} for r in data]
    rows = list(csv.DictReader(io.StringIO(text)))
    return [{k: _coerce(v) for k, v in r.items()} for r in rows]
