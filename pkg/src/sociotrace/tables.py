"""CSV serialization shared by every exported table.

Conventions: RFC 4180 quoting, UTF-8, LF line endings, a header row with
the record's field names, timestamps as ISO-8601 with UTC offset, floats
with 6 significant digits, None as the empty field, booleans as
true/false, list fields JSON-encoded. Writes are atomic (temp + rename)
so a crashed run never leaves a half-written table.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import os
import tempfile
from datetime import datetime
from typing import Any, get_args, get_origin, get_type_hints


def format_float(value: float) -> str:
    """6 significant digits; stable under write -> parse -> write."""
    return "%.6g" % value


def encode_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format_float(value)
    if isinstance(value, datetime):
        return value.isoformat()
    if isinstance(value, (list, tuple)):
        return json.dumps([list(v) if isinstance(v, tuple) else v for v in value])
    return str(value)


def decode_cell(text: str, annotation: Any) -> Any:
    """Inverse of encode_cell for the annotations used by record types."""
    origin = get_origin(annotation)
    union_args = get_args(annotation)
    if union_args and type(None) in union_args:  # X | None
        if text == "":
            return None
        inner = [a for a in union_args if a is not type(None)][0]
        return decode_cell(text, inner)
    if annotation is datetime:
        return datetime.fromisoformat(text)
    if annotation is bool:
        return text == "true"
    if annotation is int:
        return int(text)
    if annotation is float:
        return float(text)
    if origin in (list, tuple):
        parsed = json.loads(text) if text else []
        args = get_args(annotation)
        if origin is list and args and get_origin(args[0]) is tuple:
            return [tuple(item) for item in parsed]
        return parsed
    return text


def atomic_write_text(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def rows_to_csv_text(header: list[str], rows: list[list[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def write_csv(path: str, header: list[str], rows: list[list[str]]) -> None:
    atomic_write_text(path, rows_to_csv_text(header, rows))


def read_csv(path: str) -> tuple[list[str], list[list[str]]]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            return [], []
        return header, [row for row in reader]


# --- typed record tables ----------------------------------------------------
#
# Record dataclasses serialize one field per column, except fields annotated
# as TimeWindow which expand to window_index/window_start/window_end. The
# expansion lives here so the CSV layer owns one consistent rule.

WINDOW_COLUMNS = ("window_index", "window_start", "window_end")


def _is_window(annotation: Any) -> bool:
    return getattr(annotation, "__name__", "") == "TimeWindow"


def table_header(record_type: type) -> list[str]:
    hints = get_type_hints(record_type)
    header: list[str] = []
    for f in dataclasses.fields(record_type):
        if _is_window(hints[f.name]):
            header.extend(WINDOW_COLUMNS)
        else:
            header.append(f.name)
    return header


def record_to_row(record: Any) -> list[str]:
    hints = get_type_hints(type(record))
    row: list[str] = []
    for f in dataclasses.fields(record):
        value = getattr(record, f.name)
        if _is_window(hints[f.name]):
            row.append(str(value.index))
            row.append(value.start.isoformat())
            row.append(value.end.isoformat())
        else:
            row.append(encode_cell(value))
    return row


def row_to_record(record_type: type, row: list[str]) -> Any:
    hints = get_type_hints(record_type)
    kwargs: dict[str, Any] = {}
    cursor = 0
    for f in dataclasses.fields(record_type):
        annotation = hints[f.name]
        if _is_window(annotation):
            kwargs[f.name] = annotation(
                index=int(row[cursor]),
                start=datetime.fromisoformat(row[cursor + 1]),
                end=datetime.fromisoformat(row[cursor + 2]),
            )
            cursor += 3
        else:
            kwargs[f.name] = decode_cell(row[cursor], annotation)
            cursor += 1
    return record_type(**kwargs)


def write_records(path: str, record_type: type, records: list[Any]) -> None:
    write_csv(path, table_header(record_type), [record_to_row(r) for r in records])


def read_records(path: str, record_type: type) -> list[Any]:
    _, rows = read_csv(path)
    return [row_to_record(record_type, row) for row in rows]
