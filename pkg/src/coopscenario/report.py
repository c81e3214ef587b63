"""CSV / JSON serialization of experiment rows."""

from __future__ import annotations

import csv
import io
import json
import sys
from pathlib import Path
from typing import Iterable, Optional, Union

from .errors import ConfigError
from .experiments import FIELDS, ReportRow

_INT_FIELDS = {"K", "seed", "s"}


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    return f"{value:.12g}"


def _json_value(value):
    if isinstance(value, float):
        return float(f"{value:.12g}")
    return value


def render(rows: Iterable[ReportRow], fmt: str = "csv") -> str:
    rows = sorted(rows, key=lambda r: (r.K, r.seed))
    if not rows:
        raise ValueError("no rows to report")
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(FIELDS)
        for row in rows:
            writer.writerow([_fmt(getattr(row, f)) for f in FIELDS])
        return buf.getvalue()
    if fmt == "json":
        payload = [{f: _json_value(getattr(row, f)) for f in FIELDS} for row in rows]
        return json.dumps(payload, indent=2) + "\n"
    raise ConfigError(f"format: expected csv or json, got {fmt!r}")


def emit_report(rows: Iterable[ReportRow], fmt: str = "csv", path: Optional[Union[str, Path]] = None) -> None:
    """Write rows sorted by (K, seed); ``path`` of ``None`` or ``-`` means stdout."""
    text = render(rows, fmt)
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        return
    Path(path).write_text(text, encoding="utf-8")


def _parse_cell(name: str, cell: str):
    if cell == "":
        return None
    if name == "core_empty":
        return cell == "true"
    if name in _INT_FIELDS:
        return int(cell)
    return float(cell)


def read_report(path: Union[str, Path]) -> list[ReportRow]:
    text = Path(path).read_text(encoding="utf-8")
    if str(path).endswith(".json"):
        return [ReportRow(**item) for item in json.loads(text)]
    reader = csv.DictReader(io.StringIO(text))
    return [ReportRow(**{k: _parse_cell(k, v) for k, v in rec.items()}) for rec in reader]
