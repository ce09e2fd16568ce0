"""Run records: JSON-lines audit log and CSV tables with lossless number formatting."""
from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone

import numpy as np

from .errors import ConfigError

SCHEMA_VERSION = "1.0"
SUPPORTED_MAJOR = 1

SWEEP_COLUMNS = ("kappa", "estimate", "std_error", "paper_closed_form", "oracle", "area")


def fmt(x) -> str:
    """17 significant digits for floats; plain text otherwise."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        obj = float(obj)
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


@dataclass
class RunRecord:
    command: str
    config: dict
    results: list
    diagnostics: dict = field(default_factory=dict)
    schema_version: str = SCHEMA_VERSION
    timestamp: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat())

    def to_json(self) -> str:
        return json.dumps(to_jsonable(asdict(self)), sort_keys=True)


def check_schema(version: str) -> None:
    try:
        major = int(str(version).split(".")[0])
    except ValueError:
        raise ConfigError(f"unreadable schema_version {version!r}") from None
    if major != SUPPORTED_MAJOR:
        raise ConfigError(f"unsupported record schema major version {major} (this reader handles {SUPPORTED_MAJOR})")


def append_jsonl(path: str, record: RunRecord) -> None:
    """Append one record as a single write, flushed to disk."""
    line = record.to_json() + "\n"
    fd = os.open(path, os.O_WRONLY | os.O_CREAT | os.O_APPEND, 0o644)
    try:
        os.write(fd, line.encode())
        os.fsync(fd)
    finally:
        os.close(fd)


def read_jsonl(path: str) -> list[dict]:
    out = []
    with open(path) as fh:
        for line in fh:
            if not line.strip():
                continue
            rec = json.loads(line)
            check_schema(rec.get("schema_version", ""))
            out.append(rec)
    return out


def csv_text(rows: list[dict], columns=None) -> str:
    if not rows:
        return ""
    columns = list(columns or rows[0].keys())
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(row.get(c)) for c in columns])
    return buf.getvalue()


def write_csv(path: str, rows: list[dict], columns=None) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(csv_text(rows, columns))
