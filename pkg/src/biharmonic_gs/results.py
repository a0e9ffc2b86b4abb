"""Result envelopes and lossless text output (JSON and CSV, 17 significant digits)."""

from __future__ import annotations

import csv
import datetime as _dt
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .verify import IdentityReport

__all__ = ["ResultEnvelope", "dumps", "write_csv", "read_csv", "fmt"]


def fmt(x: float) -> str:
    """17 significant digits; integral values keep a trailing ".0" so they read back as floats."""
    text = format(float(x), ".17g")
    if text.lstrip("-").isdigit():
        text += ".0"
    return text


def _encode(obj, indent: int, level: int) -> str:
    pad = "\n" + " " * (indent * (level + 1))
    end = "\n" + " " * (indent * level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if math.isnan(obj):
            return "NaN"
        if math.isinf(obj):
            return "Infinity" if obj > 0 else "-Infinity"
        return fmt(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if hasattr(obj, "item") and callable(obj.item):  # numpy scalar
        return _encode(obj.item(), indent, level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{" + pad + ("," + pad).join(items) + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [_encode(v, indent, level + 1) for v in obj]
        return "[" + pad + ("," + pad).join(items) + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """JSON text with every float written at 17 significant digits."""
    return _encode(obj, indent, 0) + "\n"


def _now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


@dataclass
class ResultEnvelope:
    command: str
    config: dict
    payload: dict
    identity_reports: list = field(default_factory=list)
    version: str = __version__
    timestamp: str = field(default_factory=_now)

    @property
    def verified(self) -> bool:
        return all(r.passed for r in self.identity_reports)

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "timestamp": self.timestamp,
            "command": self.command,
            "config": self.config,
            "payload": self.payload,
            "identity_reports": [r.to_dict() for r in self.identity_reports],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ResultEnvelope":
        return cls(
            command=d["command"],
            config=d["config"],
            payload=d["payload"],
            identity_reports=[IdentityReport.from_dict(r) for r in d["identity_reports"]],
            version=d["version"],
            timestamp=d["timestamp"],
        )

    def dumps(self) -> str:
        return dumps(self.to_dict())

    def write(self, path: str | Path) -> Path:
        path = Path(path)
        path.write_text(self.dumps())
        return path

    @classmethod
    def read(cls, path: str | Path) -> "ResultEnvelope":
        return cls.from_dict(json.loads(Path(path).read_text()))


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return fmt(v)
    return str(v)


def write_csv(rows: list[dict], columns: list[str] | None = None) -> str:
    """CSV text for a list of flat records; floats at 17 significant digits."""
    columns = columns or (list(rows[0]) if rows else [])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(r.get(c, "")) for c in columns])
    return buf.getvalue()


def _parse(cell: str):
    if cell in ("true", "false"):
        return cell == "true"
    if cell == "":
        return None
    try:
        return int(cell)
    except ValueError:
        pass
    try:
        return float(cell)
    except ValueError:
        return cell


def read_csv(text: str) -> list[dict]:
    r = csv.reader(io.StringIO(text))
    header = next(r)
    return [dict(zip(header, (_parse(c) for c in row))) for row in r if row]
