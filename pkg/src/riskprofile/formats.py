"""File formats: forecast CSV files, flat key/value configs and numeric output."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .errors import InputError

__all__ = [
    "ForecastRecords",
    "read_forecast_file",
    "parse_config_text",
    "read_config_file",
    "parse_dims",
    "fmt",
    "dumps_report",
    "write_csv",
]

REQUIRED_COLUMN = "realized_prob"


class FormatError(InputError):
    """An input file could not be parsed; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class ForecastRecords:
    realized_prob: np.ndarray
    correct: np.ndarray | None = None
    model_id: tuple[str, ...] | None = None

    def groups(self):
        """Yield ``(model_id, records)`` per model, or ``(None, self)`` without ids."""
        if self.model_id is None:
            yield None, self
            return
        ids = np.array(self.model_id)
        for mid in sorted(set(self.model_id)):
            m = ids == mid
            yield mid, ForecastRecords(
                self.realized_prob[m],
                None if self.correct is None else self.correct[m],
                None,
            )


def read_forecast_file(path) -> ForecastRecords:
    """Read a CSV with a ``realized_prob`` column and optional ``correct``/``model_id``."""
    path = Path(path)
    try:
        fh = path.open(newline="")
    except OSError as exc:
        raise FormatError(f"cannot open {path}: {exc.strerror}") from None
    with fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise FormatError("file is empty")
        cols = [c.strip() for c in reader.fieldnames]
        reader.fieldnames = cols
        if REQUIRED_COLUMN not in cols:
            raise FormatError(f"missing required column '{REQUIRED_COLUMN}'", 1)
        has_correct = "correct" in cols
        has_model = "model_id" in cols
        probs, correct, models = [], [], []
        for row in reader:
            line = reader.line_num
            if all((v or "").strip() == "" for v in row.values()):
                continue
            raw = (row.get(REQUIRED_COLUMN) or "").strip()
            try:
                p = float(raw)
            except ValueError:
                raise FormatError(f"realized_prob {raw!r} is not a number", line) from None
            if not 0.0 <= p <= 1.0:
                raise FormatError(f"realized_prob {p!r} outside [0, 1]", line)
            probs.append(p)
            if has_correct:
                c = (row.get("correct") or "").strip()
                if c not in ("0", "1"):
                    raise FormatError(f"correct {c!r} must be 0 or 1", line)
                correct.append(int(c))
            if has_model:
                models.append((row.get("model_id") or "").strip())
    if not probs:
        raise FormatError("no data rows")
    return ForecastRecords(
        np.array(probs),
        np.array(correct) if has_correct else None,
        tuple(models) if has_model else None,
    )


def parse_dims(text) -> tuple[int, ...]:
    """Parse ``"1-10"``, ``"2,4,6"`` or a mix such as ``"1-3,8"``."""
    if isinstance(text, (list, tuple)):
        return tuple(int(v) for v in text)
    out = []
    for part in str(text).replace(" ", "").split(","):
        if not part:
            continue
        if "-" in part:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    if not out:
        raise ValueError("empty dims specification")
    return tuple(out)


def parse_config_text(text: str) -> dict[str, str]:
    """Parse flat ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for i, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise FormatError(f"expected 'key = value', got {raw.strip()!r}", i)
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise FormatError("empty key", i)
        out[key.replace("-", "_")] = value.strip("\"'")
    return out


def read_config_file(path) -> dict[str, str]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise FormatError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config_text(text)


def coerce_fields(cls, values: dict[str, str]) -> dict:
    """Convert string values to the types of the matching dataclass fields."""
    types = {f.name: f.default for f in fields(cls)}
    out = {}
    for key, value in values.items():
        if key not in types:
            continue
        default = types[key]
        try:
            if isinstance(default, tuple):
                out[key] = parse_dims(value)
            elif isinstance(default, bool):
                out[key] = str(value).lower() in ("1", "true", "yes")
            elif isinstance(default, int):
                out[key] = int(value)
            elif isinstance(default, float):
                out[key] = float(value)
            else:
                out[key] = str(value)
        except (TypeError, ValueError):
            raise InputError(f"{key}: cannot parse {value!r}") from None
    return out


def fmt(x: float) -> str:
    """12 significant digits; ``inf``/``nan`` spelled out."""
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    s = f"{x:.12g}"
    return "0" if s == "-0" else s


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return "nan"
        return x
    return obj


def dumps_report(report: dict) -> str:
    """Deterministic JSON text (sorted keys, round-trip floats, ``"inf"`` literal)."""
    return json.dumps(_jsonable(report), sort_keys=True, indent=2) + "\n"


def write_csv(fh, header, rows) -> None:
    fh.write(",".join(header) + "\n")
    for row in rows:
        fh.write(",".join(v if isinstance(v, str) else fmt(float(v)) if not isinstance(v, (int, np.integer)) else str(int(v)) for v in row) + "\n")
