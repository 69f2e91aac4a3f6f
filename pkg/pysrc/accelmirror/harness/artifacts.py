"""
Run artifacts on disk: one CSV trace per algorithm plus a JSON metadata file.

CSV layout:
  - header ``k,f_gap,lyap_primal,lyap_dual``
  - numbers written with ``repr`` (shortest round-trip decimal)
  - an empty field where a quantity is undefined
"""

from __future__ import annotations

import csv
import json
import logging
import math
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any, Final

from .._common import ConfigError
from .._trace import TraceRecord

logger = logging.getLogger(__name__)

CSV_HEADER: Final[tuple[str, ...]] = ("k", "f_gap", "lyap_primal", "lyap_dual")
METADATA_NAME: Final[str] = "metadata.json"


def csv_name(algorithm: str) -> str:
    return f"{algorithm}.csv"


def format_number(value: float | None) -> str:
    """Shortest round-trip decimal, or the empty string for None."""
    if value is None:
        return ""
    return repr(float(value))


def write_trace_csv(path: str | Path, records: Iterable[TraceRecord]) -> Path:
    """
    Write a trace. Identical records give byte-identical files.

    Raises:
        OSError: If the path is not writable.
    """
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for rec in records:
            writer.writerow(
                (
                    str(rec.k),
                    format_number(rec.f_gap),
                    format_number(rec.lyapunov_primal),
                    format_number(rec.lyapunov_dual),
                )
            )
    logger.info("wrote %s", out)
    return out


def _parse_optional(text: str) -> float | None:
    return None if text == "" else float(text)


def read_trace_csv(path: str | Path) -> list[TraceRecord]:
    """
    Read a trace written by ``write_trace_csv``.

    Raises:
        ConfigError: If the file is missing or is not a trace CSV.
    """
    src = Path(path)
    try:
        with src.open(encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise ConfigError(f"Cannot read trace {src}: {exc}") from exc
    if not rows or tuple(rows[0]) != CSV_HEADER:
        raise ConfigError(f"{src} does not start with the header {','.join(CSV_HEADER)}")
    records = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(CSV_HEADER):
            raise ConfigError(f"{src}:{lineno}: expected {len(CSV_HEADER)} fields")
        try:
            records.append(
                TraceRecord(
                    k=int(row[0]),
                    f_gap=float(row[1]),
                    lyapunov_primal=_parse_optional(row[2]),
                    lyapunov_dual=_parse_optional(row[3]),
                )
            )
        except ValueError as exc:
            raise ConfigError(f"{src}:{lineno}: {exc}") from exc
    return records


def _clean(value: Any) -> Any:
    """Make a metadata value JSON-safe (tuples to lists, non-finite floats to strings)."""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)
    if hasattr(value, "tolist"):
        return _clean(value.tolist())
    return value


def write_metadata(path: str | Path, metadata: dict[str, Any]) -> Path:
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(_clean(metadata), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    logger.info("wrote %s", out)
    return out


def read_metadata(path: str | Path) -> dict[str, Any]:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise ConfigError(f"Cannot read metadata {path}: {exc}") from exc


def trajectory_header(blocks: Sequence[str], d: int) -> list[str]:
    """``t`` followed by one column per state component, e.g. ``zeta_0 .. x_1``."""
    return ["t", *(f"{block}_{i}" for block in blocks for i in range(d))]


def write_trajectory_csv(
    path: str | Path,
    blocks: Sequence[str],
    d: int,
    times: Sequence[float],
    states: Sequence[Sequence[float]],
) -> Path:
    """
    Write sampled ODE states, one row per time.

    Raises:
        ConfigError: If a state row does not match the block layout.
    """
    header = trajectory_header(blocks, d)
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for t, row in zip(times, states):
            values = [float(v) for v in row]
            if len(values) != len(header) - 1:
                raise ConfigError(
                    f"state row has {len(values)} entries, expected {len(header) - 1}"
                )
            writer.writerow([format_number(t), *(format_number(v) for v in values)])
    logger.info("wrote %s", out)
    return out
