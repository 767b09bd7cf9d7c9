"""Report containers, deterministic serialization and atomic file output."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any

SCHEMA_VERSION = 1
SIG_DIGITS = 12

PASS = "PASS"
FAIL = "FAIL"
NOT_APPLICABLE = "NOT_APPLICABLE"


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("NEVLAB_THREADS", "1")))
    except ValueError:
        return 1


def map_radii(fn: Callable[[float], Any], radii: Sequence[float]) -> list:
    """Evaluate ``fn`` on every radius, in order, honouring ``NEVLAB_THREADS``."""
    radii = list(radii)
    n = min(thread_count(), len(radii))
    if n <= 1:
        return [fn(r) for r in radii]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, radii))


def radii_grid(lo: float, hi: float, count: int, log: bool = False) -> list[float]:
    if lo <= 0 or hi < lo or count < 1:
        raise ValueError("radii grid needs 0 < min <= max and count >= 1")
    if count == 1:
        return [float(lo)]
    if log:
        a, b = math.log(lo), math.log(hi)
        return [math.exp(a + (b - a) * k / (count - 1)) for k in range(count)]
    return [lo + (hi - lo) * k / (count - 1) for k in range(count)]


def fmt_float(x: float) -> float | str | None:
    """Round to 12 significant digits; non-finite values become strings."""
    if x is None:
        return None
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x == 0:
        return 0.0
    return float(f"{x:.{SIG_DIGITS - 1}e}")


def normalize(obj: Any) -> Any:
    """Recursively apply ``fmt_float`` and turn tuples and complexes into JSON types."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return fmt_float(obj)
    if isinstance(obj, complex):
        return {"re": fmt_float(obj.real), "im": fmt_float(obj.imag)}
    if isinstance(obj, dict):
        return {str(k): normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [normalize(v) for v in obj]
    if hasattr(obj, "to_json"):
        return normalize(obj.to_json())
    return str(obj)


def dumps(obj: Any) -> str:
    return json.dumps(normalize(obj), indent=2, sort_keys=True) + "\n"


def atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".nevlab-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([normalize(v) for v in row])
    return buf.getvalue()


@dataclass
class VerifierReport:
    """Outcome of a verifier: per-radius rows plus an overall status.

    ``bool(report)`` is True only for PASS.
    """

    name: str
    params: dict
    per_radius: list[dict] = field(default_factory=list)
    status: str = PASS
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool | None:
        if self.status == NOT_APPLICABLE:
            return None
        return self.status == PASS

    def __bool__(self) -> bool:
        return self.status == PASS

    def to_json(self) -> dict:
        out = {
            "schema": SCHEMA_VERSION,
            "name": self.name,
            "params": self.params,
            "per_radius": self.per_radius,
            "pass": self.passed,
            "status": self.status,
        }
        out.update(self.extra)
        return out

    def to_csv(self) -> str:
        return csv_text(
            ["r", "lhs", "rhs", "margin"],
            ([row["r"], row["lhs"], row["rhs"], row["margin"]] for row in self.per_radius),
        )


def row(r: float, lhs: float, rhs: float, **more) -> dict:
    return {"r": r, "lhs": lhs, "rhs": rhs, "margin": rhs - lhs, **more}
