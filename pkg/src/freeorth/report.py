"""Report rows and their CSV / JSON serialization."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass
from datetime import datetime, timezone

CSV_COLUMNS = ("family", "n", "k", "l", "m", "r", "value", "bound", "fitted", "verdict", "seed")


@dataclass
class Row:
    """One line of a report; empty strings mark parameters that do not apply."""

    family: str
    n: int
    value: float
    bound: str
    verdict: str  # "pass", "fail" or "info"
    k: int | str = ""
    l: int | str = ""
    m: int | str = ""
    r: int | str = ""
    fitted: float | str = ""
    seed: int | str = ""
    anchor: str = ""
    tol: float | str = ""
    params: str = ""

    @property
    def passed(self) -> bool:
        return self.verdict != "fail"


def verdict(ok: bool) -> str:
    return "pass" if ok else "fail"


def _fmt(x) -> str:
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        return repr(x)
    return str(x)


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in rows:
        d = asdict(row)
        w.writerow([_fmt(d[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def _clean(x):
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return x


def rows_to_json(rows, meta: dict, timestamp: str | None = None) -> str:
    payload = dict(meta)
    payload["timestamp"] = timestamp or datetime.now(timezone.utc).isoformat(timespec="seconds")
    payload["rows"] = [{k: _clean(v) for k, v in asdict(r).items()} for r in rows]
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def summary_table(rows) -> str:
    """Fixed-width table: family, parameters, value, bound, fitted, verdict."""
    header = f"{'family':<17}{'n':>3}{'k':>4}{'l':>3}{'m':>3}{'r':>4}  {'value':>14}  {'fitted':>12}  {'verdict':<7} bound"
    lines = [header, "-" * len(header)]
    for row in rows:
        fitted = f"{row.fitted:.6g}" if isinstance(row.fitted, float) else str(row.fitted)
        lines.append(
            f"{row.family:<17}{row.n:>3}{row.k!s:>4}{row.l!s:>3}{row.m!s:>3}{row.r!s:>4}  "
            f"{row.value:>14.8g}  {fitted:>12}  {row.verdict:<7} {row.bound}"
        )
    return "\n".join(lines)
