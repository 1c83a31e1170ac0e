"""CSV/JSON artifacts and exact numeric parsing for the CLI.

Formats:
  trajectory CSV  header ``t,w,w1,w2,w3``, one accepted step per row,
                  with a JSON sidecar ``{termination, steps, rejected_steps}``
  profile CSV     header ``r,u`` (or ``t,w`` for transformed profiles)
  energy CSV      header ``t,E,dE_formula,dE_numeric`` plus a JSON sidecar
                  ``{monotone, max_violation, median_identity_gap}``

Floats are written with repr (shortest round-trip form), so outputs are
byte-stable for identical inputs.  Numeric CLI inputs accept ``num/den``
rationals, integers and decimal/scientific literals; everything is
parsed exactly and converted to float only where a float is required.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import List, Sequence, Tuple, Union

import numpy as np

from .coeffs import Params
from .energy import MonotonicityAudit
from .ode import State, Termination, Trajectory


class CsvFormatError(ValueError):
    """Malformed CSV input; carries the 1-based offending line number."""

    def __init__(self, path, line: int, message: str):
        super().__init__(f"{path}:{line}: {message}")
        self.path = str(path)
        self.line = line


def parse_exact(text: str) -> Union[Fraction, float]:
    """Parse 'num/den', integer, or decimal/scientific literals exactly.

    Finite decimal strings become Fractions (exact), so the value can
    flow through the rational pipeline and be narrowed to float at the
    point of use.
    """
    s = text.strip()
    if not s:
        raise ValueError("empty numeric field")
    if s.lstrip("+-").lower() in ("inf", "infinity"):
        return float(s)
    if "/" in s:
        num, _, den = s.partition("/")
        try:
            return Fraction(int(num.strip()), int(den.strip()))
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"bad rational literal {text!r}: {exc}") from None
    try:
        return Fraction(s)
    except ValueError:
        raise ValueError(f"bad numeric literal {text!r}") from None


def format_exact(value: Union[Fraction, float]) -> str:
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    return repr(float(value))


def _write_json(path, payload: dict) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def sidecar_path(csv_path) -> Path:
    return Path(str(csv_path) + ".json")


def write_trajectory_csv(path, traj: Trajectory) -> None:
    lines = ["t,w,w1,w2,w3"]
    for s in traj.states:
        lines.append(",".join(repr(v) for v in (s.t, *s.y)))
    Path(path).write_text("\n".join(lines) + "\n")
    _write_json(sidecar_path(path), {
        "termination": traj.termination.value,
        "steps": traj.steps,
        "rejected_steps": traj.rejected_steps,
    })


def _read_rows(path, header: Sequence[str]) -> List[List[float]]:
    text = Path(path).read_text()
    lines = text.splitlines()
    if not lines:
        raise CsvFormatError(path, 1, "empty file")
    got = [c.strip() for c in lines[0].split(",")]
    if got != list(header):
        raise CsvFormatError(path, 1, f"expected header {','.join(header)!r}, got {lines[0]!r}")
    rows = []
    for i, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        cells = line.split(",")
        if len(cells) != len(header):
            raise CsvFormatError(path, i, f"expected {len(header)} columns, got {len(cells)}")
        try:
            rows.append([float(c) for c in cells])
        except ValueError:
            raise CsvFormatError(path, i, f"bad numeric value in {line!r}") from None
    if not rows:
        raise CsvFormatError(path, 2, "no data rows")
    return rows


def read_trajectory_csv(path, params: Params) -> Trajectory:
    """Rebuild a Trajectory from CSV (+ sidecar if present)."""
    rows = _read_rows(path, ("t", "w", "w1", "w2", "w3"))
    states = [State(t=row[0], y=tuple(row[1:])) for row in rows]
    termination = Termination.REACHED_END
    steps = len(states) - 1
    rejected = 0
    sc = sidecar_path(path)
    if sc.exists():
        meta = json.loads(sc.read_text())
        termination = Termination(meta.get("termination", termination.value))
        steps = int(meta.get("steps", steps))
        rejected = int(meta.get("rejected_steps", rejected))
    return Trajectory(params=params, states=states, termination=termination,
                      steps=steps, rejected_steps=rejected)


def write_profile_csv(path, r: np.ndarray, u: np.ndarray,
                      header: Tuple[str, str] = ("r", "u")) -> None:
    lines = [",".join(header)]
    for rv, uv in zip(r, u):
        lines.append(f"{float(rv)!r},{float(uv)!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_profile_csv(path, header: Tuple[str, str] = ("r", "u")) -> Tuple[np.ndarray, np.ndarray]:
    rows = _read_rows(path, header)
    arr = np.array(rows)
    return arr[:, 0], arr[:, 1]


def write_energy_csv(path, audit: MonotonicityAudit) -> None:
    lines = ["t,E,dE_formula,dE_numeric"]
    for rec in audit.records:
        lines.append(",".join(repr(v) for v in
                              (rec.t, rec.E, rec.dE_formula, rec.dE_numeric)))
    Path(path).write_text("\n".join(lines) + "\n")
    _write_json(sidecar_path(path), audit.to_dict())


def write_json_report(path, payload: dict) -> None:
    _write_json(path, payload)
