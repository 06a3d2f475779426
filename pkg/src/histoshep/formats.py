"""Reading integral data and writing results.

Two input formats are accepted:

* CSV with header ``left,right,integral``, one chained segment per row;
* JSON ``{"nodes": [...], "integrals": [...], "jumps": [...]}`` (``jumps``
  optional).

Floats are written with ``repr``, the shortest string that round-trips.
"""

from __future__ import annotations

import csv
import json
import math
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

from .errors import MalformedInput


@dataclass(frozen=True)
class GridInput:
    nodes: list[float]
    integrals: list[float]
    jumps: list[float]


def _num(text: str, where: str) -> float:
    try:
        return float(text)
    except (TypeError, ValueError):
        raise MalformedInput(f"{where}: {text!r} is not a number") from None


def parse_csv(text: str, source: str = "<csv>") -> GridInput:
    rows = list(csv.reader(text.splitlines()))
    rows = [(k + 1, r) for k, r in enumerate(rows) if any(c.strip() for c in r)]
    if not rows:
        raise MalformedInput(f"{source}: empty file")
    line, header = rows[0]
    if [c.strip().lower() for c in header] != ["left", "right", "integral"]:
        raise MalformedInput(f"{source}: line {line}: header must be 'left,right,integral'")
    if len(rows) < 2:
        raise MalformedInput(f"{source}: no data rows")
    nodes: list[float] = []
    mu: list[float] = []
    for line, r in rows[1:]:
        where = f"{source}: row {line}"
        if len(r) != 3:
            raise MalformedInput(f"{where}: expected 3 fields, got {len(r)}")
        left, right, val = (_num(c.strip(), where) for c in r)
        if not nodes:
            nodes.append(left)
        elif left != nodes[-1]:
            raise MalformedInput(f"{where}: left end {left!r} does not match previous right end {nodes[-1]!r}")
        nodes.append(right)
        mu.append(val)
    return GridInput(nodes, mu, [])


def parse_json(text: str, source: str = "<json>") -> GridInput:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"{source}: line {exc.lineno}: {exc.msg}") from None
    if not isinstance(obj, dict) or "nodes" not in obj or "integrals" not in obj:
        raise MalformedInput(f"{source}: expected an object with 'nodes' and 'integrals'")
    out = {}
    for key in ("nodes", "integrals", "jumps"):
        vals = obj.get(key, [])
        if not isinstance(vals, list):
            raise MalformedInput(f"{source}: '{key}' must be a list")
        out[key] = [_num(v, f"{source}: {key}[{i}]") if not isinstance(v, bool) else _bad(source, key, i, v)
                    for i, v in enumerate(vals)]
    return GridInput(out["nodes"], out["integrals"], out["jumps"])


def _bad(source, key, i, v):
    raise MalformedInput(f"{source}: {key}[{i}]: {v!r} is not a number")


def read_grid(path: str | os.PathLike) -> GridInput:
    """Load a CSV or JSON grid file (chosen by extension, ``.json`` or not)."""
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise MalformedInput(f"cannot read {p}: {exc.strerror or exc}") from None
    if p.suffix.lower() == ".json":
        return parse_json(text, str(p))
    return parse_csv(text, str(p))


def fmt(v) -> str:
    """Shortest round-trip text for numbers; plain ``str`` otherwise."""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return repr(v)
    return str(v)


def jsonable(obj):
    """Replace non-finite floats by ``None`` so the JSON stays standard."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if hasattr(obj, "item"):  # numpy scalar
        return jsonable(obj.item())
    return obj


def atomic_write(path: str | os.PathLike, text: str) -> None:
    """Write via a temporary file in the same directory, then rename."""
    p = Path(path)
    fd, tmp = tempfile.mkstemp(dir=p.parent or ".", prefix=f".{p.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, p)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
