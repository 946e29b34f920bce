"""JSON scenario files.

A scenario holds one filtered space and a set of named objects::

    {
      "description": "...",
      "space": {
        "atoms": [["w1", "1/2"], ["w2", "1/2"]],
        "partitions": [[["w1", "w2"]], [["w1"], ["w2"]]]
      },
      "objects": {
        "w":  {"type": "process", "values": [{"w1": "0", "w2": "0"}, {"w1": "1", "w2": "-1"}]},
        "g":  {"type": "grid_integrand", "grid": ["-1", "0", "1"],
               "values": [{"w1": ["1", "0", "1"], "w2": ["+inf", "0", "-inf"]}]},
        "h":  {"type": "convex_integrand", "values": [{"w1": <plconvex>, "w2": "empty"}]},
        "G":  {"type": "interval_process", "values": [{"w1": ["0", "1"], "w2": "empty"}]},
        "f":  {"type": "plconvex", "value": <plconvex>}
      },
      "expected": {...}
    }

Tables are time-major: ``values[t][atom]``.  Numbers are always strings
(``"p/q"``, ``"+inf"``, ``"-inf"``) so nothing passes through floats.  A
``<plconvex>`` is ``{"points": [[x, v], ...], "left_slope": s, "right_slope": s}``
or ``"empty"``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Dict, List, Union

from .extreal import format_ext, parse_ext, parse_rational
from .filtration import FilteredSpace, StructureError
from .integrand import ConvexIntegrand, GridIntegrand
from .plconvex import Interval, PLConvex

__all__ = [
    "SchemaError",
    "Scenario",
    "OBJECT_TYPES",
    "load",
    "loads",
    "save",
    "dumps",
    "bundled",
    "bundled_names",
]

OBJECT_TYPES = ("process", "grid_integrand", "convex_integrand", "interval_process", "plconvex")


class SchemaError(ValueError):
    """Malformed scenario; ``path`` points at the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass
class Scenario:
    space: FilteredSpace
    objects: Dict[str, Any] = field(default_factory=dict)
    expected: Dict[str, Any] = field(default_factory=dict)
    description: str = ""

    def get(self, name: str, kind: type = object):
        if name not in self.objects:
            raise SchemaError(f"objects.{name}", "no such object")
        obj = self.objects[name]
        if not isinstance(obj, kind):
            raise SchemaError(f"objects.{name}", f"expected {kind.__name__}, got {type(obj).__name__}")
        return obj


# ---------------------------------------------------------------------------
# decoding


def _num(path, text, ext=True):
    if not isinstance(text, str):
        raise SchemaError(path, f"numbers must be strings, got {text!r}")
    try:
        return parse_ext(text) if ext else parse_rational(text)
    except ValueError as exc:
        raise SchemaError(path, str(exc)) from None


def _table(path, space: FilteredSpace, rows, decode):
    if not isinstance(rows, list) or not rows:
        raise SchemaError(path, "expected a nonempty list with one row per time")
    if len(rows) > space.horizon + 1:
        raise SchemaError(path, f"{len(rows)} rows for horizon {space.horizon}")
    out = {}
    for t, row in enumerate(rows):
        if not isinstance(row, dict):
            raise SchemaError(f"{path}[{t}]", "expected an object keyed by atom")
        missing = [a for a in space.atoms if a not in row]
        extra = [a for a in row if a not in space.atoms]
        if missing or extra:
            raise SchemaError(f"{path}[{t}]", f"missing atoms {missing}, unknown atoms {extra}")
        for a in space.atoms:
            out[t, a] = decode(f"{path}[{t}].{a}", row[a])
    return out


def _plconvex(path, data):
    try:
        if data != "empty":
            pts = data["points"]
            for i, (x, v) in enumerate(pts):
                _num(f"{path}.points[{i}]", x)
                _num(f"{path}.points[{i}]", v)
        return PLConvex.from_json(data)
    except SchemaError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(path, f"bad piecewise linear function: {exc}") from None


def _interval(path, data):
    if data == "empty":
        return Interval.empty()
    if not (isinstance(data, list) and len(data) == 2):
        raise SchemaError(path, "expected [lo, hi] or \"empty\"")
    try:
        return Interval(_num(f"{path}[0]", data[0]), _num(f"{path}[1]", data[1]))
    except ValueError as exc:
        if isinstance(exc, SchemaError):
            raise
        raise SchemaError(path, str(exc)) from None


def _decode_object(path, space, entry):
    if not isinstance(entry, dict) or "type" not in entry:
        raise SchemaError(path, "object needs a \"type\"")
    kind = entry["type"]
    if kind == "process":
        return _table(f"{path}.values", space, entry.get("values"), _num)
    if kind == "interval_process":
        return _table(f"{path}.values", space, entry.get("values"), _interval)
    if kind == "convex_integrand":
        return ConvexIntegrand(_table(f"{path}.values", space, entry.get("values"), _plconvex))
    if kind == "plconvex":
        return _plconvex(f"{path}.value", entry.get("value"))
    if kind == "grid_integrand":
        grid = entry.get("grid")
        if not isinstance(grid, list):
            raise SchemaError(f"{path}.grid", "expected a list")
        xs = [_num(f"{path}.grid[{i}]", x, ext=False) for i, x in enumerate(grid)]

        def row(p, r):
            if not isinstance(r, list) or len(r) != len(xs):
                raise SchemaError(p, f"expected {len(xs)} values")
            return tuple(_num(f"{p}[{j}]", v) for j, v in enumerate(r))

        values = _table(f"{path}.values", space, entry.get("values"), row)
        try:
            return GridIntegrand(tuple(xs), values)
        except StructureError as exc:
            raise SchemaError(path, str(exc)) from None
    raise SchemaError(f"{path}.type", f"unknown type {kind!r}; expected one of {OBJECT_TYPES}")


def _decode_space(data) -> FilteredSpace:
    if not isinstance(data, dict):
        raise SchemaError("space", "expected an object")
    atoms = data.get("atoms")
    if not isinstance(atoms, list) or not atoms:
        raise SchemaError("space.atoms", "expected a list of [id, probability] pairs")
    ids, probs = [], []
    for i, pair in enumerate(atoms):
        if not (isinstance(pair, list) and len(pair) == 2 and isinstance(pair[0], str)):
            raise SchemaError(f"space.atoms[{i}]", "expected [id, probability]")
        ids.append(pair[0])
        probs.append(_num(f"space.atoms[{i}][1]", pair[1], ext=False))
    parts = data.get("partitions")
    if not isinstance(parts, list) or not parts:
        raise SchemaError("space.partitions", "expected one partition per time")
    try:
        return FilteredSpace(tuple(ids), tuple(probs), tuple(tuple(tuple(c) for c in p) for p in parts))
    except (StructureError, TypeError) as exc:
        raise SchemaError("space", str(exc)) from None


def loads(text: str) -> Scenario:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"invalid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise SchemaError("$", "expected a JSON object")
    space = _decode_space(data.get("space"))
    objects = {}
    for name, entry in (data.get("objects") or {}).items():
        objects[name] = _decode_object(f"objects.{name}", space, entry)
    return Scenario(space, objects, data.get("expected") or {}, data.get("description", ""))


def load(path: Union[str, Path]) -> Scenario:
    return loads(Path(path).read_text())


# ---------------------------------------------------------------------------
# encoding


def _rows(space: FilteredSpace, values: dict, encode) -> List[dict]:
    times = sorted({t for t, _ in values})
    return [{a: encode(values[t, a]) for a in space.atoms} for t in times]


def _encode_interval(s: Interval):
    return "empty" if s.is_empty else [format_ext(s.lo), format_ext(s.hi)]


def _encode_object(space: FilteredSpace, obj) -> dict:
    if isinstance(obj, PLConvex):
        return {"type": "plconvex", "value": obj.to_json()}
    if isinstance(obj, ConvexIntegrand):
        return {"type": "convex_integrand", "values": _rows(space, obj.fibers, PLConvex.to_json)}
    if isinstance(obj, GridIntegrand):
        return {
            "type": "grid_integrand",
            "grid": [format_ext(x) for x in obj.xgrid],
            "values": _rows(space, obj.values, lambda r: [format_ext(v) for v in r]),
        }
    if isinstance(obj, dict):
        sample = next(iter(obj.values()))
        if isinstance(sample, Interval):
            return {"type": "interval_process", "values": _rows(space, obj, _encode_interval)}
        return {"type": "process", "values": _rows(space, obj, format_ext)}
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def to_data(s: Scenario) -> dict:
    data = {}
    if s.description:
        data["description"] = s.description
    data["space"] = {
        "atoms": [[a, format_ext(p)] for a, p in zip(s.space.atoms, s.space.prob)],
        "partitions": [[list(c) for c in part] for part in s.space.partitions],
    }
    data["objects"] = {name: _encode_object(s.space, obj) for name, obj in s.objects.items()}
    if s.expected:
        data["expected"] = s.expected
    return data


def _render(node, indent: int = 0) -> str:
    # nested containers go one per line; flat ones stay on a single line
    flat = json.dumps(node)
    if not isinstance(node, (list, dict)) or len(flat) <= 72:
        return flat
    pad, inner = " " * indent, " " * (indent + 2)
    if isinstance(node, dict):
        items = [f"{inner}{json.dumps(k)}: {_render(v, indent + 2)}" for k, v in node.items()]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    items = [f"{inner}{_render(v, indent + 2)}" for v in node]
    return "[\n" + ",\n".join(items) + f"\n{pad}]"


def dumps(s: Scenario) -> str:
    return _render(to_data(s)) + "\n"


def save(s: Scenario, path: Union[str, Path]) -> None:
    Path(path).write_text(dumps(s))


# ---------------------------------------------------------------------------
# bundled corpus


def bundled_names() -> List[str]:
    root = resources.files("optproj") / "scenarios"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def bundled(name: str) -> Scenario:
    path = resources.files("optproj") / "scenarios" / f"{name}.json"
    return loads(path.read_text())
