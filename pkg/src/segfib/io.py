"""JSON encoding for points, polytopes, fibrations and triangulations."""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any

from .families import AffineMap, FamilyInstance, build_family
from .polytope import LatticePolytope
from .triangulation import TriangulationComplex

SAFE_INT = 2 ** 53


def encode(obj: Any) -> Any:
    """Recursively make obj JSON-safe: big ints and Fractions become strings."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return obj if abs(obj) <= SAFE_INT else str(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [encode(v) for v in obj]
    raise TypeError(f"cannot encode {type(obj).__name__}")


def decode_int(v: Any) -> int:
    if isinstance(v, bool):
        raise ValueError("boolean where an integer was expected")
    if isinstance(v, int):
        return v
    if isinstance(v, str) and v.lstrip("-").isdigit():
        return int(v)
    raise ValueError(f"not an integer: {v!r}")


def dumps(obj: Any) -> str:
    return json.dumps(encode(obj), sort_keys=True, indent=2) + "\n"


def points_to_json(points) -> dict:
    points = [list(p) for p in points]
    return {"dim": len(points[0]) if points else 0, "points": points}


def polytope_to_json(p: LatticePolytope) -> dict:
    out = points_to_json(p.lattice_points() if p.dim else [()])
    out["vertices"] = [list(v) for v in p.vertices]
    out["facets"] = [{"normal": list(f.normal), "offset": f.offset} for f in p.facets]
    return out


def polytope_from_json(data: dict) -> LatticePolytope:
    key = "vertices" if "vertices" in data else "points"
    pts = [tuple(decode_int(c) for c in v) for v in data[key]]
    if not pts:
        raise ValueError("no points given")
    return LatticePolytope.from_points(pts)


def affine_map_from_json(data: dict) -> AffineMap:
    return AffineMap.make([[decode_int(c) for c in r] for r in data["matrix"]],
                          [decode_int(c) for c in data["offset"]], decode_int(data["source_dim"]))


def instance_to_json(inst: FamilyInstance) -> dict:
    out = {"key": inst.key, "polytope": polytope_to_json(inst.polytope)}
    if inst.fibration is not None:
        out["fibration"] = inst.fibration.to_json()
    if inst.base is not None:
        out["base"] = polytope_to_json(inst.base)
    if inst.steps:
        out["steps"] = [{"alpha": a, "beta": b} for a, b in inst.steps]
    return out


def instance_from_json(data: dict) -> FamilyInstance:
    """Accept a family spec, a generated instance, or a bare point/polytope record."""
    if not isinstance(data, dict):
        raise ValueError("input must be a JSON object")
    if "family" in data:
        return build_family(data)
    if "polytope" in data:
        inst = FamilyInstance(data.get("key", "input"), polytope_from_json(data["polytope"]))
        if "fibration" in data:
            inst.fibration = affine_map_from_json(data["fibration"])
        if "base" in data:
            inst.base = polytope_from_json(data["base"])
        if "steps" in data:
            inst.steps = [(list(s["alpha"]), list(s["beta"])) for s in data["steps"]]
        return inst
    if "points" in data or "vertices" in data:
        return FamilyInstance("input", polytope_from_json(data))
    raise ValueError("unrecognised input: expected a family spec, instance or point set")


def triangulation_from_json(data: dict) -> TriangulationComplex:
    return TriangulationComplex.from_json(data)


def read_json_arg(arg: str) -> Any:
    """Inline JSON if the argument looks like JSON, else a file path ("-" reads stdin)."""
    text = arg.strip()
    if text.startswith("{") or text.startswith("["):
        return json.loads(text)
    if arg == "-":
        import sys

        return json.load(sys.stdin)
    return json.loads(Path(arg).read_text())
