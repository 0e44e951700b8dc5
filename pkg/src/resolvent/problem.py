"""Problem files: a JSON document with ``ring``, ``objects``, ``geometry`` and ``params`` stanzas."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Optional

from .charts import Chart
from .errors import InputError, InvalidArgument
from .euler import Geometry, GradedMatrix
from .matrices import ComplexOnChart, MatrixHom
from .polys import order_from_name
from .resolve import Presentation

DEFAULT_PARAMS = {"order": "grevlex", "max_depth": 8, "degree_cap": 40, "seed": 0, "permutation": 0}


@dataclass
class ProblemFile:
    raw: Dict[str, Any]
    chart: Optional[Chart]
    objects: Dict[str, Any]
    geometry: Optional[Geometry]
    params: Dict[str, Any] = field(default_factory=dict)

    def target(self, kinds=None):
        """The object named by ``params.target``, or the only object of a matching kind."""
        name = self.params.get("target")
        if name is not None:
            if name not in self.objects:
                raise InputError(f"unknown object {name!r}")
            return name, self.objects[name]
        pool = [(n, o) for n, o in self.objects.items() if kinds is None or isinstance(o, kinds)]
        if not pool:
            raise InputError("the problem file has no object this command can use")
        return pool[0]


def _fraction(x) -> Fraction:
    try:
        return Fraction(x)
    except (TypeError, ValueError) as exc:
        raise InputError(f"bad point coordinate {x!r}") from exc


def build_problem(raw: Dict[str, Any], overrides: Optional[Dict[str, Any]] = None) -> ProblemFile:
    if not isinstance(raw, dict):
        raise InputError("problem file must be a JSON object")
    params = dict(DEFAULT_PARAMS)
    params.update(raw.get("params", {}))
    for k, v in (overrides or {}).items():
        if v is not None:
            params[k] = v
    try:
        order = order_from_name(params["order"])
    except (KeyError, ValueError, InvalidArgument) as exc:
        raise InputError(f"unknown monomial order {params['order']!r}") from exc
    chart = None
    ring = raw.get("ring")
    if ring is not None:
        if "vars" not in ring:
            raise InputError("ring stanza needs 'vars'")
        chart = Chart.make(
            ring["vars"],
            ring.get("relations", ()),
            [tuple(x) for x in ring.get("exceptionals", ())],
            order,
            ring.get("name", "root"),
        )
    geometry = None
    if "geometry" in raw and raw["geometry"] is not None:
        g = raw["geometry"]
        pts = tuple(tuple(_fraction(c) for c in p) for p in g.get("points", ()))
        geometry = Geometry(g.get("kind", "P2"), pts)
    objects = {}
    for name, spec in raw.get("objects", {}).items():
        try:
            objects[name] = _build_object(name, spec, chart, geometry)
        except KeyError as exc:
            raise InputError(f"object {name!r} lacks field {exc.args[0]!r}") from None
    return ProblemFile(raw, chart, objects, geometry, params)


def _build_object(name, spec, chart, geometry):
    kind = spec.get("type", "matrix")
    if kind in ("matrix", "presentation", "complex") and chart is None:
        raise InputError(f"object {name!r} needs a ring stanza")
    if kind == "matrix":
        return MatrixHom.make(chart, spec["entries"])
    elif kind == "presentation":
        return Presentation(MatrixHom.make(chart, spec["entries"]))
    elif kind == "complex":
        return ComplexOnChart(tuple(MatrixHom.make(chart, t) for t in spec["terms"]))
    elif kind == "graded":
        vars = spec.get("vars") or (geometry.vars if geometry else None)
        if vars is None:
            raise InputError(f"graded object {name!r} needs vars or a geometry")
        return GradedMatrix.make(vars, spec["source_twists"], spec["target_twists"], spec["entries"])
    else:
        raise InputError(f"object {name!r} has unknown type {kind!r}")


def load_problem(path: str, overrides: Optional[Dict[str, Any]] = None) -> ProblemFile:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}") from exc
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    return build_problem(raw, overrides)
